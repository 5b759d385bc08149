// App wiring: one poller drives report + views + queue refreshes at the
// pipeline's scheduler cadence; decision clicks post through the review
// board, which owns optimistic state and conflict rollback.

import { ApiClient } from "./api.js";
import { createPoller } from "./poll.js";
import { ReviewBoard } from "./review.js";
import { renderDomainBars } from "./render/bars.js";
import { renderQueue } from "./render/cards.js";
import { renderChokepoints } from "./render/chokepoints.js";
import { renderGauge } from "./render/gauge.js";
import { renderGraphView } from "./render/graphview.js";
import { renderTrend, TrendBuffer } from "./render/trend.js";
import type { GraphViewPayload } from "./types.js";

const REVIEWER_KEY = "pqgraph-reviewer";

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (found === null) throw new Error(`missing #${id}`);
  return found;
}

function reviewerName(): string {
  let name = localStorage.getItem(REVIEWER_KEY);
  if (!name) {
    name = window.prompt("reviewer name for the audit trail:")?.trim() || "analyst";
    localStorage.setItem(REVIEWER_KEY, name);
  }
  return name;
}

async function start(): Promise<void> {
  const api = new ApiClient("");
  const board = new ReviewBoard();
  const trend = new TrendBuffer();
  let statusFilter: string | null = null;
  let graphSource: "full" | "mesh" = "full";
  let fullView: GraphViewPayload | null = null;
  let meshView: GraphViewPayload | null = null;
  let heat = new Map<string, number>();

  const drawGraph = () => {
    const view = graphSource === "mesh" ? meshView : fullView;
    if (view === null) return;
    el("graph").innerHTML = renderGraphView(view.nodes ?? [], view.edges ?? [], heat, {
      statusFilter,
    });
  };
  const drawQueue = () => {
    el("queue").innerHTML = renderQueue(board.list(), board.pendingCount());
  };

  const refresh = async () => {
    const [report, statusView, mesh, heatView, chokeView, reviews, stats] = await Promise.all([
      api.report(),
      api.view("validation_status"),
      api.view("service_mesh"),
      api.view("pq_heatmap"),
      api.view("vpn_chokepoints"),
      api.reviews(),
      api.stats(),
    ]);

    trend.push({
      version: report.version,
      normalizedExposure: report.normalized_exposure,
      pqri: report.pqri,
      at: Date.now(),
    });
    el("gauge").innerHTML = renderGauge(report.pqri);
    el("trend").innerHTML = renderTrend(trend);
    el("bars").innerHTML = report.attribution
      ? renderDomainBars(report.attribution, report.normalized_exposure)
      : "";
    el("report-meta").textContent =
      `version ${report.version} | mode ${report.mode} | ${report.n_nodes} assets`;

    fullView = statusView;
    meshView = mesh;
    heat = new Map((heatView.nodes ?? []).map((n) => [n.id, n.heat ?? 0]));
    drawGraph();
    el("chokepoints").innerHTML = renderChokepoints(chokeView.chokepoints ?? []);

    board.sync(reviews);
    drawQueue();
    el("stats").textContent =
      `validated ${stats.total} | pending ${stats.pending} | ` +
      `disagreement ${stats.disagreement_rate === null ? "n/a" : stats.disagreement_rate.toFixed(2)}`;
  };

  let intervalMs = 30_000;
  try {
    const settings = await api.settings();
    intervalMs = settings.scheduler_interval_seconds * 1000;
  } catch {
    // settings route unavailable: fall back to the default cadence
  }

  const poller = createPoller({
    task: refresh,
    intervalMs,
    isHidden: () => document.hidden,
    onError: (err) => {
      el("error-banner").textContent = err instanceof Error ? err.message : String(err);
      el("error-banner").classList.remove("hidden");
    },
  });

  el("queue").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const decision = target.dataset["decision"];
    if (decision !== "approve" && decision !== "reject") return;
    const cardEl = target.closest("[data-review-id]") as HTMLElement | null;
    const reviewId = cardEl?.dataset["reviewId"];
    if (!reviewId) return;
    void board.decide(api, reviewId, decision, reviewerName()).then(() => drawQueue());
    drawQueue(); // decide() flips the card to "posting" synchronously, so the buttons go inert now
  });

  el("status-filter").addEventListener("change", (event) => {
    const value = (event.target as HTMLSelectElement).value;
    statusFilter = value === "all" ? null : value;
    drawGraph();
  });

  el("graph-source").addEventListener("change", (event) => {
    graphSource = (event.target as HTMLSelectElement).value === "mesh" ? "mesh" : "full";
    drawGraph();
  });

  poller.start();
}

void start();
