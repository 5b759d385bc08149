// Thin typed client over the service's JSON routes. Every method maps to
// one route; error bodies are surfaced as ApiRequestError so callers can
// branch on the envelope code (conflict handling leans on this).

import type {
  ApiErrorBody,
  GraphViewPayload,
  HealthPayload,
  ReportPayload,
  ReviewPayload,
  SettingsPayload,
  StatsPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  readonly code: ApiErrorBody["code"];
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiRequestError";
    this.code = body.code;
    this.status = status;
  }
}

async function toError(res: Response): Promise<ApiRequestError> {
  let body: ApiErrorBody = { code: "unavailable", message: `HTTP ${res.status}` };
  try {
    const parsed = await res.json();
    if (parsed && typeof parsed.message === "string") body = parsed;
  } catch {
    // non-JSON error body; keep the fallback
  }
  return new ApiRequestError(res.status, body);
}

export interface ReportParams {
  mode?: string;
  method?: string;
  seed?: number;
  version?: string;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  private readonly token: string | null;

  constructor(base = "", fetchFn: FetchLike = (u, i) => fetch(u, i), token: string | null = null) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
    this.token = token;
  }

  private headers(json = false): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["Content-Type"] = "application/json";
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async get<T>(path: string, params?: Record<string, string | number | undefined>): Promise<T> {
    const query = new URLSearchParams();
    for (const [k, v] of Object.entries(params ?? {})) {
      if (v !== undefined) query.set(k, String(v));
    }
    const qs = query.toString();
    const res = await this.fetchFn(`${this.base}${path}${qs ? `?${qs}` : ""}`, {
      headers: this.headers(),
    });
    if (!res.ok) throw await toError(res);
    return (await res.json()) as T;
  }

  health(): Promise<HealthPayload> {
    return this.get("/api/health");
  }

  report(params: ReportParams = {}): Promise<ReportPayload> {
    return this.get("/api/score/report", { ...params });
  }

  view(view: string, params: Record<string, string | number | undefined> = {}): Promise<GraphViewPayload> {
    return this.get("/api/graph/snapshot", { view, ...params });
  }

  async reviews(): Promise<ReviewPayload[]> {
    const body = await this.get<{ reviews: ReviewPayload[] }>("/api/review/queue");
    return body.reviews;
  }

  async decide(reviewId: string, decision: "approve" | "reject", reviewer: string): Promise<ReviewPayload> {
    const res = await this.fetchFn(`${this.base}/api/review/${reviewId}/decision`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ decision, reviewer }),
    });
    if (!res.ok) throw await toError(res);
    return (await res.json()) as ReviewPayload;
  }

  settings(): Promise<SettingsPayload> {
    return this.get("/api/validation/settings");
  }

  stats(): Promise<StatsPayload> {
    return this.get("/api/validation/stats");
  }
}
