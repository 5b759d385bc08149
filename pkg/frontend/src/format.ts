// Display-only formatting. Values pass through from API fields; the only
// transformation is decimal rounding for screen width.

export function fmt(value: number, decimals = 2): string {
  return value.toFixed(decimals);
}

export function edgeLabel(source: string, target: string, relation: string): string {
  return `${source} -${relation}-> ${target}`;
}

export function pathLabel(nodes: string[]): string {
  return nodes.join(" -> ");
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const STATUS_CLASSES: Record<string, string> = {
  unvalidated: "st-unvalidated",
  auto_approved: "st-auto",
  llm_approved: "st-llm",
  human_approved: "st-human",
  rejected: "st-rejected",
  under_review: "st-review",
};

export function statusClass(status: string): string {
  return STATUS_CLASSES[status] ?? "st-unknown";
}
