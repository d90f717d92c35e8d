// DOM rendering. Message text always goes through textContent so handles
// and links can never be interpreted as markup.

import type { Label, StatsResponse } from "./api.js";
import { CATEGORIES } from "./labels.js";
import type { SessionState } from "./session.js";

export interface ViewOptions {
  expertId: string;
  showCrowd: boolean;
  exportUrl: string;
  onLabel: (label: Label) => void;
  onRetry: () => void;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function renderHistogram(counts: Record<Label, number>): HTMLElement {
  const wrap = el("div", "histogram");
  const max = Math.max(1, ...Object.values(counts));
  for (const category of CATEGORIES) {
    const count = counts[category.label] ?? 0;
    const row = el("div", "histogram-row");
    row.appendChild(el("span", "histogram-label", category.label));
    const bar = el("div", "histogram-bar");
    bar.style.width = `${(100 * count) / max}%`;
    row.appendChild(bar);
    row.appendChild(el("span", "histogram-count", String(count)));
    wrap.appendChild(row);
  }
  return wrap;
}

export function renderSession(root: HTMLElement, state: SessionState, options: ViewOptions): void {
  root.replaceChildren();
  const header = el("header");
  header.appendChild(el("h1", undefined, "adjudication queue"));
  header.appendChild(el("span", "expert-id", `expert: ${options.expertId}`));
  root.appendChild(header);

  if (state.kind === "loading") {
    root.appendChild(el("p", "status", "loading next item..."));
    return;
  }

  if (state.kind === "done") {
    const done = el("section", "done");
    done.appendChild(el("h2", undefined, "queue complete"));
    done.appendChild(el("p", undefined, "every open item has your label."));
    const link = el("a", "export-link", "download resolved gold labels (csv)");
    link.setAttribute("href", options.exportUrl);
    done.appendChild(link);
    root.appendChild(done);
    return;
  }

  if (state.kind === "offline") {
    const banner = el("div", "banner banner-offline", state.message);
    const retry = el("button", "retry", "retry");
    retry.addEventListener("click", options.onRetry);
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  if (state.kind === "labeling" && state.notice) {
    root.appendChild(el("div", "banner banner-notice", state.notice));
  }

  const item = state.item;
  const card = el("section", "item-card");
  card.appendChild(el("div", "item-id", item.item_id));
  card.appendChild(el("p", "item-text", item.anon_text));
  if (options.showCrowd) {
    card.appendChild(renderHistogram(item.crowd_counts));
  }
  root.appendChild(card);

  const buttons = el("div", "label-buttons");
  const busy = state.kind !== "labeling";
  for (const category of CATEGORIES) {
    const button = el("button", "label-button") as HTMLButtonElement;
    button.dataset.label = category.label;
    button.disabled = busy;
    button.appendChild(el("span", "label-key", category.label));
    button.appendChild(el("span", "label-title", category.title));
    button.appendChild(el("span", "label-description", `(${category.description})`));
    button.addEventListener("click", () => options.onLabel(category.label));
    buttons.appendChild(button);
  }
  root.appendChild(buttons);
  root.appendChild(
    el("p", "hint", "press A, B, C or D to label and advance")
  );
}

export function renderStats(panel: HTMLElement, stats: StatsResponse): void {
  panel.replaceChildren();
  panel.appendChild(el("h2", undefined, "progress"));
  const kappaText = stats.kappa === null ? "n/a" : stats.kappa.toFixed(3);
  panel.appendChild(el("p", "kappa", `expert agreement (kappa): ${kappaText}`));
  const counts = el("ul", "status-counts");
  for (const [status, count] of Object.entries(stats.status_counts)) {
    counts.appendChild(el("li", undefined, `${status}: ${count}`));
  }
  panel.appendChild(counts);
  const resolved = el("p", "resolved-split");
  resolved.textContent = `resolved: ${stats.resolved_by_provenance["R2U"] ?? 0} unanimous, ${
    stats.resolved_by_provenance["R2S"] ?? 0
  } majority-fallback of ${stats.total}`;
  panel.appendChild(resolved);
}
