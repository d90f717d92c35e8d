import { ApiClient } from "./api.js";
import { bindLabelKeys } from "./keyboard.js";
import { ExpertSession } from "./session.js";
import { renderSession, renderStats } from "./view.js";

const STATS_POLL_MS = 5000;

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const expertId = params.get("expert");
  const root = document.getElementById("app");
  const statsPanel = document.getElementById("stats");
  if (!root || !statsPanel) {
    throw new Error("missing #app or #stats mount points");
  }
  if (!expertId) {
    root.textContent = "missing ?expert=<id> in the URL";
    return;
  }

  const api = new ApiClient("");
  const options = {
    expertId,
    showCrowd: params.get("crowd") === "1",
    exportUrl: api.exportUrl(),
    onLabel: (label: Parameters<typeof session.submit>[0]) => void session.submit(label),
    onRetry: () => void session.retry(),
  };
  const session = new ExpertSession(api, expertId, (state) =>
    renderSession(root, state, options)
  );

  bindLabelKeys(window, (label) => void session.submit(label));

  const pollStats = async () => {
    try {
      renderStats(statsPanel, await api.stats());
    } catch {
      // stats are advisory; keep the last rendered panel on a blip
    }
  };
  void session.start();
  void pollStats();
  window.setInterval(() => void pollStats(), STATS_POLL_MS);
}

boot();
