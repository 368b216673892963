/** Hash routing: #/ campaign list, #/c/<id> dashboard, #/c/<id>/<claim> session. */

import { Client } from "./api.js";
import { DashboardController } from "./dashboard.js";
import { SessionController } from "./session.js";

function esc(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

async function renderCampaignList(client: Client, root: HTMLElement): Promise<void> {
  try {
    const { campaigns } = await client.listCampaigns();
    if (campaigns.length === 0) {
      root.innerHTML = `<div class="empty">no campaigns yet — create one via <code>POST /campaigns</code></div>`;
      return;
    }
    root.innerHTML = `<ul class="campaign-list">${campaigns
      .map((c) => `<li><a href="#/c/${encodeURIComponent(c)}">${esc(c)}</a></li>`)
      .join("")}</ul>`;
  } catch (err) {
    root.innerHTML = `<div class="banner">service unreachable (${esc(String(err))})</div>`;
  }
}

export function bootstrap(): void {
  const client = new Client("");
  const root = document.getElementById("app");
  if (!root) return;
  let session: SessionController | null = null;

  const dispatch = () => {
    const parts = window.location.hash.replace(/^#\/?/, "").split("/").filter(Boolean);
    session = null;
    if (parts[0] === "c" && parts.length === 3) {
      session = new SessionController(
        client,
        decodeURIComponent(parts[1]),
        decodeURIComponent(parts[2]),
        root,
      );
      void session.load();
    } else if (parts[0] === "c" && parts.length === 2) {
      void new DashboardController(client, decodeURIComponent(parts[1]), root).load();
    } else {
      void renderCampaignList(client, root);
    }
  };

  window.addEventListener("hashchange", dispatch);
  window.addEventListener("keydown", (ev) => {
    if (ev.target instanceof HTMLInputElement) return;
    session?.handleKey(ev.key);
  });
  dispatch();
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
