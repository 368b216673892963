/** Campaign dashboard: per-claim status, progress, and tuned thresholds. */

import { ApiError, CampaignSummary, Client } from "./api.js";
import { statusBadge } from "./session.js";

function esc(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

const STATUS_ORDER = ["pending", "running", "complete", "early_stop", "capped"];

export class DashboardController {
  private cached: CampaignSummary | null = null;

  constructor(
    public client: Client,  // swappable so a reconnect can change transport
    readonly campaignId: string,
    private readonly root: HTMLElement,
  ) {}

  async load(): Promise<void> {
    try {
      this.cached = await this.client.getCampaign(this.campaignId);
      this.render(null);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.renderMissing();
      } else {
        // degraded: keep the last known view, announce staleness
        this.render(`server unreachable, showing last known state (${String(err)})`);
      }
    }
  }

  private renderMissing(): void {
    this.root.innerHTML = `
      <div class="empty" data-role="empty-state">
        <h2>no campaign named "${esc(this.campaignId)}"</h2>
        <p>create one through the service API, or pick another from the <a href="#/">campaign list</a>.</p>
      </div>`;
  }

  render(degraded: string | null): void {
    const campaign = this.cached;
    const banner = degraded
      ? `<div class="banner" data-role="degraded">${esc(degraded)}</div>`
      : "";
    if (!campaign) {
      this.root.innerHTML = `${banner}<div class="empty" data-role="loading">loading campaign…</div>`;
      return;
    }
    const counts = new Map<string, number>();
    for (const claim of campaign.claims) {
      counts.set(claim.status, (counts.get(claim.status) ?? 0) + 1);
    }
    const countLine = STATUS_ORDER.filter((s) => counts.has(s))
      .map(
        (s) =>
          `<span class="count" data-status="${esc(s)}">${counts.get(s)} ${esc(s)}</span>`,
      )
      .join(" · ");
    const rows = campaign.claims
      .map(
        (c) => `
        <tr data-claim="${esc(c.claim_id)}" data-status="${esc(c.status)}">
          <td><a href="#/c/${encodeURIComponent(this.campaignId)}/${encodeURIComponent(c.claim_id)}">${esc(c.claim_id)}</a></td>
          <td class="claim-text">${esc(c.text)}</td>
          <td>${statusBadge(c.status)}</td>
          <td class="num" data-role="annots">${c.annotations_used}</td>
          <td class="num">${c.median.toFixed(3)}</td>
          <td class="num">${c.ci_width.toFixed(3)}</td>
        </tr>`,
      )
      .join("");
    this.root.innerHTML = `
      ${banner}
      <div class="dashboard" data-role="dashboard">
        <div class="dashboard-head">
          <h2>${esc(campaign.campaign_id)} <small>(${esc(campaign.taxonomy_id)})</small></h2>
          <p class="status-counts" data-role="status-counts">${countLine}</p>
          <button data-role="refresh">refresh</button>
        </div>
        <table class="claims">
          <thead>
            <tr><th>claim</th><th>text</th><th>status</th>
                <th>annotations</th><th>median</th><th>ci width</th></tr>
          </thead>
          <tbody>${rows}</tbody>
        </table>
      </div>`;
    this.root
      .querySelector<HTMLButtonElement>('[data-role="refresh"]')
      ?.addEventListener("click", () => void this.load());
  }
}
