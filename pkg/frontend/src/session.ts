/** Live annotation session: render the proposed datapoint, post answers
 * with the server's version token, refetch on conflicts, never hold
 * optimistic state. */

import { ApiError, Client, DoneItem, NextItem } from "./api.js";
import { posteriorSvg } from "./sparkline.js";

function esc(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

export function statusBadge(status: string): string {
  return `<span class="badge badge-${esc(status)}">${esc(status)}</span>`;
}

export class SessionController {
  current: NextItem | DoneItem | null = null;
  private busy = false;
  private pending: Promise<void> = Promise.resolve();
  private banner: string | null = null;

  constructor(
    private readonly client: Client,
    readonly campaignId: string,
    readonly claimId: string,
    private readonly root: HTMLElement,
  ) {}

  /** Settles when all in-flight work (load/answer/undo) has finished. */
  idle(): Promise<void> {
    return this.pending;
  }

  async load(): Promise<void> {
    try {
      this.current = await this.client.getNext(this.campaignId, this.claimId);
      this.banner = null;
    } catch (err) {
      this.banner = `could not reach the annotation service (${String(err)})`;
    }
    this.render();
  }

  private enqueue(work: () => Promise<void>): Promise<void> {
    const run = this.pending.then(work, work);
    this.pending = run.catch(() => undefined);
    return run;
  }

  answer(entails: boolean): Promise<void> {
    // capture the item the user was looking at; if the view advances
    // before this click is processed (double submit), it becomes a no-op
    const item = this.current;
    return this.enqueue(async () => {
      if (!item || item.done || this.current !== item) return;
      this.busy = true;
      this.render();
      try {
        await this.client.postAnnotation(this.campaignId, this.claimId, {
          doc_id: item.doc_id,
          entails,
          version: item.version,
        });
        await this.load();
      } catch (err) {
        if (err instanceof ApiError && [409, 410, 422].includes(err.status)) {
          // stale view: refetch the authoritative state, replay nothing
          await this.load();
        } else {
          this.banner = `annotation not saved, retry (${String(err)})`;
          this.render();
        }
      } finally {
        this.busy = false;
        this.render();
      }
    });
  }

  undo(): Promise<void> {
    return this.enqueue(async () => {
      if (this.busy) return;
      this.busy = true;
      try {
        await this.client.undo(this.campaignId, this.claimId);
        await this.load();
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          this.banner = "nothing to undo yet";
          this.render();
        } else {
          this.banner = `undo failed, retry (${String(err)})`;
          this.render();
        }
      } finally {
        this.busy = false;
        this.render();
      }
    });
  }

  render(): void {
    const item = this.current;
    const banner = this.banner
      ? `<div class="banner" data-role="banner">${esc(this.banner)}</div>`
      : "";
    if (!item) {
      this.root.innerHTML = `${banner}<div class="empty" data-role="loading">loading session…</div>`;
      return;
    }
    if (item.done) {
      const r = item.report;
      this.root.innerHTML = `
        ${banner}
        <div class="report-card" data-role="report">
          <h2>session finished ${statusBadge(r.status)}</h2>
          <dl>
            <dt>claim</dt><dd>${esc(r.claim_id)}</dd>
            <dt>threshold</dt><dd data-role="threshold">${r.threshold.toFixed(3)}</dd>
            <dt>95% interval width</dt><dd>${r.ci_width.toFixed(3)}</dd>
            <dt>annotations</dt><dd data-role="annotations">${r.annotations}</dd>
          </dl>
          <a href="#/c/${encodeURIComponent(this.campaignId)}">back to campaign</a>
        </div>`;
      return;
    }
    const s = item.summary;
    const target = s.completion_ci_width;
    const progress = Math.min(100, Math.round((target / Math.max(s.ci_width, 1e-9)) * 100));
    this.root.innerHTML = `
      ${banner}
      <div class="session" data-role="session">
        <div class="session-head">
          <h2 data-role="claim-text">${esc(item.claim_text)}</h2>
          ${statusBadge(s.status)}
        </div>
        <blockquote class="doc-text" data-role="doc-text" data-doc-id="${esc(item.doc_id)}">
          ${esc(item.doc_text || "(no document text on file)")}
        </blockquote>
        <p class="score-line">
          score <strong data-role="score">${item.s_t.toFixed(3)}</strong>
          &middot; median ${s.median.toFixed(3)}
          &middot; <span data-role="annotations">${s.annotations_used}</span> annotations
        </p>
        ${posteriorSvg(s.posterior)}
        <div class="ci-progress" title="interval width ${s.ci_width.toFixed(3)} vs target ${target}">
          <div class="ci-progress-fill" style="width: ${progress}%"></div>
          <span class="ci-progress-label" data-role="ci">ci ${s.ci_width.toFixed(3)} / target ${target}</span>
        </div>
        <div class="answer-buttons">
          <button data-role="entails" ${this.busy ? "disabled" : ""}>entails (y)</button>
          <button data-role="not-entails" ${this.busy ? "disabled" : ""}>does not entail (n)</button>
          <button data-role="undo" ${this.busy ? "disabled" : ""}>undo (u)</button>
        </div>
      </div>`;
    this.root
      .querySelector<HTMLButtonElement>('[data-role="entails"]')
      ?.addEventListener("click", () => void this.answer(true));
    this.root
      .querySelector<HTMLButtonElement>('[data-role="not-entails"]')
      ?.addEventListener("click", () => void this.answer(false));
    this.root
      .querySelector<HTMLButtonElement>('[data-role="undo"]')
      ?.addEventListener("click", () => void this.undo());
  }

  handleKey(key: string): void {
    if (key === "y") void this.answer(true);
    else if (key === "n") void this.answer(false);
    else if (key === "u") void this.undo();
  }
}
