/** Dashboard: status badges and counts after a simulated campaign, empty
 * state for unknown campaigns, degraded banner with a cached view. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { DashboardController } from "../src/dashboard.js";
import {
  runSimulatedCampaign,
  startServer,
  writeFixture,
  type Fixture,
  type LiveServer,
} from "./server.js";

let fixture: Fixture;
let server: LiveServer;

beforeAll(async () => {
  fixture = writeFixture();
  // a full simulated campaign tuned on disk before the service starts
  runSimulatedCampaign(fixture, "sim");
  server = await startServer(fixture);
});

afterAll(() => {
  server?.stop();
});

function mount(campaign: string, base?: string) {
  const root = document.createElement("main");
  document.body.appendChild(root);
  const controller = new DashboardController(
    new Client(base ?? server.base), campaign, root,
  );
  return { controller, root };
}

describe("campaign_dashboard", () => {
  it("reflects per-claim statuses and counts after a simulated campaign", async () => {
    const { controller, root } = mount("sim");
    await controller.load();

    const reports = await (await fetch(`${server.base}/campaigns/sim/reports`)).json();
    const byClaim = new Map(
      (reports.reports as { claim_id: string; status: string; annotations: number }[]).map(
        (r) => [r.claim_id, r],
      ),
    );
    expect(byClaim.size).toBe(2);

    const rows = root.querySelectorAll("tbody tr");
    expect(rows.length).toBe(2);
    for (const row of rows) {
      const claim = row.getAttribute("data-claim")!;
      const expected = byClaim.get(claim)!;
      expect(["complete", "early_stop", "capped"]).toContain(expected.status);
      expect(row.getAttribute("data-status")).toBe(expected.status);
      expect(row.querySelector(".badge")!.textContent).toBe(expected.status);
      expect(row.querySelector('[data-role="annots"]')!.textContent).toBe(
        String(expected.annotations),
      );
    }

    // the summary line aggregates complete / early-stop counts
    const countLine = root.querySelector('[data-role="status-counts"]')!;
    const statuses = [...byClaim.values()].map((r) => r.status);
    for (const status of new Set(statuses)) {
      const n = statuses.filter((s) => s === status).length;
      const chip = countLine.querySelector(`[data-status="${status}"]`);
      expect(chip, `count chip for ${status}`).toBeTruthy();
      expect(chip!.textContent).toBe(`${n} ${status}`);
    }
  });

  it("fresh campaigns show every claim pending", async () => {
    await fetch(`${server.base}/campaigns`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        campaign_id: "fresh",
        taxonomy_path: fixture.taxonomy,
        scores_path: fixture.scores,
        dataset_path: fixture.dataset,
      }),
    });
    const { controller, root } = mount("fresh");
    await controller.load();
    const rows = [...root.querySelectorAll("tbody tr")];
    expect(rows.length).toBe(2);
    expect(rows.every((r) => r.getAttribute("data-status") === "pending")).toBe(true);
  });

  it("unknown campaign renders the empty state", async () => {
    const { controller, root } = mount("ghost");
    await controller.load();
    expect(root.querySelector('[data-role="empty-state"]')).toBeTruthy();
    expect(root.textContent).toContain("ghost");
  });

  it("server loss shows a degraded banner over the cached view", async () => {
    const { controller, root } = mount("sim");
    await controller.load();
    expect(root.querySelectorAll("tbody tr").length).toBe(2);

    // point the same controller at a dead endpoint and reload
    controller.client = new Client("http://127.0.0.1:9");
    await controller.load();
    expect(root.querySelector('[data-role="degraded"]')).toBeTruthy();
    expect(root.querySelectorAll("tbody tr").length).toBe(2);  // cached rows
  });
});
