/** Typed client for the claimsect annotation service (claimsect/v1). */

export interface PosteriorSummary {
  x: number[];
  mass: number[];
  median: number;
  ci_width: number;
}

export interface SessionSummary {
  claim_id: string;
  status: string;
  annotations_used: number;
  version: number;
  median: number;
  ci_width: number;
  completion_ci_width: number;
  posterior: PosteriorSummary;
}

export interface ThresholdReport {
  claim_id: string;
  threshold: number;
  ci_width: number;
  annotations: number;
  status: string;
}

export interface NextItem {
  done: false;
  doc_id: string;
  doc_text: string;
  claim_id: string;
  claim_text: string;
  s_t: number;
  version: number;
  summary: SessionSummary;
}

export interface DoneItem {
  done: true;
  report: ThresholdReport;
  version: number;
}

export interface ClaimStatus {
  claim_id: string;
  text: string;
  status: string;
  annotations_used: number;
  median: number;
  ci_width: number;
}

export interface CampaignSummary {
  campaign_id: string;
  taxonomy_id: string;
  claims: ClaimStatus[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, detail);
}

export class Client {
  constructor(readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  listCampaigns(): Promise<{ campaigns: string[] }> {
    return this.request("/campaigns");
  }

  getCampaign(id: string): Promise<CampaignSummary> {
    return this.request(`/campaigns/${encodeURIComponent(id)}`);
  }

  getNext(id: string, claim: string): Promise<NextItem | DoneItem> {
    return this.request(
      `/campaigns/${encodeURIComponent(id)}/sessions/${encodeURIComponent(claim)}/next`,
    );
  }

  postAnnotation(
    id: string,
    claim: string,
    body: { doc_id: string; entails: boolean; version: number },
  ): Promise<SessionSummary> {
    return this.request(
      `/campaigns/${encodeURIComponent(id)}/sessions/${encodeURIComponent(claim)}/annotations`,
      { method: "POST", body: JSON.stringify(body) },
    );
  }

  undo(id: string, claim: string): Promise<SessionSummary> {
    return this.request(
      `/campaigns/${encodeURIComponent(id)}/undo/${encodeURIComponent(claim)}`,
      { method: "POST" },
    );
  }

  reports(id: string): Promise<{ reports: ThresholdReport[] }> {
    return this.request(`/campaigns/${encodeURIComponent(id)}/reports`);
  }
}
