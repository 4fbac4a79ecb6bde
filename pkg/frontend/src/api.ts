/** Thin typed wrapper over the plan service's JSON endpoints. Every method
 * maps to exactly one request; callers own retries and sequencing. */

import type {
  CascadeStep,
  EdgeKind,
  EvidenceItem,
  FallacyItem,
  Plan,
  PlanNode,
  PlanSummary,
} from "./types";

export class ApiError extends Error {
  status: number;
  code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

export interface LazyModeResult {
  plan: Plan;
  generated: string[];
}

export interface DiscussionPointsResult {
  points: Record<string, string[]>;
  errors: Record<string, string>;
}

export interface CascadeOpened {
  cascade_id: string;
  steps: CascadeStep[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function failureFrom(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (typeof body.code === "string") code = body.code;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (url, init) => fetch(url, init)) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) throw await failureFrom(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const response = await this.fetchImpl(this.base + path, { method: "GET" });
    if (!response.ok) throw await failureFrom(response);
    return response.text();
  }

  // -- plans ---------------------------------------------------------------

  async listPlans(): Promise<PlanSummary[]> {
    const body = await this.request<{ plans: PlanSummary[] }>("GET", "/plans");
    return body.plans;
  }

  createPlan(argument: string): Promise<Plan> {
    return this.request("POST", "/plans", { argument });
  }

  getPlan(planId: string): Promise<Plan> {
    return this.request("GET", `/plans/${planId}`);
  }

  deletePlan(planId: string): Promise<void> {
    return this.request("DELETE", `/plans/${planId}`);
  }

  setLazyMode(planId: string, lazyMode: boolean): Promise<LazyModeResult> {
    return this.request("PATCH", `/plans/${planId}`, { lazy_mode: lazyMode });
  }

  // -- structure -----------------------------------------------------------

  addNode(planId: string, parentId: string, edge: EdgeKind, text: string): Promise<PlanNode> {
    return this.request("POST", `/plans/${planId}/nodes`, {
      parent_id: parentId,
      edge,
      text,
    });
  }

  editText(planId: string, nodeId: string, text: string): Promise<PlanNode> {
    return this.request("PATCH", `/plans/${planId}/nodes/${nodeId}`, { text });
  }

  setEdge(planId: string, nodeId: string, edge: EdgeKind): Promise<PlanNode> {
    return this.request("PATCH", `/plans/${planId}/nodes/${nodeId}`, { edge });
  }

  moveNode(planId: string, nodeId: string, parentId: string, edge: EdgeKind): Promise<PlanNode> {
    return this.request("PATCH", `/plans/${planId}/nodes/${nodeId}`, {
      move: { parent_id: parentId, edge },
    });
  }

  reorderNode(planId: string, nodeId: string, toIndex: number): Promise<PlanNode> {
    return this.request("PATCH", `/plans/${planId}/nodes/${nodeId}`, {
      reorder: { to_index: toIndex },
    });
  }

  async removeNode(planId: string, nodeId: string): Promise<number> {
    const body = await this.request<{ removed: number }>(
      "DELETE",
      `/plans/${planId}/nodes/${nodeId}`,
    );
    return body.removed;
  }

  // -- ideation ------------------------------------------------------------

  async elaborate(planId: string, nodeId: string): Promise<string[]> {
    const body = await this.request<{ aspects: string[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/elaborate`,
    );
    return body.aspects;
  }

  discussionPoints(
    planId: string,
    nodeId: string,
    aspects: string[],
  ): Promise<DiscussionPointsResult> {
    return this.request("POST", `/plans/${planId}/nodes/${nodeId}/discussion-points`, {
      aspects,
    });
  }

  async counterarguments(planId: string, nodeId: string): Promise<string[]> {
    const body = await this.request<{ items: string[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/sparks/counterarguments`,
    );
    return body.items;
  }

  async fallacies(planId: string, nodeId: string): Promise<FallacyItem[]> {
    const body = await this.request<{ items: FallacyItem[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/sparks/fallacies`,
    );
    return body.items;
  }

  async evidence(planId: string, nodeId: string): Promise<EvidenceItem[]> {
    const body = await this.request<{ items: EvidenceItem[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/sparks/evidence`,
    );
    return body.items;
  }

  async acceptSuggestions(
    planId: string,
    nodeId: string,
    edge: EdgeKind,
    items: string[],
  ): Promise<string[]> {
    const body = await this.request<{ node_ids: string[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/accept`,
      { edge, items },
    );
    return body.node_ids;
  }

  // -- drafting ------------------------------------------------------------

  async draftNode(planId: string, nodeId: string): Promise<string> {
    const body = await this.request<{ text: string }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/draft`,
    );
    return body.text;
  }

  async generateAll(planId: string): Promise<string[]> {
    const body = await this.request<{ node_ids: string[] }>(
      "POST",
      `/plans/${planId}/generate`,
    );
    return body.node_ids;
  }

  async alternatives(planId: string, nodeId: string, n: number): Promise<string[]> {
    const body = await this.request<{ candidates: string[] }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/alternatives`,
      { n },
    );
    return body.candidates;
  }

  replaceDraft(planId: string, nodeId: string, text: string): Promise<PlanNode> {
    return this.request("POST", `/plans/${planId}/nodes/${nodeId}/replace`, { text });
  }

  async refineDraft(planId: string, nodeId: string, instruction: string): Promise<string> {
    const body = await this.request<{ text: string }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/refine`,
      { instruction },
    );
    return body.text;
  }

  async fixFallacies(planId: string, nodeId: string, fallacies: FallacyItem[]): Promise<string> {
    const body = await this.request<{ text: string }>(
      "POST",
      `/plans/${planId}/nodes/${nodeId}/fix-fallacies`,
      { fallacies },
    );
    return body.text;
  }

  // -- cascade wizard --------------------------------------------------------

  openCascade(planId: string, nodeId: string, text: string): Promise<CascadeOpened> {
    return this.request("POST", `/plans/${planId}/nodes/${nodeId}/cascade`, { text });
  }

  async resolveStep(
    cascadeId: string,
    stepIndex: number,
    choice: { topic?: string; keep?: boolean; skip?: boolean },
  ): Promise<CascadeStep> {
    const body = await this.request<{ step: CascadeStep }>(
      "POST",
      `/cascades/${cascadeId}/steps/${stepIndex}`,
      choice,
    );
    return body.step;
  }

  // -- exports ---------------------------------------------------------------

  exportPlan(planId: string, format: "markdown" | "text"): Promise<string> {
    return this.requestText(`/plans/${planId}/export?format=${format}`);
  }
}
