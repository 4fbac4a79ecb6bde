/** Wire types mirroring the plan JSON the service returns, plus the few
 * tree walks the panes share. The server is the single source of truth;
 * nothing here mutates a plan. */

export type EdgeKind = "featured_by" | "elaborated_by" | "attacked_by" | "supported_by";

export type NodeKind =
  | "main_argument"
  | "key_aspect"
  | "discussion_point"
  | "counterargument"
  | "supporting_evidence";

export const EDGE_KINDS: EdgeKind[] = [
  "featured_by",
  "elaborated_by",
  "attacked_by",
  "supported_by",
];

export interface ChatTurn {
  role: "system" | "user" | "assistant";
  content: string;
  timestamp: string;
}

export interface Draft {
  text: string;
  stale: boolean;
  history: string[];
  refine_chat: ChatTurn[];
}

export interface PlanNode {
  id: string;
  kind: NodeKind;
  edge_from_parent: EdgeKind | null;
  prompt_text: string;
  color_index: number;
  draft: Draft | null;
  children: PlanNode[];
}

export interface Plan {
  version: number;
  id: string;
  lazy_mode: boolean;
  created_at: string;
  modified_at: string;
  next_color: number;
  root: PlanNode;
}

export interface PlanSummary {
  id: string;
  argument: string;
  lazy_mode: boolean;
  created_at: string;
  modified_at: string;
  nodes: number;
}

export type StepStatus = "pending" | "applied" | "skipped";

export interface CascadeStep {
  index: number;
  node_id: string;
  suggested_topics: string[];
  status: StepStatus;
}

export interface FallacyItem {
  name: string;
  explanation: string;
}

export interface EvidenceItem {
  strategy: string;
  description: string;
}

export interface PlacedNode {
  node: PlanNode;
  depth: number;
}

/** Depth-first, children in stored order: the block pane's display order. */
export function documentOrder(plan: Plan): PlacedNode[] {
  const out: PlacedNode[] = [];
  const walk = (node: PlanNode, depth: number): void => {
    out.push({ node, depth });
    for (const child of node.children) walk(child, depth + 1);
  };
  walk(plan.root, 0);
  return out;
}

export function findNode(plan: Plan, id: string): PlanNode | null {
  for (const { node } of documentOrder(plan)) {
    if (node.id === id) return node;
  }
  return null;
}

export function parentOf(plan: Plan, id: string): PlanNode | null {
  for (const { node } of documentOrder(plan)) {
    if (node.children.some((child) => child.id === id)) return node;
  }
  return null;
}

/** Ids of `id` and everything under it; used to rule out cyclic moves. */
export function subtreeIds(plan: Plan, id: string): Set<string> {
  const start = findNode(plan, id);
  const out = new Set<string>();
  if (!start) return out;
  const walk = (node: PlanNode): void => {
    out.add(node.id);
    for (const child of node.children) walk(child);
  };
  walk(start);
  return out;
}
