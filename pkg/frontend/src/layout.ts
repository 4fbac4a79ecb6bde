/** Deterministic top-down layered layout for the canvas pane.
 *
 * Leaves take consecutive horizontal slots in document order; every parent
 * sits centered over the span of its children; depth picks the row. No
 * positions are persisted, so the same plan always lays out the same way.
 */

import type { EdgeKind, Plan, PlanNode } from "./types";

export const NODE_W = 168;
export const NODE_H = 58;
export const H_GAP = 26;
export const V_GAP = 64;
export const PAD = 20;

export interface PlacedBox {
  id: string;
  /** center of the box, in pixels */
  x: number;
  y: number;
  depth: number;
}

export interface PlacedEdge {
  parentId: string;
  childId: string;
  label: EdgeKind;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  /** midpoint, where the kind label goes */
  lx: number;
  ly: number;
}

export interface TreeLayout {
  boxes: PlacedBox[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

export function layoutTree(plan: Plan): TreeLayout {
  const slot = new Map<string, number>();
  const depthOf = new Map<string, number>();
  let cursor = 0;
  let maxDepth = 0;

  const place = (node: PlanNode, depth: number): number => {
    depthOf.set(node.id, depth);
    if (depth > maxDepth) maxDepth = depth;
    let x: number;
    if (node.children.length === 0) {
      x = cursor;
      cursor += 1;
    } else {
      const xs = node.children.map((child) => place(child, depth + 1));
      x = (xs[0] + xs[xs.length - 1]) / 2;
    }
    slot.set(node.id, x);
    return x;
  };
  place(plan.root, 0);

  const centerX = (s: number): number => PAD + s * (NODE_W + H_GAP) + NODE_W / 2;
  const centerY = (d: number): number => PAD + d * (NODE_H + V_GAP) + NODE_H / 2;

  const boxes: PlacedBox[] = [];
  const edges: PlacedEdge[] = [];
  const walk = (node: PlanNode): void => {
    const depth = depthOf.get(node.id)!;
    const x = centerX(slot.get(node.id)!);
    const y = centerY(depth);
    boxes.push({ id: node.id, x, y, depth });
    for (const child of node.children) {
      const cx = centerX(slot.get(child.id)!);
      const cy = centerY(depthOf.get(child.id)!);
      edges.push({
        parentId: node.id,
        childId: child.id,
        label: child.edge_from_parent as EdgeKind,
        x1: x,
        y1: y + NODE_H / 2,
        x2: cx,
        y2: cy - NODE_H / 2,
        lx: (x + cx) / 2,
        ly: (y + NODE_H / 2 + cy - NODE_H / 2) / 2,
      });
      walk(child);
    }
  };
  walk(plan.root);

  const slots = Math.max(cursor, 1);
  return {
    boxes,
    edges,
    width: PAD * 2 + slots * (NODE_W + H_GAP) - H_GAP,
    height: PAD * 2 + (maxDepth + 1) * NODE_H + maxDepth * V_GAP,
  };
}
