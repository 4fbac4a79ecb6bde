/** Workspace store: one mutable view state, every change funneled through
 * emit(). The page re-renders from scratch on each emit, so no listener may
 * mutate state re-entrantly.
 *
 * The store performs no planning logic. Mutations call the service and then
 * re-read the plan, so both panes always show what the server persisted.
 */

import { ApiClient, ApiError } from "./api";
import type { CascadeStep, EdgeKind, Plan, PlanSummary } from "./types";
import { findNode } from "./types";

export type PanelKind =
  | "aspects"
  | "counterarguments"
  | "evidence"
  | "fallacies"
  | "alternatives";

export interface Panel {
  kind: PanelKind;
  nodeId: string;
  lines: string[];
  chosen: boolean[];
  /** single-select panels (alternatives) replace instead of append */
  single: boolean;
}

export interface Wizard {
  cascadeId: string;
  steps: CascadeStep[];
  at: number;
}

export interface ActionError {
  scope: string;
  message: string;
}

export type FormKind = "add" | "text" | "draft" | "refine" | "move" | "edge";

export interface OpenForm {
  kind: FormKind;
  nodeId: string;
  /** move form: drop target picked on the canvas */
  parentId?: string;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

export class Workspace {
  api: ApiClient;

  plans: PlanSummary[] = [];
  plan: Plan | null = null;
  selectedId: string | null = null;
  hoverId: string | null = null;
  busy = false;
  banner: string | null = null;
  actionError: ActionError | null = null;
  panel: Panel | null = null;
  wizard: Wizard | null = null;
  form: OpenForm | null = null;
  dragFrom: string | null = null;
  /** node ids drafted by the last lazy-off or generate call */
  progress: string[] | null = null;

  private listeners: Array<() => void> = [];

  constructor(api: ApiClient) {
    this.api = api;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of [...this.listeners]) listener();
  }

  /** Resolves once no mutation is in flight. Mostly for tests. */
  settled(): Promise<void> {
    if (!this.busy) return Promise.resolve();
    return new Promise((resolve) => {
      const stop = this.subscribe(() => {
        if (!this.busy) {
          stop();
          resolve();
        }
      });
    });
  }

  /** One in-flight mutation at a time; extra clicks are dropped, not queued. */
  private async run(scope: string, fn: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.actionError = null;
    this.progress = null;
    this.emit();
    try {
      await fn();
    } catch (err) {
      this.actionError = { scope, message: describe(err) };
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  /** Adopt a fresh plan from the server and drop state that points nowhere. */
  private adopt(plan: Plan): void {
    this.plan = plan;
    this.banner = null;
    if (this.selectedId && !findNode(plan, this.selectedId)) this.selectedId = null;
    if (this.panel && !findNode(plan, this.panel.nodeId)) this.panel = null;
    if (this.form && !findNode(plan, this.form.nodeId)) this.form = null;
  }

  private async refresh(): Promise<void> {
    if (!this.plan) return;
    try {
      this.adopt(await this.api.getPlan(this.plan.id));
    } catch (err) {
      this.banner = describe(err); // keep the current view on screen
    }
  }

  // -- view-only transitions (no network, emit directly) --------------------

  select(nodeId: string | null): void {
    this.selectedId = nodeId;
    this.emit();
  }

  hover(nodeId: string | null): void {
    if (this.hoverId === nodeId) return;
    this.hoverId = nodeId;
    this.emit();
  }

  openForm(form: OpenForm): void {
    this.form = form;
    this.actionError = null;
    this.emit();
  }

  closeForm(): void {
    this.form = null;
    this.emit();
  }

  togglePanelChoice(index: number): void {
    if (!this.panel) return;
    if (this.panel.single) {
      this.panel.chosen = this.panel.chosen.map((_, i) => i === index);
    } else {
      this.panel.chosen[index] = !this.panel.chosen[index];
    }
    this.emit();
  }

  closePanel(): void {
    this.panel = null;
    this.emit();
  }

  beginDrag(nodeId: string): void {
    this.dragFrom = nodeId;
    this.emit();
  }

  cancelDrag(): void {
    if (this.dragFrom === null) return;
    this.dragFrom = null;
    this.emit();
  }

  /** Drop on the canvas: ask for the edge kind before issuing the move. */
  dropOn(parentId: string): void {
    const source = this.dragFrom;
    this.dragFrom = null;
    if (!source || source === parentId) {
      this.emit();
      return;
    }
    this.form = { kind: "move", nodeId: source, parentId };
    this.emit();
  }

  wizardGo(delta: number): void {
    if (!this.wizard) return;
    const next = this.wizard.at + delta;
    if (next < 0 || next >= this.wizard.steps.length) return;
    this.wizard.at = next;
    this.emit();
  }

  closeWizard(): void {
    this.wizard = null;
    this.emit();
  }

  // -- plan collection -------------------------------------------------------

  loadPlans(): Promise<void> {
    return this.run("chooser", async () => {
      this.plans = await this.api.listPlans();
    });
  }

  createPlan(argument: string): Promise<void> {
    return this.run("chooser", async () => {
      const plan = await this.api.createPlan(argument);
      this.form = null;
      this.adopt(plan);
      this.selectedId = plan.root.id;
    });
  }

  openPlan(planId: string): Promise<void> {
    return this.run("chooser", async () => {
      this.adopt(await this.api.getPlan(planId));
      this.selectedId = null;
      this.panel = null;
      this.wizard = null;
      this.form = null;
    });
  }

  closePlan(): Promise<void> {
    this.plan = null;
    this.selectedId = null;
    this.panel = null;
    this.wizard = null;
    this.form = null;
    return this.loadPlans();
  }

  deletePlan(planId: string): Promise<void> {
    return this.run("chooser", async () => {
      await this.api.deletePlan(planId);
      this.plans = await this.api.listPlans();
    });
  }

  // -- whole-plan controls ---------------------------------------------------

  toggleLazy(): Promise<void> {
    return this.run("toolbar", async () => {
      if (!this.plan) return;
      const result = await this.api.setLazyMode(this.plan.id, !this.plan.lazy_mode);
      this.adopt(result.plan);
      if (result.generated.length) this.progress = result.generated;
    });
  }

  generate(): Promise<void> {
    return this.run("toolbar", async () => {
      if (!this.plan) return;
      const ids = await this.api.generateAll(this.plan.id);
      this.progress = ids;
      await this.refresh();
    });
  }

  // -- structural edits --------------------------------------------------------

  addChild(parentId: string, edge: EdgeKind, text: string): Promise<void> {
    return this.run(`dialog:${parentId}`, async () => {
      if (!this.plan) return;
      await this.api.addNode(this.plan.id, parentId, edge, text);
      this.form = null;
      await this.refresh();
    });
  }

  editText(nodeId: string, text: string): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.editText(this.plan.id, nodeId, text);
      this.form = null;
      await this.refresh();
    });
  }

  setEdge(nodeId: string, edge: EdgeKind): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.setEdge(this.plan.id, nodeId, edge);
      await this.refresh();
    });
  }

  move(nodeId: string, parentId: string, edge: EdgeKind): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.moveNode(this.plan.id, nodeId, parentId, edge);
      this.form = null;
      await this.refresh();
    });
  }

  reorder(nodeId: string, toIndex: number): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.reorderNode(this.plan.id, nodeId, toIndex);
      await this.refresh();
    });
  }

  remove(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.removeNode(this.plan.id, nodeId);
      await this.refresh();
    });
  }

  // -- ideation panels ---------------------------------------------------------

  private openPanel(kind: PanelKind, nodeId: string, lines: string[], single = false): void {
    this.panel = {
      kind,
      nodeId,
      lines,
      chosen: lines.map(() => false),
      single,
    };
  }

  elaborate(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      const aspects = await this.api.elaborate(this.plan.id, nodeId);
      this.openPanel("aspects", nodeId, aspects);
    });
  }

  sparkCounterarguments(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      const items = await this.api.counterarguments(this.plan.id, nodeId);
      this.openPanel("counterarguments", nodeId, items);
    });
  }

  sparkEvidence(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      const items = await this.api.evidence(this.plan.id, nodeId);
      // accepted evidence nodes carry "strategy: description" as their text
      this.openPanel(
        "evidence",
        nodeId,
        items.map((e) => `${e.strategy}: ${e.description}`),
      );
    });
  }

  sparkFallacies(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      const items = await this.api.fallacies(this.plan.id, nodeId);
      this.openPanel(
        "fallacies",
        nodeId,
        items.map((f) => `${f.name}: ${f.explanation}`),
      );
    });
  }

  alternatives(nodeId: string, n = 3): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      const candidates = await this.api.alternatives(this.plan.id, nodeId, n);
      this.openPanel("alternatives", nodeId, candidates, true);
    });
  }

  /** Commit the open panel: what that means depends on its kind. */
  acceptPanel(): Promise<void> {
    const panel = this.panel;
    if (!panel) return Promise.resolve();
    return this.run("panel", async () => {
      if (!this.plan) return;
      const picked = panel.lines.filter((_, i) => panel.chosen[i]);
      if (panel.kind === "alternatives") {
        if (picked.length === 1) {
          await this.api.replaceDraft(this.plan.id, panel.nodeId, picked[0]);
        }
      } else if (panel.kind === "fallacies") {
        // repair the draft against every listed fallacy, then adopt the fix
        const items = panel.lines.map((line) => {
          const cut = line.indexOf(": ");
          return { name: line.slice(0, cut), explanation: line.slice(cut + 2) };
        });
        const text = await this.api.fixFallacies(this.plan.id, panel.nodeId, items);
        await this.api.replaceDraft(this.plan.id, panel.nodeId, text);
      } else if (picked.length) {
        const edge: EdgeKind =
          panel.kind === "aspects"
            ? "featured_by"
            : panel.kind === "counterarguments"
              ? "attacked_by"
              : "supported_by";
        await this.api.acceptSuggestions(this.plan.id, panel.nodeId, edge, picked);
      }
      this.panel = null;
      await this.refresh();
    });
  }

  // -- drafting ------------------------------------------------------------------

  draft(nodeId: string): Promise<void> {
    return this.run(`node:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.draftNode(this.plan.id, nodeId);
      await this.refresh();
    });
  }

  replaceDraft(nodeId: string, text: string): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.replaceDraft(this.plan.id, nodeId, text);
      this.form = null;
      await this.refresh();
    });
  }

  refine(nodeId: string, instruction: string): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      await this.api.refineDraft(this.plan.id, nodeId, instruction);
      this.form = null;
      await this.refresh();
    });
  }

  // -- cascade wizard ----------------------------------------------------------

  /** Edit node text and open the dependent-update wizard over the result. */
  cascade(nodeId: string, text: string): Promise<void> {
    return this.run(`dialog:${nodeId}`, async () => {
      if (!this.plan) return;
      const opened = await this.api.openCascade(this.plan.id, nodeId, text);
      this.form = null;
      this.wizard = {
        cascadeId: opened.cascade_id,
        steps: opened.steps,
        at: 0,
      };
      await this.refresh();
    });
  }

  resolveStep(choice: { topic?: string; keep?: boolean; skip?: boolean }): Promise<void> {
    const wizard = this.wizard;
    if (!wizard) return Promise.resolve();
    return this.run("wizard", async () => {
      const step = await this.api.resolveStep(wizard.cascadeId, wizard.at, choice);
      wizard.steps[wizard.at] = step;
      const pending = wizard.steps.findIndex((s) => s.status === "pending");
      if (pending >= 0) wizard.at = pending;
      await this.refresh();
    });
  }
}
