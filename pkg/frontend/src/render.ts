/** DOM renderer. The whole page is rebuilt from the store on every change;
 * event handlers are bound once on the container and dispatch via
 * data-action attributes, so nothing needs re-wiring after a render.
 *
 * SVG nodes are read with getAttribute("data-node") rather than dataset:
 * the markup is parsed as HTML but the elements are SVG, and attribute
 * access is the lowest common denominator.
 */

import { layoutTree, NODE_H, NODE_W } from "./layout";
import { colorFor } from "./palette";
import type { Panel, Workspace } from "./state";
import type { EdgeKind, NodeKind, Plan, PlanNode } from "./types";
import { documentOrder, EDGE_KINDS, findNode, parentOf } from "./types";

const KIND_LABEL: Record<NodeKind, string> = {
  main_argument: "main argument",
  key_aspect: "key aspect",
  discussion_point: "discussion point",
  counterargument: "counterargument",
  supporting_evidence: "evidence",
};

// same vocabulary as the markdown export tags
const EDGE_LABEL: Record<EdgeKind, string> = {
  featured_by: "featured",
  elaborated_by: "elaborated",
  attacked_by: "counter",
  supported_by: "support",
};

const PANEL_TITLE: Record<Panel["kind"], string> = {
  aspects: "suggested key aspects",
  counterarguments: "possible counterarguments",
  evidence: "evidence strategies",
  fallacies: "possible logical fallacies",
  alternatives: "alternative drafts",
};

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function needsDraft(node: PlanNode): boolean {
  if (node.edge_from_parent === null) return false;
  return node.draft === null || node.draft.stale;
}

function snippet(text: string, limit = 46): string {
  return text.length <= limit ? text : text.slice(0, limit - 1) + "…";
}

function edgeOptions(selected: EdgeKind | null): string {
  return EDGE_KINDS.map(
    (edge) =>
      `<option value="${edge}"${edge === selected ? " selected" : ""}>` +
      `${EDGE_LABEL[edge]}</option>`,
  ).join("");
}

export class WorkspaceView {
  private root: HTMLElement;
  private store: Workspace;

  constructor(root: HTMLElement, store: Workspace) {
    this.root = root;
    this.store = store;
    this.bind();
    store.subscribe(() => this.render());
    this.render();
  }

  // -- event wiring ----------------------------------------------------------

  private bind(): void {
    this.root.addEventListener("click", (event) => {
      const target = (event.target as Element).closest("[data-action]");
      if (!target || !this.root.contains(target)) return;
      this.dispatch(target as HTMLElement);
    });
    this.root.addEventListener("change", (event) => {
      const target = event.target as HTMLElement;
      if (target.getAttribute("data-action") === "lazy") void this.store.toggleLazy();
    });
    // canvas drag: press on one node, release on another, pick the edge
    this.root.addEventListener("mousedown", (event) => {
      const hit = (event.target as Element).closest("[data-canvas-node]");
      if (hit) this.store.beginDrag(hit.getAttribute("data-node")!);
    });
    this.root.addEventListener("mouseup", (event) => {
      if (this.store.dragFrom === null) return;
      const hit = (event.target as Element).closest("[data-canvas-node]");
      if (hit) this.store.dropOn(hit.getAttribute("data-node")!);
      else this.store.cancelDrag();
    });
    this.root.addEventListener("mouseover", (event) => {
      const hit = (event.target as Element).closest("[data-node]");
      this.store.hover(hit ? hit.getAttribute("data-node") : null);
    });
  }

  private dispatch(el: HTMLElement): void {
    const action = el.getAttribute("data-action")!;
    const node = el.getAttribute("data-node") ?? "";
    const store = this.store;
    switch (action) {
      // chooser
      case "open-plan":
        void store.openPlan(el.getAttribute("data-plan")!);
        break;
      case "delete-plan":
        void store.deletePlan(el.getAttribute("data-plan")!);
        break;
      case "create-plan": {
        const text = this.inputValue("#new-plan-text");
        if (text.trim()) void store.createPlan(text.trim());
        break;
      }
      // toolbar
      case "back":
        void store.closePlan();
        break;
      case "generate":
        void store.generate();
        break;
      // block / node controls
      case "select":
        store.select(node);
        break;
      case "edit":
        store.openForm({ kind: "text", nodeId: node });
        break;
      case "add":
        store.openForm({ kind: "add", nodeId: node });
        break;
      case "edge-form":
        store.openForm({ kind: "edge", nodeId: node });
        break;
      case "elaborate":
        void store.elaborate(node);
        break;
      case "spark-counter":
        void store.sparkCounterarguments(node);
        break;
      case "spark-evidence":
        void store.sparkEvidence(node);
        break;
      case "spark-fallacies":
        void store.sparkFallacies(node);
        break;
      case "draft":
        void store.draft(node);
        break;
      case "alternatives":
        void store.alternatives(node);
        break;
      case "refine-form":
        store.openForm({ kind: "refine", nodeId: node });
        break;
      case "edit-draft":
        store.openForm({ kind: "draft", nodeId: node });
        break;
      case "up":
      case "down":
        this.reorderBy(node, action === "up" ? -1 : 1);
        break;
      case "delete":
        void store.remove(node);
        break;
      // dialog
      case "form-confirm":
        this.confirmForm(false);
        break;
      case "form-cascade":
        this.confirmForm(true);
        break;
      case "form-cancel":
        store.closeForm();
        break;
      // suggestion panel
      case "panel-toggle":
        store.togglePanelChoice(Number(el.getAttribute("data-index")));
        break;
      case "panel-accept":
        void store.acceptPanel();
        break;
      case "panel-close":
        store.closePanel();
        break;
      // cascade wizard
      case "wizard-topic":
        void store.resolveStep({ topic: el.getAttribute("data-topic")! });
        break;
      case "wizard-keep":
        void store.resolveStep({ keep: true });
        break;
      case "wizard-skip":
        void store.resolveStep({ skip: true });
        break;
      case "wizard-prev":
        store.wizardGo(-1);
        break;
      case "wizard-next":
        store.wizardGo(1);
        break;
      case "wizard-close":
        store.closeWizard();
        break;
    }
  }

  private inputValue(selector: string): string {
    const el = this.root.querySelector<HTMLInputElement | HTMLTextAreaElement>(selector);
    return el ? el.value : "";
  }

  private reorderBy(nodeId: string, delta: number): void {
    const plan = this.store.plan;
    if (!plan) return;
    const parent = parentOf(plan, nodeId);
    if (!parent) return;
    const index = parent.children.findIndex((child) => child.id === nodeId);
    const to = index + delta;
    if (to < 0 || to >= parent.children.length) return;
    void this.store.reorder(nodeId, to);
  }

  private confirmForm(cascade: boolean): void {
    const form = this.store.form;
    if (!form) return;
    const text = this.inputValue("#form-text");
    const edge = (this.inputValue("#form-edge") || "featured_by") as EdgeKind;
    const store = this.store;
    switch (form.kind) {
      case "add":
        if (text.trim()) void store.addChild(form.nodeId, edge, text.trim());
        break;
      case "text":
        if (!text.trim()) break;
        if (cascade) void store.cascade(form.nodeId, text.trim());
        else void store.editText(form.nodeId, text.trim());
        break;
      case "draft":
        if (text.trim()) void store.replaceDraft(form.nodeId, text);
        break;
      case "refine":
        if (text.trim()) void store.refine(form.nodeId, text.trim());
        break;
      case "move":
        void store.move(form.nodeId, form.parentId!, edge);
        break;
      case "edge":
        void store.setEdge(form.nodeId, edge);
        break;
    }
  }

  // -- rendering ---------------------------------------------------------------

  render(): void {
    const saved = this.saveFormValues();
    const store = this.store;
    const shell = store.plan ? this.workspaceHtml(store.plan) : this.chooserHtml();
    this.root.innerHTML = `<div class="shell${store.busy ? " busy" : ""}">${shell}</div>`;
    this.restoreFormValues(saved);
  }

  /** Keep whatever the user typed across re-renders triggered by hover etc. */
  private saveFormValues(): Map<string, string> {
    const saved = new Map<string, string>();
    for (const el of this.root.querySelectorAll<HTMLInputElement>("input[id], textarea[id], select[id]")) {
      saved.set(el.id, el.value);
    }
    return saved;
  }

  private restoreFormValues(saved: Map<string, string>): void {
    for (const el of this.root.querySelectorAll<HTMLInputElement>("input[id], textarea[id], select[id]")) {
      const old = saved.get(el.id);
      if (old !== undefined) el.value = old;
    }
  }

  private errorFor(scope: string): string {
    const err = this.store.actionError;
    if (!err || err.scope !== scope) return "";
    return `<p class="action-error">${esc(err.message)}</p>`;
  }

  // -- chooser -------------------------------------------------------------------

  private chooserHtml(): string {
    const rows = this.store.plans
      .map(
        (plan) => `
      <li class="plan-row">
        <button data-action="open-plan" data-plan="${plan.id}" class="plan-open">
          ${esc(snippet(plan.argument, 80))}
        </button>
        <span class="plan-meta">${plan.nodes} node${plan.nodes === 1 ? "" : "s"}</span>
        <button data-action="delete-plan" data-plan="${plan.id}" class="ghost">delete</button>
      </li>`,
      )
      .join("");
    return `
      <div class="chooser">
        <h1>argument plans</h1>
        ${this.errorFor("chooser")}
        <ul class="plan-list">${rows || "<li class='empty'>no plans yet</li>"}</ul>
        <div class="new-plan">
          <textarea id="new-plan-text" placeholder="state the argument to defend"></textarea>
          <button data-action="create-plan">create plan</button>
        </div>
      </div>`;
  }

  // -- workspace --------------------------------------------------------------------

  private workspaceHtml(plan: Plan): string {
    return `
      <header class="toolbar">
        <button data-action="back" class="ghost">plans</button>
        <span class="plan-title">${esc(snippet(plan.root.prompt_text, 60))}</span>
        <label class="lazy-toggle">
          <input type="checkbox" data-action="lazy" ${plan.lazy_mode ? "checked" : ""}>
          lazy drafts
        </label>
        <button data-action="generate">generate</button>
        ${this.progressHtml()}
        ${this.errorFor("toolbar")}
        ${this.store.banner ? `<span class="banner">${esc(this.store.banner)}</span>` : ""}
      </header>
      <main class="workspace">
        <section class="blocks">${this.blocksHtml(plan)}</section>
        <section class="canvas">${this.canvasHtml(plan)}</section>
      </main>
      ${this.panelHtml()}
      ${this.wizardHtml(plan)}
      ${this.formHtml(plan)}`;
  }

  private progressHtml(): string {
    const ids = this.store.progress;
    if (!ids) return "";
    if (!ids.length) return `<span class="progress">nothing to draft</span>`;
    return `<span class="progress">drafted ${ids.map(esc).join(", ")}</span>`;
  }

  private blocksHtml(plan: Plan): string {
    return documentOrder(plan)
      .map(({ node, depth }) => this.blockHtml(plan, node, depth))
      .join("");
  }

  private blockHtml(plan: Plan, node: PlanNode, depth: number): string {
    const store = this.store;
    const isRoot = node.edge_from_parent === null;
    const classes = ["block"];
    if (node.id === store.selectedId) classes.push("selected");
    if (node.id === store.hoverId) classes.push("hovered");
    if (node.draft?.stale) classes.push("stale");
    const badges: string[] = [];
    if (node.draft?.stale) badges.push('<span class="badge stale-badge">stale</span>');
    else if (needsDraft(node)) badges.push('<span class="badge">no draft</span>');
    const edge = node.edge_from_parent
      ? `<span class="edge-tag">${EDGE_LABEL[node.edge_from_parent]}</span>`
      : "";
    const draft = isRoot
      ? "" // the thesis is a goal, never prose
      : node.draft
        ? `<p class="draft">${esc(node.draft.text)}</p>`
        : `<p class="draft missing">(not drafted)</p>`;
    const chat =
      node.id === store.selectedId && node.draft && node.draft.refine_chat.length
        ? `<details class="chat"><summary>refinement chat</summary>${node.draft.refine_chat
            .map((turn) => `<p class="turn ${turn.role}"><b>${turn.role}</b> ${esc(turn.content)}</p>`)
            .join("")}</details>`
        : "";
    const btn = (action: string, label: string, title = ""): string =>
      `<button data-action="${action}" data-node="${node.id}"` +
      `${title ? ` title="${title}"` : ""}${store.busy ? " disabled" : ""}>${label}</button>`;
    const controls = [
      btn("edit", "edit"),
      btn("add", "+", "add a child node"),
      btn("elaborate", "elaborate"),
      btn("spark-counter", "counter?"),
      btn("spark-evidence", "evidence?"),
      btn("spark-fallacies", "fallacies?"),
    ];
    if (!isRoot) {
      controls.push(btn("draft", "draft"));
      if (node.draft) {
        controls.push(btn("alternatives", "alternatives"));
        controls.push(btn("refine-form", "refine"));
        controls.push(btn("edit-draft", "edit draft"));
      }
      controls.push(btn("up", "↑", "move up among siblings"));
      controls.push(btn("down", "↓", "move down among siblings"));
      controls.push(btn("delete", "delete"));
    }
    return `
      <article class="${classes.join(" ")}" data-node="${node.id}" data-action="select"
               style="--node-color: ${colorFor(node.color_index)}; margin-left: ${depth * 18}px">
        <header class="block-head">
          <span class="kind">${KIND_LABEL[node.kind]}</span>
          ${edge}
          ${badges.join("")}
        </header>
        <p class="goal">${esc(node.prompt_text)}</p>
        ${draft}
        ${chat}
        <div class="controls">${controls.join("")}</div>
        ${this.errorFor(`node:${node.id}`)}
      </article>`;
  }

  private canvasHtml(plan: Plan): string {
    const layout = layoutTree(plan);
    const store = this.store;
    const edges = layout.edges
      .map(
        (edge) => `
      <g class="tree-edge">
        <line x1="${edge.x1}" y1="${edge.y1}" x2="${edge.x2}" y2="${edge.y2}"></line>
        <text x="${edge.lx}" y="${edge.ly}" data-edge-label data-action="edge-form"
              data-node="${edge.childId}" class="edge-label">${EDGE_LABEL[edge.label]}</text>
      </g>`,
      )
      .join("");
    const boxes = layout.boxes
      .map((box) => {
        const node = findNode(plan, box.id)!;
        const classes = ["tree-node"];
        if (box.id === store.selectedId) classes.push("selected");
        if (box.id === store.hoverId) classes.push("hovered");
        if (node.draft?.stale) classes.push("stale");
        if (box.id === store.dragFrom) classes.push("dragging");
        return `
      <g class="${classes.join(" ")}" data-canvas-node data-node="${box.id}" data-action="select">
        <rect x="${box.x - NODE_W / 2}" y="${box.y - NODE_H / 2}" width="${NODE_W}" height="${NODE_H}"
              rx="8" fill="${colorFor(node.color_index)}"></rect>
        <text x="${box.x}" y="${box.y + 4}" text-anchor="middle">${esc(snippet(node.prompt_text, 24))}</text>
      </g>`;
      })
      .join("");
    return `
      <svg width="${layout.width}" height="${layout.height}"
           viewBox="0 0 ${layout.width} ${layout.height}" class="tree-svg">
        ${edges}
        ${boxes}
      </svg>`;
  }

  // -- overlays ---------------------------------------------------------------------

  private panelHtml(): string {
    const panel = this.store.panel;
    if (!panel) return "";
    const pickable = panel.kind !== "fallacies";
    const items = panel.lines
      .map((line, i) => {
        const input = pickable
          ? `<input type="${panel.single ? "radio" : "checkbox"}" name="panel-pick"
               data-action="panel-toggle" data-index="${i}" ${panel.chosen[i] ? "checked" : ""}>`
          : "";
        return `<li class="panel-item">${input}<span>${esc(line)}</span></li>`;
      })
      .join("");
    const acceptLabel =
      panel.kind === "fallacies"
        ? "repair draft"
        : panel.kind === "alternatives"
          ? "use selected"
          : "accept selected";
    return `
      <aside class="panel">
        <h2>${PANEL_TITLE[panel.kind]}</h2>
        <ul>${items}</ul>
        <div class="panel-actions">
          <button data-action="panel-accept">${acceptLabel}</button>
          <button data-action="panel-close" class="ghost">close</button>
        </div>
        ${this.errorFor("panel")}
      </aside>`;
  }

  private wizardHtml(plan: Plan): string {
    const wizard = this.store.wizard;
    if (!wizard) return "";
    const step = wizard.steps[wizard.at];
    const node = findNode(plan, step.node_id);
    const pending = step.status === "pending";
    const topics = step.suggested_topics
      .map(
        (topic) =>
          `<button data-action="wizard-topic" data-topic="${esc(topic)}"` +
          `${pending ? "" : " disabled"}>${esc(topic)}</button>`,
      )
      .join("");
    return `
      <div class="wizard" role="dialog">
        <header>
          <button data-action="wizard-prev" ${wizard.at === 0 ? "disabled" : ""}>←</button>
          <span class="wizard-title">update dependents — step ${wizard.at + 1} of ${
            wizard.steps.length
          }</span>
          <button data-action="wizard-next" ${
            wizard.at === wizard.steps.length - 1 ? "disabled" : ""
          }>→</button>
        </header>
        <p class="wizard-goal">${esc(node ? node.prompt_text : step.node_id)}</p>
        <p class="wizard-status">status: ${step.status}</p>
        <div class="wizard-topics">${topics}</div>
        <div class="wizard-actions">
          <button data-action="wizard-keep" ${pending ? "" : "disabled"}>keep topic, redraft</button>
          <button data-action="wizard-skip" ${pending ? "" : "disabled"}>skip</button>
          <button data-action="wizard-close" class="ghost">close</button>
        </div>
        ${this.errorFor("wizard")}
      </div>`;
  }

  private formHtml(plan: Plan): string {
    const form = this.store.form;
    if (!form) return "";
    const node = findNode(plan, form.nodeId);
    const currentEdge = node?.edge_from_parent ?? null;
    let title: string;
    let body = "";
    let confirmLabel = "save";
    let extra = "";
    switch (form.kind) {
      case "add":
        title = "add a child node";
        body =
          `<select id="form-edge">${edgeOptions("featured_by")}</select>` +
          `<textarea id="form-text" placeholder="what should this node argue?"></textarea>`;
        confirmLabel = "add";
        break;
      case "text":
        title = "edit node text";
        body = `<textarea id="form-text">${esc(node?.prompt_text ?? "")}</textarea>`;
        extra = `<button data-action="form-cascade">save + update dependents</button>`;
        break;
      case "draft":
        title = "edit draft";
        body = `<textarea id="form-text">${esc(node?.draft?.text ?? "")}</textarea>`;
        break;
      case "refine":
        title = "refine draft";
        body = `<textarea id="form-text" placeholder="how should the draft change?"></textarea>`;
        confirmLabel = "refine";
        break;
      case "move":
        title = "re-parent node";
        body =
          `<p>moving under: ${esc(
            snippet(findNode(plan, form.parentId!)?.prompt_text ?? form.parentId!, 60),
          )}</p>` +
          // the picker defaults to the edge the node already has
          `<select id="form-edge">${edgeOptions(currentEdge)}</select>`;
        confirmLabel = "move";
        break;
      case "edge":
        title = "change edge kind";
        body = `<select id="form-edge">${edgeOptions(currentEdge)}</select>`;
        break;
    }
    return `
      <div class="form-dialog" role="dialog">
        <h2>${title}</h2>
        ${body}
        <div class="form-actions">
          <button data-action="form-confirm">${confirmLabel}</button>
          ${extra}
          <button data-action="form-cancel" class="ghost">cancel</button>
        </div>
        ${this.errorFor(`dialog:${form.nodeId}`)}
      </div>`;
  }
}
