/** DOM wiring: canvas interaction, panels, and the debounced evaluate
 * loop. All state transitions go through the reducer; this module only
 * translates events into actions and repaints after each dispatch.
 */

import { ApiClient } from "./api.js";
import { ArrangementDoc, IntPair, serializeArrangement } from "./model.js";
import { rat, Rat, ratToString } from "./rational.js";
import { buildScene, paintScene, Pt, Scene } from "./scene.js";
import {
  Action,
  currentDoc,
  EditorState,
  initialState,
  reduce,
} from "./state.js";

const EVALUATE_DEBOUNCE_MS = 60;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function parsePairList(text: string): IntPair[] {
  // "1,0;0,1;-1,-1"
  const pairs: IntPair[] = [];
  for (const chunk of text.split(";")) {
    const trimmed = chunk.trim();
    if (!trimmed) continue;
    const parts = trimmed.split(",").map((s) => Number(s.trim()));
    if (parts.length !== 2 || !parts.every(Number.isInteger)) {
      throw new Error(`bad pair "${trimmed}" (want "x,y;x,y;...")`);
    }
    pairs.push([parts[0] as number, parts[1] as number]);
  }
  if (pairs.length === 0) throw new Error("no pairs given");
  return pairs;
}

export class EditorController {
  state: EditorState = initialState();

  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly verdictEl: HTMLElement;
  private readonly bannerEl: HTMLElement;
  private readonly noticeEl: HTMLElement;
  private readonly countsEl: HTMLElement;
  private readonly linesEl: HTMLElement;
  private readonly inspectorEl: HTMLElement;
  private readonly searchStatusEl: HTMLElement;
  private readonly constructStatusEl: HTMLElement;

  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private dragLine: number | null = null;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    root.innerHTML = "";
    const layout = el("div", { class: "layout" });
    root.appendChild(layout);

    // --- left: canvas and verdict
    const left = el("div", { class: "stage" });
    this.bannerEl = el("div", { class: "banner" });
    this.verdictEl = el("div", { class: "verdict" });
    this.noticeEl = el("div", { class: "notice" });
    this.canvas = el("canvas", { width: "560", height: "560" });
    this.ctx = this.canvas.getContext("2d") as CanvasRenderingContext2D;
    left.append(this.bannerEl, this.verdictEl, this.canvas, this.noticeEl);
    layout.appendChild(left);

    // --- right: panels
    const right = el("div", { class: "panels" });
    layout.appendChild(right);
    this.countsEl = el("div", { class: "panel" });
    this.linesEl = el("div", { class: "panel" });
    right.append(this.countsEl, this.linesEl);
    right.appendChild(this.buildEditPanel());
    this.inspectorEl = el("div", { class: "panel" });
    right.appendChild(this.inspectorEl);
    const searchPanel = this.buildSearchPanel();
    this.searchStatusEl = searchPanel.querySelector(".status") as HTMLElement;
    right.appendChild(searchPanel);
    const constructPanel = this.buildConstructPanel();
    this.constructStatusEl = constructPanel.querySelector(".status") as HTMLElement;
    right.appendChild(constructPanel);

    this.bindCanvas();
    this.bindKeys();
    this.repaint();
  }

  dispatch(action: Action): void {
    const before = this.state;
    this.state = reduce(this.state, action);
    if (this.state.revision !== before.revision) this.scheduleEvaluate();
    this.repaint();
  }

  loadDoc(doc: ArrangementDoc): void {
    try {
      this.dispatch({ type: "load", doc });
    } catch (err) {
      this.state = { ...this.state, notice: String(err) };
      this.repaint();
    }
  }

  // ----- evaluate loop

  private scheduleEvaluate(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.runEvaluate();
    }, EVALUATE_DEBOUNCE_MS);
  }

  private async runEvaluate(): Promise<void> {
    if (this.state.lines.length === 0) {
      this.state = { ...this.state, response: null, verdict: "empty", pending: false };
      this.repaint();
      return;
    }
    const seq = this.state.seq + 1;
    this.dispatch({ type: "evaluate-requested", seq });
    const result = await this.api.evaluate(currentDoc(this.state));
    if (result.ok) {
      this.dispatch({ type: "evaluate-arrived", seq, response: result.value });
    } else {
      this.dispatch({
        type: "evaluate-error",
        seq,
        status: result.status,
        detail: result.detail,
      });
    }
    void this.refreshInspector();
  }

  // ----- canvas interaction

  private viewport(): { pad: number; side: number } {
    const w = this.canvas.width;
    const h = this.canvas.height;
    const pad = this.state.tiling ? Math.min(w, h) / 3.4 : 24;
    return { pad, side: Math.min(w, h) - 2 * pad };
  }

  private toUnit(ev: PointerEvent): Pt {
    const rect = this.canvas.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * this.canvas.width;
    const py = ((ev.clientY - rect.top) / rect.height) * this.canvas.height;
    const { pad, side } = this.viewport();
    return [(px - pad) / side, (this.canvas.height - pad - py) / side];
  }

  private hitLine(p: Pt): number | null {
    const scene = buildScene(this.state);
    let best: { line: number; dist: number } | null = null;
    for (const stroke of scene.strokes) {
      const d = pointSegmentDistance(p, stroke.a, stroke.b);
      if (best === null || d < best.dist) best = { line: stroke.line, dist: d };
    }
    return best !== null && best.dist < 0.03 ? best.line : null;
  }

  private bindCanvas(): void {
    this.canvas.addEventListener("pointerdown", (ev) => {
      const hit = this.hitLine(this.toUnit(ev));
      this.dispatch({ type: "select", index: hit });
      if (hit !== null) {
        this.dragLine = hit;
        this.dispatch({ type: "begin-edit" });
        this.canvas.setPointerCapture(ev.pointerId);
      }
    });
    this.canvas.addEventListener("pointermove", (ev) => {
      if (this.dragLine === null) return;
      const line = this.state.lines[this.dragLine];
      if (line === undefined) return;
      const [x, y] = this.toUnit(ev);
      // the line through the pointer: c = h2*x - h1*y, taken on a fine
      // provisional grid; the reducer snaps to the configured one
      const fine = 1 << 20;
      const target: Rat = rat(
        Math.round((line.h[1] * x - line.h[0] * y) * fine),
        fine,
      );
      this.dispatch({ type: "drag-offset", index: this.dragLine, target });
    });
    const endDrag = (ev: PointerEvent) => {
      if (this.dragLine !== null) {
        this.dragLine = null;
        this.canvas.releasePointerCapture(ev.pointerId);
      }
    };
    this.canvas.addEventListener("pointerup", endDrag);
    this.canvas.addEventListener("pointercancel", endDrag);
  }

  private bindKeys(): void {
    document.addEventListener("keydown", (ev) => {
      if ((ev.ctrlKey || ev.metaKey) && ev.key.toLowerCase() === "z") {
        ev.preventDefault();
        this.dispatch({ type: ev.shiftKey ? "redo" : "undo" });
      }
    });
  }

  // ----- panels

  private buildEditPanel(): HTMLElement {
    const panel = el("div", { class: "panel" });
    panel.appendChild(el("h3", {}, "edit"));

    const addRow = el("div", { class: "row" });
    const hInput = el("input", { placeholder: "class a,b", size: "8" });
    const cInput = el("input", { placeholder: "offset p/q", size: "8", value: "0" });
    const addBtn = el("button", {}, "add line");
    addBtn.addEventListener("click", () => {
      try {
        const pairs = parsePairList(hInput.value);
        const first = pairs[0];
        if (first === undefined || pairs.length !== 1) throw new Error("one class only");
        this.dispatch({ type: "add-line", h: first, c: cInput.value || "0" });
      } catch (err) {
        this.flash(String(err));
      }
    });
    addRow.append(hInput, cInput, addBtn);
    panel.appendChild(addRow);

    const histRow = el("div", { class: "row" });
    const undoBtn = el("button", {}, "undo");
    undoBtn.addEventListener("click", () => this.dispatch({ type: "undo" }));
    const redoBtn = el("button", {}, "redo");
    redoBtn.addEventListener("click", () => this.dispatch({ type: "redo" }));
    histRow.append(undoBtn, redoBtn);
    panel.appendChild(histRow);

    const tileRow = el("div", { class: "row" });
    const tileBox = el("input", { type: "checkbox", id: "tiling" });
    tileBox.addEventListener("change", () =>
      this.dispatch({ type: "set-tiling", on: tileBox.checked }),
    );
    const tileLabel = el("label", { for: "tiling" }, "3x3 tiling");
    const snapInput = el("input", { size: "6", value: "1024", title: "snap denominator" });
    snapInput.addEventListener("change", () => {
      const d = Number(snapInput.value);
      this.dispatch({ type: "set-snap", denominator: d });
    });
    tileRow.append(tileBox, tileLabel, el("span", {}, " snap 1/"), snapInput);
    panel.appendChild(tileRow);

    const ioRow = el("div", { class: "row" });
    const importInput = el("input", { type: "file", accept: ".json" });
    importInput.addEventListener("change", () => {
      const file = importInput.files?.[0];
      if (!file) return;
      void file.text().then((text) => {
        try {
          this.loadDoc(JSON.parse(text) as ArrangementDoc);
        } catch (err) {
          this.flash(`import failed: ${String(err)}`);
        }
      });
    });
    const exportBtn = el("button", {}, "export JSON");
    exportBtn.addEventListener("click", () => this.exportArrangement());
    ioRow.append(importInput, exportBtn);
    panel.appendChild(ioRow);
    return panel;
  }

  private exportArrangement(): void {
    const text = serializeArrangement(this.state.lines);
    const blob = new Blob([text], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = el("a", { href: url, download: "arrangement.json" });
    document.body.appendChild(a);
    a.click();
    a.remove();
    URL.revokeObjectURL(url);
  }

  private buildSearchPanel(): HTMLElement {
    const panel = el("div", { class: "panel" });
    panel.appendChild(el("h3", {}, "search"));
    const classesInput = el("input", { placeholder: "classes x,y;x,y", size: "22" });
    const trialsInput = el("input", { value: "2000", size: "6", title: "trials" });
    const seedInput = el("input", { value: "0", size: "4", title: "seed" });
    const meshInput = el("input", { value: "0", size: "4", title: "mesh" });
    const runBtn = el("button", {}, "search");
    const status = el("div", { class: "status" });
    runBtn.addEventListener("click", () => {
      void (async () => {
        let polygon: { classes: IntPair[] };
        try {
          polygon = { classes: parsePairList(classesInput.value) };
        } catch (err) {
          status.textContent = String(err);
          return;
        }
        status.textContent = "searching...";
        const result = await this.api.search({
          polygon,
          trials: Number(trialsInput.value),
          seed: Number(seedInput.value),
          mesh: Number(meshInput.value),
        });
        if (!result.ok) {
          status.textContent = `${result.detail.error}: ${result.detail.message ?? ""}`;
          return;
        }
        const out = result.value;
        status.textContent = `${out.status} after ${out.trials} trials. ${out.note}`;
        if (out.certificate !== null) this.loadDoc(out.certificate);
      })();
    });
    panel.append(
      classesInput,
      el("div", { class: "row" }),
      trialsInput,
      seedInput,
      meshInput,
      runBtn,
      status,
    );
    return panel;
  }

  private buildConstructPanel(): HTMLElement {
    const panel = el("div", { class: "panel" });
    panel.appendChild(el("h3", {}, "construct"));
    const kindSel = el("select");
    for (const kind of ["triangle", "double", "add-pair", "lift", "linear"]) {
      kindSel.appendChild(el("option", { value: kind }, kind));
    }
    const paramInput = el("input", {
      placeholder: "params",
      size: "22",
      title:
        "triangle: u;w   double: classes   add-pair: line index   lift/linear: a,b;c,d (columns)",
    });
    const runBtn = el("button", {}, "build");
    const status = el("div", { class: "status" });
    runBtn.addEventListener("click", () => {
      void (async () => {
        let params: Record<string, unknown>;
        const kind = kindSel.value as "triangle" | "double" | "add-pair" | "lift" | "linear";
        try {
          params = this.constructParams(kind, paramInput.value);
        } catch (err) {
          status.textContent = String(err);
          return;
        }
        status.textContent = "building...";
        const result = await this.api.construct(kind, params);
        if (!result.ok) {
          status.textContent = `${result.detail.error}: ${result.detail.message ?? ""}`;
          return;
        }
        status.textContent = "loaded";
        this.loadDoc(result.value.arrangement);
      })();
    });
    panel.append(kindSel, paramInput, runBtn, status);
    return panel;
  }

  private constructParams(kind: string, text: string): Record<string, unknown> {
    switch (kind) {
      case "triangle": {
        const pairs = parsePairList(text);
        if (pairs.length !== 2) throw new Error("triangle wants u;w");
        return { u: pairs[0], w: pairs[1] };
      }
      case "double":
        return { classes: parsePairList(text), seed: 0 };
      case "add-pair": {
        const index = Number(text.trim());
        if (!Number.isInteger(index)) throw new Error("add-pair wants a line index");
        return { arrangement: currentDoc(this.state), line: index };
      }
      case "lift":
      case "linear": {
        const pairs = parsePairList(text);
        if (pairs.length !== 2) throw new Error(`${kind} wants a,b;c,d (matrix columns)`);
        const [col1, col2] = pairs as [IntPair, IntPair];
        const matrix = [col1[0], col1[1], col2[0], col2[1]];
        return kind === "lift"
          ? { arrangement: currentDoc(this.state), lattice: matrix }
          : { arrangement: currentDoc(this.state), matrix };
      }
      default:
        throw new Error(`unknown construction ${kind}`);
    }
  }

  private async refreshInspector(): Promise<void> {
    const report = this.state.response?.report;
    this.inspectorEl.innerHTML = "";
    this.inspectorEl.appendChild(el("h3", {}, "polygon"));
    if (!report || report.induced_classes === null) {
      this.inspectorEl.appendChild(el("div", {}, "no induced polygon"));
      return;
    }
    const classes = report.induced_classes.map((h) => h.join(",")).join(";");
    const result = await this.api.metrics(`classes=${encodeURIComponent(classes)}`);
    if (!result.ok) {
      this.inspectorEl.appendChild(el("div", {}, `metrics: ${result.detail.error}`));
      return;
    }
    const m = result.value;
    const rows = [
      `classes: ${classes}`,
      `area2 ${m.area2}, boundary ${m.boundary}, interior ${m.interior}`,
      `genus ${m.genus}; surface genus ${m.surface.genus} with ${m.surface.punctures} punctures`,
      `canonical vertices: ${m.canonical_vertices.map((v) => `(${v[0]},${v[1]})`).join(" ")}`,
    ];
    for (const row of rows) this.inspectorEl.appendChild(el("div", {}, row));
  }

  private flash(message: string): void {
    this.state = { ...this.state, notice: message };
    this.repaint();
  }

  // ----- painting

  private repaint(): void {
    const scene: Scene = buildScene(this.state);
    paintScene(scene, this.ctx, this.canvas.width, this.canvas.height);
    this.bannerEl.textContent = scene.banner ?? "";
    this.bannerEl.style.display = scene.banner === null ? "none" : "block";
    this.verdictEl.textContent = this.verdictText();
    this.verdictEl.dataset["verdict"] = this.state.verdict;
    this.noticeEl.textContent = this.state.notice ?? "";
    this.renderCounts();
    this.renderLineList();
  }

  private verdictText(): string {
    switch (this.state.verdict) {
      case "empty":
        return "empty arrangement";
      case "checking":
        return "checking...";
      case "admissible":
        return "admissible";
      case "pseudo":
        return "admissible, but for a different polygon";
      case "not-admissible":
        return "not admissible";
      case "degenerate":
        return "degenerate arrangement";
      case "error":
        return "service error";
    }
  }

  private renderCounts(): void {
    this.countsEl.innerHTML = "";
    this.countsEl.appendChild(el("h3", {}, "report"));
    const report = this.state.response?.report;
    if (!report) {
      this.countsEl.appendChild(el("div", {}, "nothing evaluated yet"));
      return;
    }
    const c = report.counts;
    const rows = [
      `k = ${report.k}`,
      c
        ? `v ${c.v}, e ${c.e}, f ${c.f} (${c.f_cw} cw, ${c.f_ccw} ccw, ${c.f_x} inconsistent)`
        : "no counts (not admissible)",
      c ? `genus ${c.genus}, punctures ${c.surface.punctures}` : "",
      ...report.notes,
    ].filter((r) => r !== "");
    for (const row of rows) this.countsEl.appendChild(el("div", {}, row));
  }

  private renderLineList(): void {
    this.linesEl.innerHTML = "";
    this.linesEl.appendChild(el("h3", {}, "lines"));
    this.state.lines.forEach((line, i) => {
      const row = el("div", { class: "row line-row" });
      if (this.state.selection === i) row.classList.add("selected");
      row.appendChild(
        el("span", {}, `${i}: h=(${line.h[0]},${line.h[1]}) c=${ratToString(line.c)} `),
      );
      const pick = el("button", {}, "select");
      pick.addEventListener("click", () => this.dispatch({ type: "select", index: i }));
      const flip = el("button", {}, "flip");
      flip.addEventListener("click", () => this.dispatch({ type: "flip-line", index: i }));
      const del = el("button", {}, "remove");
      del.addEventListener("click", () => this.dispatch({ type: "remove-line", index: i }));
      row.append(pick, flip, del);
      this.linesEl.appendChild(row);
    });
  }
}

function pointSegmentDistance(p: Pt, a: Pt, b: Pt): number {
  const vx = b[0] - a[0];
  const vy = b[1] - a[1];
  const wx = p[0] - a[0];
  const wy = p[1] - a[1];
  const c1 = vx * wx + vy * wy;
  if (c1 <= 0) return Math.hypot(wx, wy);
  const c2 = vx * vx + vy * vy;
  if (c2 <= c1) return Math.hypot(p[0] - b[0], p[1] - b[1]);
  const t = c1 / c2;
  return Math.hypot(p[0] - (a[0] + t * vx), p[1] - (a[1] + t * vy));
}
