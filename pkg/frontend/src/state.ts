/** Editor state and its pure reducer.
 *
 * All editing logic lives here so it can be tested without a browser.
 * The reducer never talks to the network; the controller watches the
 * `revision` counter and schedules a debounced evaluate call whenever
 * the arrangement changed. Responses carry the sequence number of their
 * request, and anything older than the newest issued request is thrown
 * away, so the displayed verdict always belongs to the displayed lines
 * (or the verdict shows "checking" while a request is in flight).
 *
 * The undo stack stores canonical serialized arrangements, which makes
 * "undo restores byte-identical JSON" true by construction.
 */

import {
  ApiErrorDetail,
  ArrangementDoc,
  EditorLine,
  EvaluateResponse,
  IntPair,
  isPrimitive,
  linesFromDoc,
  serializeArrangement,
} from "./model.js";
import { mod1, neg, parseRat, Rat, snap } from "./rational.js";

export const DEFAULT_SNAP = 1024;

export type Verdict =
  | "empty"
  | "checking"
  | "admissible"
  | "pseudo" // admissible but for a different polygon
  | "not-admissible"
  | "degenerate"
  | "error";

export interface EditorState {
  lines: EditorLine[];
  selection: number | null;
  /** bumped on every change to `lines`; the controller watches it */
  revision: number;
  /** newest evaluate request issued */
  seq: number;
  /** sequence number of the response currently displayed */
  appliedSeq: number;
  pending: boolean;
  response: EvaluateResponse | null;
  verdict: Verdict;
  notice: string | null;
  undoStack: string[];
  redoStack: string[];
  snapDenominator: number;
  tiling: boolean;
}

export function initialState(): EditorState {
  return {
    lines: [],
    selection: null,
    revision: 0,
    seq: 0,
    appliedSeq: 0,
    pending: false,
    response: null,
    verdict: "empty",
    notice: null,
    undoStack: [],
    redoStack: [],
    snapDenominator: DEFAULT_SNAP,
    tiling: false,
  };
}

export type Action =
  | { type: "load"; doc: ArrangementDoc }
  | { type: "add-line"; h: IntPair; c?: string }
  | { type: "remove-line"; index: number }
  | { type: "flip-line"; index: number }
  | { type: "select"; index: number | null }
  | { type: "begin-edit" }
  | { type: "drag-offset"; index: number; target: Rat }
  | { type: "undo" }
  | { type: "redo" }
  | { type: "evaluate-requested"; seq: number }
  | { type: "evaluate-arrived"; seq: number; response: EvaluateResponse }
  | { type: "evaluate-error"; seq: number; status: number; detail: ApiErrorDetail }
  | { type: "set-tiling"; on: boolean }
  | { type: "set-snap"; denominator: number }
  | { type: "clear-notice" };

function verdictOf(response: EvaluateResponse): Verdict {
  const r = response.report;
  if (!r.admissible) return "not-admissible";
  return r.matches_prescribed ? "admissible" : "pseudo";
}

function withLines(state: EditorState, lines: EditorLine[]): EditorState {
  return {
    ...state,
    lines,
    revision: state.revision + 1,
    verdict: lines.length === 0 ? "empty" : state.verdict,
  };
}

/** Snapshot the current arrangement for undo and invalidate redo. */
function pushUndo(state: EditorState): EditorState {
  return {
    ...state,
    undoStack: [...state.undoStack, serializeArrangement(state.lines)],
    redoStack: [],
  };
}

export function reduce(state: EditorState, action: Action): EditorState {
  switch (action.type) {
    case "load": {
      const lines = linesFromDoc(action.doc);
      return withLines(pushUndo(state), lines);
    }

    case "add-line": {
      if (!isPrimitive(action.h)) {
        return { ...state, notice: `class (${action.h[0]}, ${action.h[1]}) is not primitive` };
      }
      const c = mod1(parseRat(action.c ?? "0"));
      const lines = [...state.lines, { h: action.h, c }];
      return withLines(pushUndo(state), lines);
    }

    case "remove-line": {
      if (action.index < 0 || action.index >= state.lines.length) return state;
      const lines = state.lines.filter((_, i) => i !== action.index);
      const next = withLines(pushUndo(state), lines);
      return { ...next, selection: null };
    }

    case "flip-line": {
      const line = state.lines[action.index];
      if (line === undefined) return state;
      const flipped: EditorLine = {
        // 0 - x rather than -x: keeps zero components as +0
        h: [0 - line.h[0], 0 - line.h[1]],
        c: mod1(neg(line.c)),
      };
      const lines = state.lines.map((l, i) => (i === action.index ? flipped : l));
      return withLines(pushUndo(state), lines);
    }

    case "select":
      return { ...state, selection: action.index };

    case "begin-edit":
      // called once at drag start so the whole drag is one undo step
      return pushUndo(state);

    case "drag-offset": {
      const line = state.lines[action.index];
      if (line === undefined) return state;
      const c = snap(action.target, state.snapDenominator);
      if (c.n === line.c.n && c.d === line.c.d) return state;
      const lines = state.lines.map((l, i) =>
        i === action.index ? { h: l.h, c } : l,
      );
      return withLines(state, lines);
    }

    case "undo": {
      const snapshot = state.undoStack[state.undoStack.length - 1];
      if (snapshot === undefined) return state;
      const lines = linesFromDoc(JSON.parse(snapshot) as ArrangementDoc);
      return {
        ...withLines(state, lines),
        undoStack: state.undoStack.slice(0, -1),
        redoStack: [...state.redoStack, serializeArrangement(state.lines)],
        selection: null,
      };
    }

    case "redo": {
      const snapshot = state.redoStack[state.redoStack.length - 1];
      if (snapshot === undefined) return state;
      const lines = linesFromDoc(JSON.parse(snapshot) as ArrangementDoc);
      return {
        ...withLines(state, lines),
        redoStack: state.redoStack.slice(0, -1),
        undoStack: [...state.undoStack, serializeArrangement(state.lines)],
        selection: null,
      };
    }

    case "evaluate-requested":
      return {
        ...state,
        seq: Math.max(state.seq, action.seq),
        pending: true,
        verdict: state.lines.length === 0 ? "empty" : "checking",
      };

    case "evaluate-arrived": {
      if (action.seq < state.seq) return state; // stale
      return {
        ...state,
        appliedSeq: action.seq,
        pending: false,
        response: action.response,
        verdict: verdictOf(action.response),
        notice: null,
      };
    }

    case "evaluate-error": {
      if (action.seq < state.seq) return state; // stale
      const detail = action.detail;
      const degenerate = detail.error === "degenerate";
      return {
        ...state,
        appliedSeq: action.seq,
        pending: false,
        // a degenerate point is a verdict about the displayed lines;
        // other failures keep whatever was on screen and just complain
        verdict: degenerate ? "degenerate" : "error",
        response: degenerate ? null : state.response,
        notice: detail.message ?? `request failed (${action.status}): ${detail.error}`,
      };
    }

    case "set-tiling":
      return { ...state, tiling: action.on };

    case "set-snap": {
      if (!Number.isInteger(action.denominator) || action.denominator < 1) return state;
      return { ...state, snapDenominator: action.denominator };
    }

    case "clear-notice":
      return { ...state, notice: null };
  }
}

/** The document to POST to /api/evaluate for the current lines. */
export function currentDoc(state: EditorState): ArrangementDoc {
  return JSON.parse(serializeArrangement(state.lines)) as ArrangementDoc;
}
