/** Wire types for the affinedimers HTTP API, plus the canonical
 * arrangement serializer shared by export, import and the undo stack.
 */

import { mod1, parseRat, Rat, ratToString } from "./rational.js";

export type IntPair = [number, number];
export type PointJson = [string, string];

export interface LineJson {
  h: IntPair;
  c: string;
}

export interface ArrangementDoc {
  lines: LineJson[];
  provenance?: unknown;
  verification?: unknown;
}

export interface SurfaceJson {
  genus: number;
  punctures: number;
}

export interface CountsJson {
  n: number;
  v: number;
  e: number;
  f: number;
  f_cw: number;
  f_ccw: number;
  f_x: number;
  e_cw: number;
  e_ccw: number;
  genus: number;
  surface: SurfaceJson;
}

export interface ReportJson {
  k: number;
  admissible: boolean;
  matches_prescribed: boolean;
  parallelogram: boolean;
  prescribed_classes: IntPair[];
  induced_classes: IntPair[] | null;
  counts: CountsJson | null;
  face_labels: string[];
  notes: string[];
}

export interface FaceGeometry {
  face: number;
  label: string;
  rings: PointJson[][];
}

export interface LineGeometry {
  line: number;
  h: IntPair;
  segments: [PointJson, PointJson][];
}

export interface VertexGeometry {
  vertex: number;
  at: PointJson;
}

export interface DimerNode {
  face: number;
  side: string;
  at: PointJson;
}

export interface DimerEdge {
  vertex: number;
  at: PointJson;
  faces: [number, number];
}

export interface DimerGeometry {
  nodes: DimerNode[];
  edges: DimerEdge[];
}

export interface SceneGeometry {
  faces: FaceGeometry[];
  lines: LineGeometry[];
  vertices: VertexGeometry[];
  dimer: DimerGeometry | null;
}

export interface PolygonJson {
  vertices: IntPair[];
}

export interface EvaluateResponse {
  report: ReportJson;
  geometry: SceneGeometry;
  polygon: PolygonJson;
  induced_polygon: PolygonJson | null;
  timing_ms: number;
}

export interface SearchResponse {
  status: "found" | "trials_exhausted" | "exhausted_at_resolution";
  inconclusive: boolean;
  trials: number;
  degenerate_skips: number;
  resolution: number | null;
  note: string;
  certificate: ArrangementDoc | null;
  timing_ms?: number;
}

export interface MetricsResponse {
  vertices: IntPair[];
  canonical_vertices: IntPair[];
  classes: IntPair[];
  area2: number;
  boundary: number;
  interior: number;
  genus: number;
  surface: SurfaceJson;
}

/** Error payload under FastAPI's "detail" wrapper. */
export interface ApiErrorDetail {
  error: string;
  message?: string;
  [key: string]: unknown;
}

/** An editor line: exact offset, integer class. */
export interface EditorLine {
  h: IntPair;
  c: Rat;
}

export function linesFromDoc(doc: ArrangementDoc): EditorLine[] {
  if (!doc || !Array.isArray(doc.lines)) {
    throw new Error("arrangement JSON needs a \"lines\" array");
  }
  return doc.lines.map((line, i) => {
    if (!Array.isArray(line.h) || line.h.length !== 2) {
      throw new Error(`line ${i}: "h" must be a pair of integers`);
    }
    const [a, b] = line.h;
    if (!Number.isInteger(a) || !Number.isInteger(b)) {
      throw new Error(`line ${i}: "h" must be a pair of integers`);
    }
    return { h: [a, b] as IntPair, c: mod1(parseRat(String(line.c))) };
  });
}

/** Canonical serialization: the exact bytes exported, diffed and stored
 * on the undo stack. Two states with equal lines serialize equally.
 */
export function serializeArrangement(lines: readonly EditorLine[]): string {
  const doc = {
    lines: lines.map((l) => ({ h: [l.h[0], l.h[1]], c: ratToString(mod1(l.c)) })),
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

export function gcdInt(a: number, b: number): number {
  a = Math.abs(a);
  b = Math.abs(b);
  while (b) [a, b] = [b, a % b];
  return a;
}

export function isPrimitive(h: IntPair): boolean {
  return gcdInt(h[0], h[1]) === 1;
}

export function classSum(lines: readonly EditorLine[]): IntPair {
  let x = 0;
  let y = 0;
  for (const l of lines) {
    x += l.h[0];
    y += l.h[1];
  }
  return [x, y];
}
