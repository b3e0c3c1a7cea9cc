/** Scene construction: EditorState -> plain drawing primitives.
 *
 * Everything here is pure data in unit-square coordinates (y up); the
 * canvas painter applies the viewport transform. Keeping the scene as
 * data lets tests assert on face counts, colors, arrows and banner
 * without a canvas. Rational coordinates become floats here and only
 * here, as late as possible.
 */

import { LineGeometry } from "./model.js";
import { pointToNumbers } from "./rational.js";
import { EditorState } from "./state.js";

export type Pt = [number, number];

export interface FaceFill {
  face: number;
  label: string;
  color: string;
  rings: Pt[][];
}

export interface Stroke {
  line: number;
  a: Pt;
  b: Pt;
  selected: boolean;
}

export interface Arrow {
  line: number;
  at: Pt;
  /** unit direction of the oriented class */
  dir: Pt;
}

export interface NodeDot {
  face: number;
  side: string;
  at: Pt;
}

export interface EdgeStroke {
  a: Pt;
  b: Pt;
}

export interface Scene {
  /** offsets of the fundamental-square copies to draw, in square units */
  tiles: Pt[];
  faces: FaceFill[];
  strokes: Stroke[];
  arrows: Arrow[];
  crossings: Pt[];
  dimerNodes: NodeDot[];
  dimerEdges: EdgeStroke[];
  banner: string | null;
  stale: boolean;
}

export const FACE_COLORS: Record<string, string> = {
  clockwise: "#7db8e8",
  counterclockwise: "#f2b35c",
  inconsistent: "#d4d4d4",
};

function lineStrokes(geom: LineGeometry, selected: boolean): Stroke[] {
  return geom.segments.map(([a, b]) => ({
    line: geom.line,
    a: pointToNumbers(a),
    b: pointToNumbers(b),
    selected,
  }));
}

function arrowFor(geom: LineGeometry): Arrow | null {
  // put the arrowhead on the midpoint of the longest visible piece
  let best: { at: Pt; len: number } | null = null;
  for (const [a, b] of geom.segments) {
    const pa = pointToNumbers(a);
    const pb = pointToNumbers(b);
    const len = Math.hypot(pb[0] - pa[0], pb[1] - pa[1]);
    if (best === null || len > best.len) {
      best = { at: [(pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2], len };
    }
  }
  if (best === null) return null;
  const norm = Math.hypot(geom.h[0], geom.h[1]);
  return {
    line: geom.line,
    at: best.at,
    dir: [geom.h[0] / norm, geom.h[1] / norm],
  };
}

/** Tiles to draw: just the fundamental square, or a 3x3 block around it. */
function tilesFor(tiling: boolean): Pt[] {
  if (!tiling) return [[0, 0]];
  const out: Pt[] = [];
  for (let dx = -1; dx <= 1; dx++) {
    for (let dy = -1; dy <= 1; dy++) out.push([dx, dy]);
  }
  return out;
}

export function buildScene(state: EditorState): Scene {
  const response = state.response;
  const scene: Scene = {
    tiles: tilesFor(state.tiling),
    faces: [],
    strokes: [],
    arrows: [],
    crossings: [],
    dimerNodes: [],
    dimerEdges: [],
    banner: null,
    stale: state.pending || state.verdict === "degenerate",
  };
  if (response === null) return scene; // blank square

  const geometry = response.geometry;
  for (const face of geometry.faces) {
    scene.faces.push({
      face: face.face,
      label: face.label,
      color: FACE_COLORS[face.label] ?? "#ffffff",
      rings: face.rings.map((ring) => ring.map(pointToNumbers)),
    });
  }
  for (const lineGeom of geometry.lines) {
    scene.strokes.push(...lineStrokes(lineGeom, state.selection === lineGeom.line));
    const arrow = arrowFor(lineGeom);
    if (arrow !== null) scene.arrows.push(arrow);
  }
  for (const vertex of geometry.vertices) {
    scene.crossings.push(pointToNumbers(vertex.at));
  }
  if (geometry.dimer !== null) {
    for (const node of geometry.dimer.nodes) {
      scene.dimerNodes.push({ face: node.face, side: node.side, at: pointToNumbers(node.at) });
    }
    for (const edge of geometry.dimer.edges) {
      const at = pointToNumbers(edge.at);
      for (const fid of edge.faces) {
        const node = geometry.dimer.nodes.find((n) => n.face === fid);
        if (node !== undefined) {
          scene.dimerEdges.push({ a: at, b: pointToNumbers(node.at) });
        }
      }
    }
  }
  if (response.report.k === 2 && response.report.parallelogram) {
    scene.banner = "parallelogram case";
  }
  return scene;
}

/** Paint a scene onto a canvas context. Viewport: the fundamental
 * square maps to [pad, pad+side]^2 with y flipped.
 */
export function paintScene(
  scene: Scene,
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
): void {
  const pad = scene.tiles.length > 1 ? Math.min(width, height) / 3.4 : 24;
  const side = Math.min(width, height) - 2 * pad;
  const toCanvas = (p: Pt, tile: Pt): Pt => [
    pad + (p[0] + tile[0]) * side,
    height - pad - (p[1] + tile[1]) * side,
  ];

  ctx.clearRect(0, 0, width, height);
  for (const tile of scene.tiles) {
    const central = tile[0] === 0 && tile[1] === 0;
    ctx.globalAlpha = central ? 1.0 : 0.45;

    for (const face of scene.faces) {
      ctx.fillStyle = face.color;
      for (const ring of face.rings) {
        ctx.beginPath();
        ring.forEach((p, i) => {
          const [x, y] = toCanvas(p, tile);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        });
        ctx.closePath();
        ctx.fill();
      }
    }

    for (const stroke of scene.strokes) {
      ctx.strokeStyle = stroke.selected ? "#c0392b" : "#333333";
      ctx.lineWidth = stroke.selected ? 2.5 : 1.25;
      ctx.beginPath();
      ctx.moveTo(...toCanvas(stroke.a, tile));
      ctx.lineTo(...toCanvas(stroke.b, tile));
      ctx.stroke();
    }

    for (const arrow of scene.arrows) {
      const [x, y] = toCanvas(arrow.at, tile);
      const dx = arrow.dir[0];
      const dy = -arrow.dir[1]; // canvas y points down
      const s = 7;
      ctx.fillStyle = "#333333";
      ctx.beginPath();
      ctx.moveTo(x + dx * s, y + dy * s);
      ctx.lineTo(x - dy * s * 0.6 - dx * s * 0.4, y + dx * s * 0.6 - dy * s * 0.4);
      ctx.lineTo(x + dy * s * 0.6 - dx * s * 0.4, y - dx * s * 0.6 - dy * s * 0.4);
      ctx.closePath();
      ctx.fill();
    }

    for (const edge of scene.dimerEdges) {
      ctx.strokeStyle = "#1a7a36";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(...toCanvas(edge.a, tile));
      ctx.lineTo(...toCanvas(edge.b, tile));
      ctx.stroke();
    }
    for (const node of scene.dimerNodes) {
      const [x, y] = toCanvas(node.at, tile);
      ctx.beginPath();
      ctx.arc(x, y, 5, 0, 2 * Math.PI);
      ctx.fillStyle = node.side === "clockwise" ? "#ffffff" : "#222222";
      ctx.fill();
      ctx.strokeStyle = "#222222";
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
    for (const crossing of scene.crossings) {
      const [x, y] = toCanvas(crossing, tile);
      ctx.beginPath();
      ctx.arc(x, y, 1.8, 0, 2 * Math.PI);
      ctx.fillStyle = "#555555";
      ctx.fill();
    }
  }
  ctx.globalAlpha = 1.0;

  // frame of the fundamental square on top
  ctx.strokeStyle = "#000000";
  ctx.lineWidth = 1.5;
  ctx.strokeRect(pad, height - pad - side, side, side);

  if (scene.stale) {
    ctx.fillStyle = "rgba(255,255,255,0.35)";
    ctx.fillRect(pad, height - pad - side, side, side);
  }
}
