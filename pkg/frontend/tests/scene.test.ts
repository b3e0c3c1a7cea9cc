/** Scene construction from frozen evaluate responses.
 *
 * The fixtures under tests/fixtures/ were captured from the HTTP service
 * (timing zeroed) so these tests stay hermetic: no server, no canvas.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, test } from "vitest";

import { EvaluateResponse } from "../src/model.js";
import { buildScene, FACE_COLORS, Scene } from "../src/scene.js";
import { EditorState, initialState } from "../src/state.js";

function fixture(name: string): EvaluateResponse {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf8")) as EvaluateResponse;
}

const figure = fixture("figure_evaluate.json");
const squareDouble = fixture("square_double_evaluate.json");

function stateWith(response: EvaluateResponse | null, extra: Partial<EditorState> = {}): EditorState {
  return { ...initialState(), response, verdict: response ? "admissible" : "empty", ...extra };
}

function labelCounts(scene: Scene): Record<string, number> {
  const out: Record<string, number> = {};
  for (const face of scene.faces) out[face.label] = (out[face.label] ?? 0) + 1;
  return out;
}

describe("empty editor", () => {
  test("renders a blank square", () => {
    const scene = buildScene(initialState());
    expect(scene.faces).toHaveLength(0);
    expect(scene.strokes).toHaveLength(0);
    expect(scene.arrows).toHaveLength(0);
    expect(scene.dimerNodes).toHaveLength(0);
    expect(scene.dimerEdges).toHaveLength(0);
    expect(scene.banner).toBeNull();
    expect(scene.stale).toBe(false);
    expect(scene.tiles).toEqual([[0, 0]]);
  });
});

describe("admissible five-line arrangement", () => {
  const scene = buildScene(stateWith(figure));

  test("shows thirteen faces split eight consistent, five inconsistent", () => {
    expect(scene.faces).toHaveLength(13);
    expect(labelCounts(scene)).toEqual({ clockwise: 4, counterclockwise: 4, inconsistent: 5 });
  });

  test("colors faces by orientation label", () => {
    for (const face of scene.faces) {
      expect(face.color).toBe(FACE_COLORS[face.label]);
      expect(face.rings.length).toBeGreaterThan(0);
      for (const ring of face.rings) {
        expect(ring.length).toBeGreaterThanOrEqual(3);
        for (const [x, y] of ring) {
          expect(x).toBeGreaterThanOrEqual(0);
          expect(x).toBeLessThanOrEqual(1);
          expect(y).toBeGreaterThanOrEqual(0);
          expect(y).toBeLessThanOrEqual(1);
        }
      }
    }
  });

  test("draws one orientation arrow per line, unit length", () => {
    expect(scene.arrows).toHaveLength(5);
    expect(new Set(scene.arrows.map((a) => a.line)).size).toBe(5);
    for (const arrow of scene.arrows) {
      expect(Math.hypot(arrow.dir[0], arrow.dir[1])).toBeCloseTo(1, 12);
    }
  });

  test("marks every crossing", () => {
    expect(scene.crossings).toHaveLength(13);
  });

  test("overlays the matching: two strokes per dimer edge", () => {
    expect(figure.geometry.dimer).not.toBeNull();
    expect(figure.geometry.dimer!.edges).toHaveLength(13);
    expect(scene.dimerNodes).toHaveLength(8);
    // each edge meets one clockwise and one counterclockwise face node
    expect(scene.dimerEdges).toHaveLength(26);
  });

  test("no banner outside the two-component case", () => {
    expect(scene.banner).toBeNull();
  });

  test("selection highlights exactly that line's strokes", () => {
    const selected = buildScene(stateWith(figure, { selection: 1 }));
    for (const stroke of selected.strokes) {
      expect(stroke.selected).toBe(stroke.line === 1);
    }
    expect(selected.strokes.some((s) => s.selected)).toBe(true);
  });
});

describe("doubled square arrangement", () => {
  test("announces the parallelogram case", () => {
    const scene = buildScene(stateWith(squareDouble));
    expect(squareDouble.report.k).toBe(2);
    expect(scene.banner).toBe("parallelogram case");
    expect(labelCounts(scene)).toEqual({ clockwise: 1, counterclockwise: 1, inconsistent: 2 });
  });
});

describe("staleness and tiling", () => {
  test("pending requests gray the picture", () => {
    expect(buildScene(stateWith(figure, { pending: true })).stale).toBe(true);
  });

  test("a degenerate verdict grays the picture", () => {
    expect(buildScene(stateWith(null, { verdict: "degenerate" })).stale).toBe(true);
  });

  test("3x3 tiling produces nine copies", () => {
    const tiles = buildScene(stateWith(figure, { tiling: true })).tiles;
    expect(tiles).toHaveLength(9);
    expect(tiles).toContainEqual([0, 0]);
    expect(tiles).toContainEqual([-1, 1]);
  });
});
