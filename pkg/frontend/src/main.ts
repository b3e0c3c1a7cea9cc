/** Bootstrap: pick the API base URL, mount the editor, load a sample.
 *
 * The page talks to an affinedimers service; point it elsewhere with
 * ?api=http://host:port. Default matches `affinedimers serve`.
 */

import { ApiClient } from "./api.js";
import { EditorController } from "./controller.js";
import { ArrangementDoc } from "./model.js";

const SAMPLE: ArrangementDoc = {
  lines: [
    { h: [1, 0], c: "0" },
    { h: [1, 0], c: "1/2" },
    { h: [0, 1], c: "0" },
    { h: [-1, 1], c: "1/4" },
    { h: [-1, -2], c: "3/4" },
  ],
};

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  if (param) return param.replace(/\/$/, "");
  return "http://127.0.0.1:8787";
}

const root = document.getElementById("app");
if (root === null) throw new Error("no #app element");
const controller = new EditorController(root, new ApiClient(apiBase()));
controller.loadDoc(SAMPLE);
