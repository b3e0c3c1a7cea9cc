/** Thin typed client for the four service endpoints.
 *
 * Every call resolves to a discriminated result; HTTP and network
 * failures never throw past this module, so the controller can render
 * them inline.
 */

import {
  ApiErrorDetail,
  ArrangementDoc,
  EvaluateResponse,
  MetricsResponse,
  SearchResponse,
} from "./model.js";

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; status: number; detail: ApiErrorDetail };

async function post<T>(url: string, body: unknown): Promise<ApiResult<T>> {
  let resp: Response;
  try {
    resp = await fetch(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    return { ok: false, status: 0, detail: { error: "network", message: String(err) } };
  }
  return finish<T>(resp);
}

async function finish<T>(resp: Response): Promise<ApiResult<T>> {
  let payload: unknown = null;
  try {
    payload = await resp.json();
  } catch {
    // fall through; non-JSON error bodies become a generic detail
  }
  if (resp.ok) {
    return { ok: true, value: payload as T };
  }
  const detail =
    payload !== null && typeof payload === "object" && "detail" in payload
      ? ((payload as { detail: unknown }).detail as ApiErrorDetail)
      : { error: `http_${resp.status}` };
  const normalized: ApiErrorDetail =
    typeof detail === "object" && detail !== null && "error" in detail
      ? detail
      : { error: `http_${resp.status}`, message: String(detail) };
  return { ok: false, status: resp.status, detail: normalized };
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  evaluate(doc: ArrangementDoc): Promise<ApiResult<EvaluateResponse>> {
    return post(`${this.baseUrl}/api/evaluate`, doc);
  }

  search(body: {
    polygon: unknown;
    trials?: number;
    seed?: number;
    mesh?: number;
  }): Promise<ApiResult<SearchResponse>> {
    return post(`${this.baseUrl}/api/search`, body);
  }

  construct(
    kind: "triangle" | "double" | "add-pair" | "lift" | "linear",
    params: Record<string, unknown>,
  ): Promise<ApiResult<{ arrangement: ArrangementDoc; timing_ms?: number }>> {
    return post(`${this.baseUrl}/api/construct/${kind}`, params);
  }

  async metrics(query: string): Promise<ApiResult<MetricsResponse>> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}/api/polygon/metrics?${query}`);
    } catch (err) {
      return { ok: false, status: 0, detail: { error: "network", message: String(err) } };
    }
    return finish<MetricsResponse>(resp);
  }
}
