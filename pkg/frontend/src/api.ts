/** Typed wrappers over the JSON API, one function per route the page uses.
 * Every mutating control in the UI goes through exactly one of these. */

import type {
  Assessment,
  AttestationRow,
  EntryDetail,
  EntrySummary,
  OverrideRow,
  ReviewRow,
} from "./types.js";

export class ApiFault extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(path, init);
  if (!res.ok) {
    let code = "http_error";
    let message = `${res.status} ${res.statusText}`;
    try {
      const body = (await res.json()) as { code?: string; message?: string };
      if (body.code) code = body.code;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body, keep the status line
    }
    throw new ApiFault(res.status, code, message);
  }
  return (await res.json()) as T;
}

function post<T>(path: string, body: unknown, method = "POST"): Promise<T> {
  return request<T>(path, {
    method,
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

const entryPath = (entryId: string) => `/api/entries/${encodeURIComponent(entryId)}`;

export function getEntries(): Promise<{ entries: EntrySummary[] }> {
  return request("/api/entries");
}

export function getEntry(entryId: string): Promise<EntryDetail> {
  return request(entryPath(entryId));
}

export function getAssessment(entryId: string): Promise<Assessment> {
  return request(`${entryPath(entryId)}/assessment`);
}

export function addReview(
  entryId: string,
  hat: string,
  text: string,
): Promise<{ review: ReviewRow; assessment: Assessment }> {
  return post(`${entryPath(entryId)}/reviews`, { hat, text });
}

export function setReviewStatus(
  reviewId: string,
  status: string,
): Promise<{ review: ReviewRow; assessment: Assessment }> {
  return post(`/api/reviews/${encodeURIComponent(reviewId)}`, { status }, "PATCH");
}

export function attest(
  entryId: string,
  attribute: string,
  verdict: "pass" | "fail",
  reviewer = "",
): Promise<{ attestation: AttestationRow; assessment: Assessment }> {
  return post(`${entryPath(entryId)}/attestations`, { attribute, verdict, reviewer });
}

export function addOverride(
  entryId: string,
  metricId: string,
  elementPath: string,
  justification: string,
): Promise<{ override: OverrideRow; assessment: Assessment }> {
  return post(`${entryPath(entryId)}/overrides`, {
    metric_id: metricId,
    element_path: elementPath,
    justification,
  });
}

export function revokeOverride(
  entryId: string,
  metricId: string,
  elementPath: string,
): Promise<{ override: OverrideRow; assessment: Assessment }> {
  const query = new URLSearchParams({ metric_id: metricId, element_path: elementPath });
  return request(`${entryPath(entryId)}/overrides?${query}`, { method: "DELETE" });
}
