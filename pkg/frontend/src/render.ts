/** DOM rendering. One full rebuild per state change; handlers are wired
 * through data-action attributes and a single delegated click listener.
 * Text inputs survive because typing never triggers a rebuild (the
 * override draft updates the submit button in place). */

import type { AppState, EntryProjection } from "./state.js";
import type { Finding, ReviewRow, ReviewStatus } from "./types.js";
import { CHARACTERISTIC_OF, HATS, WEAK_ATTRIBUTES } from "./types.js";

export interface Actions {
  selectEntry(entryId: string): void;
  fileReview(hat: string, text: string): void;
  moveReview(reviewId: string, status: ReviewStatus): void;
  attest(attribute: string, verdict: "pass" | "fail"): void;
  openOverride(metricId: string, elementPath: string): void;
  editOverride(text: string): void;
  cancelOverride(): void;
  submitOverride(): void;
  revokeOverride(metricId: string, elementPath: string): void;
  dismissNotice(): void;
}

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function attr(text: string): string {
  return esc(text);
}

const CONNECTION_TEXT = { connecting: "connecting", live: "live", stale: "stale" } as const;

function badge(stage: string, color: string, demoted: boolean, previous: string | null): string {
  const drop = demoted && previous !== null ? `<span class="demoted">demoted from ${esc(previous)}</span>` : "";
  return `<span class="badge ${attr(color)}" data-role="stage-badge">${esc(stage)}</span>${drop}`;
}

function entryList(state: AppState): string {
  if (state.entries.length === 0) return `<p class="empty">no entries yet</p>`;
  const rows = state.entries.map((e) => {
    const active = e.entry_id === state.selected ? " active" : "";
    return `<li class="entry-row${active}" data-action="select-entry" data-entry-id="${attr(e.entry_id)}">
      <span class="dot ${attr(e.color)}"></span>
      <span class="entry-id">${esc(e.entry_id)}</span>
      <span class="entry-meta">#${e.head.seq_no} · ${e.finding_count} findings · ${e.review_count} reviews</span>
    </li>`;
  });
  return `<ul>${rows.join("")}</ul>`;
}

function chips(entry: EntryProjection): string {
  const groups: Record<string, string[]> = { strong: [], medium: [], weak: [] };
  for (const [attribute, status] of Object.entries(entry.assessment.statuses)) {
    const group = CHARACTERISTIC_OF[attribute] ?? "weak";
    groups[group].push(
      `<span class="chip ${attr(status)}" data-attribute="${attr(attribute)}" title="${attr(status)}">${esc(attribute.replaceAll("_", " "))}</span>`,
    );
  }
  const column = (name: string) =>
    `<div class="chip-group"><h3>${name}</h3><div class="chip-row">${groups[name].join("")}</div></div>`;
  return column("strong") + column("medium") + column("weak");
}

function overrideDialog(state: AppState): string {
  const draft = state.overrideDraft;
  if (draft === null) return "";
  const disabled = draft.text.trim() === "" ? " disabled" : "";
  return `<div class="override-dialog" data-role="override-dialog">
    <p>Override <code>${esc(draft.metricId)}</code> at <code>${esc(draft.elementPath)}</code></p>
    <textarea data-role="override-text" placeholder="justification (required)">${esc(draft.text)}</textarea>
    <div class="dialog-buttons">
      <button data-action="submit-override"${disabled}>override</button>
      <button data-action="cancel-override">cancel</button>
    </div>
  </div>`;
}

function findingRow(f: Finding): string {
  const overridable =
    f.characteristic === "medium"
      ? `<button data-action="open-override" data-metric-id="${attr(f.metric_id)}" data-element-path="${attr(f.element_path)}">override</button>`
      : "";
  return `<li class="finding ${attr(f.characteristic)}" data-fingerprint="${attr(f.fingerprint)}">
    <div class="finding-head">
      <code>${esc(f.metric_id)}</code>
      <span class="path">${esc(f.element_path)}</span>
      ${overridable}
    </div>
    <div class="finding-message">${esc(f.message)}</div>
    <div class="finding-suggestion">${esc(f.suggestion)}</div>
  </li>`;
}

function findings(state: AppState, entry: EntryProjection): string {
  const list = entry.assessment.findings;
  const items = list.length === 0 ? `<p class="empty">no findings</p>` : `<ul>${list.map(findingRow).join("")}</ul>`;
  const active = entry.overrides.filter((o) => !o.revoked);
  const overrides =
    active.length === 0
      ? ""
      : `<h3>active overrides</h3><ul class="override-list">${active
          .map(
            (o) => `<li data-override="${attr(o.metric_id)}@${attr(o.element_path)}">
              <code>${esc(o.metric_id)}</code> at ${esc(o.element_path)}: ${esc(o.justification)}
              <button data-action="revoke-override" data-metric-id="${attr(o.metric_id)}" data-element-path="${attr(o.element_path)}">revoke</button>
            </li>`,
          )
          .join("")}</ul>`;
  return `<h2>findings (${list.length})</h2>${items}${overrideDialog(state)}${overrides}`;
}

function reviewCard(r: ReviewRow): string {
  // legal moves only: open -> done, done -> reopened, reopened -> done
  const buttons =
    r.status === "open" || r.status === "reopened"
      ? `<button data-action="move-review" data-review-id="${attr(r.review_id)}" data-status="done">mark done</button>`
      : `<button data-action="move-review" data-review-id="${attr(r.review_id)}" data-status="reopened">reopen</button>`;
  return `<div class="card hat-${attr(r.hat)}" data-review-id="${attr(r.review_id)}">
    <div class="card-head"><span class="hat">${esc(r.hat)}</span><code>${esc(r.review_id)}</code></div>
    <div class="card-text">${esc(r.text)}</div>
    ${buttons}
  </div>`;
}

function board(entry: EntryProjection): string {
  const column = (status: ReviewStatus) => {
    const cards = entry.reviews.filter((r) => r.status === status);
    return `<div class="column" data-column="${status}">
      <h3>${status} (${cards.length})</h3>
      ${cards.map(reviewCard).join("")}
    </div>`;
  };
  const hatOptions = HATS.map((h) => `<option value="${h}">${h}</option>`).join("");
  return `<h2>reviews</h2>
  <form class="review-form" data-role="review-form">
    <select data-role="review-hat">${hatOptions}</select>
    <input type="text" data-role="review-text" placeholder="what did you see?">
    <button type="button" data-action="file-review">file review</button>
  </form>
  <div class="board">${column("open")}${column("done")}${column("reopened")}</div>`;
}

function attestations(entry: EntryProjection): string {
  const byAttribute = new Map(entry.attestations.map((a) => [a.attribute, a]));
  const rows = WEAK_ATTRIBUTES.map((attribute) => {
    const status = entry.assessment.statuses[attribute] ?? "pending_human";
    const current = byAttribute.get(attribute);
    const stale = current !== undefined && current.content_hash !== entry.assessment.content_hash;
    const note =
      current === undefined
        ? `<span class="att-note">not attested</span>`
        : `<span class="att-note">${esc(current.verdict)}${stale ? " (stale)" : ""}</span>`;
    return `<li data-attribute="${attr(attribute)}">
      <span class="chip ${attr(status)}">${esc(attribute.replaceAll("_", " "))}</span>
      ${note}
      <button data-action="attest" data-attribute="${attr(attribute)}" data-verdict="pass">pass</button>
      <button data-action="attest" data-attribute="${attr(attribute)}" data-verdict="fail">fail</button>
    </li>`;
  });
  return `<h2>attestations</h2><ul class="attestation-panel" data-role="attestations">${rows.join("")}</ul>`;
}

function timeline(entry: EntryProjection): string {
  const points = entry.snapshots.map((s) => {
    const seen = entry.stageBySeq[s.seq_no];
    const color = seen === undefined ? "unknown" : seen.color;
    const label = seen === undefined ? "not assessed while watching" : seen.stage;
    return `<li data-seq="${s.seq_no}" title="${attr(label)}">
      <span class="dot ${attr(color)}"></span>#${s.seq_no}
    </li>`;
  });
  return `<h2>history</h2><ol class="timeline" data-role="timeline">${points.join("")}</ol>`;
}

function entryView(state: AppState): string {
  const entry = state.entry;
  if (entry === null) return `<p class="empty">select an entry</p>`;
  const a = entry.assessment;
  const notice =
    state.notice === null
      ? ""
      : `<div class="notice" data-role="notice">${esc(state.notice)} <button data-action="dismiss-notice">dismiss</button></div>`;
  return `<header class="entry-header">
    <h1>${esc(entry.entryId)}</h1>
    ${badge(a.stage, a.color, a.demoted, a.previous_stage)}
    <span class="head-meta">snapshot #${a.seq_no}</span>
  </header>
  ${notice}
  <section class="chips">${chips(entry)}</section>
  <section class="findings">${findings(state, entry)}</section>
  <section class="reviews">${board(entry)}</section>
  <section class="attestations">${attestations(entry)}</section>
  <section class="history">${timeline(entry)}</section>`;
}

export function render(root: HTMLElement, state: AppState, actions: Actions): void {
  root.innerHTML = `<div class="topbar">
    <span class="brand">modelgate</span>
    <span class="conn ${state.connection}" data-role="connection">${CONNECTION_TEXT[state.connection]}</span>
  </div>
  <div class="layout">
    <aside data-role="entry-list">${entryList(state)}</aside>
    <main data-role="entry-view">${entryView(state)}</main>
  </div>`;
  wire(root, actions);
}

function wire(root: HTMLElement, actions: Actions): void {
  const fileReview = () => {
    const hat = root.querySelector<HTMLSelectElement>('[data-role="review-hat"]')!.value;
    const text = root.querySelector<HTMLInputElement>('[data-role="review-text"]')!.value;
    actions.fileReview(hat, text);
  };

  root.querySelectorAll<HTMLElement>("[data-action]").forEach((el) => {
    const action = el.dataset.action as string;
    el.addEventListener("click", (event) => {
      event.preventDefault();
      switch (action) {
        case "file-review":
          fileReview();
          break;
        case "select-entry":
          actions.selectEntry(el.dataset.entryId as string);
          break;
        case "move-review":
          actions.moveReview(el.dataset.reviewId as string, el.dataset.status as ReviewStatus);
          break;
        case "attest":
          actions.attest(el.dataset.attribute as string, el.dataset.verdict as "pass" | "fail");
          break;
        case "open-override":
          actions.openOverride(el.dataset.metricId as string, el.dataset.elementPath as string);
          break;
        case "submit-override":
          actions.submitOverride();
          break;
        case "cancel-override":
          actions.cancelOverride();
          break;
        case "revoke-override":
          actions.revokeOverride(el.dataset.metricId as string, el.dataset.elementPath as string);
          break;
        case "dismiss-notice":
          actions.dismissNotice();
          break;
      }
    });
  });

  // pressing Enter in the text field goes the same way as the button
  const form = root.querySelector<HTMLFormElement>('[data-role="review-form"]');
  if (form !== null) {
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      fileReview();
    });
  }

  const draftText = root.querySelector<HTMLTextAreaElement>('[data-role="override-text"]');
  if (draftText !== null) {
    draftText.addEventListener("input", () => {
      actions.editOverride(draftText.value);
      // toggle in place so the textarea keeps focus
      const submit = root.querySelector<HTMLButtonElement>('[data-action="submit-override"]');
      if (submit !== null) submit.disabled = draftText.value.trim() === "";
    });
  }
}
