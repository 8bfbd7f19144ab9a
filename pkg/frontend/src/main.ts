/** Page wiring. Mutating actions only issue requests; the view moves when
 * the corresponding stream event comes back, so what is on screen is
 * always something the server said. API faults land in the notice bar. */

import * as api from "./api.js";
import type { ConnectionState } from "./events.js";
import { subscribeEvents } from "./events.js";
import type { Actions } from "./render.js";
import { render } from "./render.js";
import type { AppState } from "./state.js";
import {
  applyEvent,
  closeOverrideDraft,
  editOverrideDraft,
  initialState,
  openOverrideDraft,
  selectEntry,
  setConnection,
  setEntries,
  setNotice,
} from "./state.js";
import type { StreamEvent } from "./types.js";

export interface BootOptions {
  reconnectDelayMs?: number;
}

export interface App {
  stop(): void;
  state(): AppState;
}

export function boot(root: HTMLElement, opts: BootOptions = {}): App {
  let state = initialState();

  function commit(next: AppState, repaint = true): void {
    state = next;
    if (repaint) render(root, state, actions);
  }

  async function guarded(run: () => Promise<unknown>): Promise<void> {
    try {
      await run();
    } catch (err) {
      const text = err instanceof api.ApiFault ? `${err.code}: ${err.message}` : String(err);
      commit(setNotice(state, text));
    }
  }

  function selected(): string {
    if (state.selected === null) throw new Error("no entry selected");
    return state.selected;
  }

  const actions: Actions = {
    selectEntry(entryId) {
      void guarded(async () => {
        const detail = await api.getEntry(entryId);
        commit(selectEntry(state, detail));
      });
    },
    fileReview(hat, text) {
      void guarded(() => api.addReview(selected(), hat, text));
    },
    moveReview(reviewId, status) {
      void guarded(() => api.setReviewStatus(reviewId, status));
    },
    attest(attribute, verdict) {
      void guarded(() => api.attest(selected(), attribute, verdict));
    },
    openOverride(metricId, elementPath) {
      commit(openOverrideDraft(state, metricId, elementPath));
    },
    editOverride(text) {
      // no repaint: the textarea keeps focus, render.ts toggles the button
      commit(editOverrideDraft(state, text), false);
    },
    cancelOverride() {
      commit(closeOverrideDraft(state));
    },
    submitOverride() {
      const draft = state.overrideDraft;
      if (draft === null || draft.text.trim() === "") return;
      void guarded(async () => {
        await api.addOverride(selected(), draft.metricId, draft.elementPath, draft.text);
        commit(closeOverrideDraft(state));
      });
    },
    revokeOverride(metricId, elementPath) {
      void guarded(() => api.revokeOverride(selected(), metricId, elementPath));
    },
    dismissNotice() {
      commit(setNotice(state, null));
    },
  };

  function onEvent(ev: StreamEvent): void {
    commit(applyEvent(state, ev));
  }

  function onStatus(connection: ConnectionState): void {
    commit(setConnection(state, connection));
  }

  // subscribe before the first fetch so nothing falls between them; replayed
  // frames converge because the log is ordered and upserts are idempotent
  const subscription = subscribeEvents(onEvent, onStatus, () => state.lastEventId, opts.reconnectDelayMs);

  render(root, state, actions);
  void guarded(async () => {
    const { entries } = await api.getEntries();
    commit(setEntries(state, entries));
    if (entries.length > 0) {
      const detail = await api.getEntry(entries[0].entry_id);
      commit(selectEntry(state, detail));
    }
  });

  return {
    stop() {
      subscription.close();
    },
    state() {
      return state;
    },
  };
}

const rootEl = typeof document === "undefined" ? null : document.getElementById("app");
if (rootEl !== null) boot(rootEl);
