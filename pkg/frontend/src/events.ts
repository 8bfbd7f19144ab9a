/** Event stream subscription with explicit reconnect.
 *
 * The server resumes from `?since=<last seen id>`, not from the
 * Last-Event-ID header, so the browser's built-in retry would replay the
 * whole log. Instead: close on error, report stale, reopen after a delay
 * with a fresh cursor. One subscription per page.
 */

import type { EventType, StreamEvent } from "./types.js";

const EVENT_TYPES: EventType[] = ["snapshot", "assessment", "review", "attestation", "override"];

export type ConnectionState = "connecting" | "live" | "stale";

export interface Subscription {
  close(): void;
}

export function subscribeEvents(
  onEvent: (ev: StreamEvent) => void,
  onStatus: (state: ConnectionState) => void,
  sinceId: () => number,
  reconnectDelayMs = 1000,
): Subscription {
  let source: EventSource | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;
  let closed = false;

  function open(): void {
    if (closed) return;
    onStatus("connecting");
    source = new EventSource(`/api/events?since=${sinceId()}`);
    source.onopen = () => onStatus("live");
    source.onerror = () => {
      source?.close();
      source = null;
      onStatus("stale");
      timer = setTimeout(open, reconnectDelayMs);
    };
    for (const type of EVENT_TYPES) {
      source.addEventListener(type, (raw) => {
        const msg = raw as MessageEvent<string>;
        onEvent(JSON.parse(msg.data) as StreamEvent);
      });
    }
  }

  open();
  return {
    close() {
      closed = true;
      if (timer !== null) clearTimeout(timer);
      source?.close();
      source = null;
    },
  };
}
