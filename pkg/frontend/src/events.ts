/** Live engine event subscription over server-sent events. */
import type { ApiClient, EngineEvent } from "./api.js";

export type StreamState = "connecting" | "live" | "lagged" | "offline";

export interface StreamHandle {
  close(): void;
}

export interface StreamCallbacks {
  onEvent(event: EngineEvent): void;
  onState(state: StreamState): void;
}

/** One connection per console; reconnects are the caller's call
 * (a lagged marker means the log moved on and topology + replay is
 * cheaper than catching up record by record). */
export function openEventStream(
  api: ApiClient, fromSeq: number, callbacks: StreamCallbacks,
): StreamHandle {
  const source = new EventSource(api.eventStreamUrl(fromSeq));
  callbacks.onState("connecting");
  source.onopen = () => callbacks.onState("live");
  source.onmessage = (message: MessageEvent<string>) => {
    callbacks.onEvent(JSON.parse(message.data) as EngineEvent);
  };
  source.addEventListener("lagged", () => {
    callbacks.onState("lagged");
    source.close();
  });
  source.onerror = () => {
    // EventSource retries on transient failures; a closed source is final.
    if (source.readyState === EventSource.CLOSED) callbacks.onState("offline");
    else callbacks.onState("connecting");
  };
  return { close: () => source.close() };
}
