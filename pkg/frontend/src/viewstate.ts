/** Chat view state as a pure fold over the server event stream.
 *
 * Replaying the same event log always yields the same state, so recorded
 * sessions render identically to live ones. */

import { ServerEvent } from "./events";
import { NetworkPayload } from "./payload";

export interface ChatMessage {
  role: "user" | "assistant";
  text: string;
}

export interface TimelineEntry {
  kind: "plan" | "tool";
  label: string;
  detail: string;
  outcome?: "ok" | "error";
}

export interface ErrorCard {
  message: string;
}

export interface ViewState {
  sessionId: string | null;
  messages: (ChatMessage | ErrorCard)[];
  /** Partial assistant answer while token events stream in. */
  streamingBuffer: string | null;
  timeline: TimelineEntry[];
  /** Analysis ids announced by network events, newest last. */
  analysisIds: string[];
  activeNetwork: NetworkPayload | null;
  selectedNode: string | null;
  inputEnabled: boolean;
  connected: boolean;
}

export function initialState(sessionId: string | null = null): ViewState {
  return {
    sessionId,
    messages: [],
    streamingBuffer: null,
    timeline: [],
    analysisIds: [],
    activeNetwork: null,
    selectedNode: null,
    inputEnabled: true,
    connected: true,
  };
}

export function userMessage(state: ViewState, text: string): ViewState {
  return {
    ...state,
    messages: [...state.messages, { role: "user", text }],
    inputEnabled: false,
  };
}

export function applyEvent(state: ViewState, event: ServerEvent): ViewState {
  switch (event.type) {
    case "plan_step":
      return {
        ...state,
        timeline: [
          ...state.timeline,
          { kind: "plan", label: event.action, detail: event.rationale },
        ],
      };
    case "tool_call":
      return {
        ...state,
        timeline: [
          ...state.timeline,
          {
            kind: "tool",
            label: event.tool,
            detail: event.digest,
            outcome: event.outcome,
          },
        ],
      };
    case "network":
      return { ...state, analysisIds: [...state.analysisIds, event.analysis_id] };
    case "token":
      return {
        ...state,
        streamingBuffer: (state.streamingBuffer ?? "") + event.text,
      };
    case "final":
      return {
        ...state,
        streamingBuffer: null,
        messages: [...state.messages, { role: "assistant", text: event.text }],
        inputEnabled: true,
      };
    case "error":
      return {
        ...state,
        streamingBuffer: null,
        messages: [...state.messages, { message: event.message }],
        inputEnabled: true,
      };
  }
}

export function renderStream(
  state: ViewState,
  events: ServerEvent[],
): ViewState {
  return events.reduce(applyEvent, state);
}

export function onDisconnect(state: ViewState): ViewState {
  return { ...state, connected: false };
}

export function onReconnect(state: ViewState): ViewState {
  return { ...state, connected: true };
}
