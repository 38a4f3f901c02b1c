/** Server event frames streamed over the session WebSocket. */

export interface PlanStepEvent {
  type: "plan_step";
  action: string;
  rationale: string;
  steps_remaining: number;
}

export interface ToolCallEvent {
  type: "tool_call";
  tool: string;
  arguments: Record<string, unknown>;
  outcome: "ok" | "error";
  digest: string;
}

export interface NetworkEvent {
  type: "network";
  analysis_id: string;
}

export interface TokenEvent {
  type: "token";
  text: string;
}

export interface FinalEvent {
  type: "final";
  text: string;
  guardrail?: string;
}

export interface ErrorEvent {
  type: "error";
  message: string;
}

export type ServerEvent =
  | PlanStepEvent
  | ToolCallEvent
  | NetworkEvent
  | TokenEvent
  | FinalEvent
  | ErrorEvent;

export function isServerEvent(value: unknown): value is ServerEvent {
  if (typeof value !== "object" || value === null) return false;
  const type = (value as { type?: unknown }).type;
  return (
    type === "plan_step" ||
    type === "tool_call" ||
    type === "network" ||
    type === "token" ||
    type === "final" ||
    type === "error"
  );
}
