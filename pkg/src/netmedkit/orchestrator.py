"""Multi-agent control plane.

A planner with a fixed action vocabulary and a hard step budget (N=6)
dispatches to registered agent handlers, feeding every outcome (including
failures) back into the next planning call. Memory compacts into a rolling
summary once the transcript grows past a token threshold. The final answer
is synthesized from accumulated state and screened paragraph-wise by the
output guardrail.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field

from .errors import ProviderError
from .guardrails import (apply_guardrail_markers, input_guardrail,
                         output_guardrail)
from .provider import ChatMessage

ACTIONS = ("SUMMARY", "FETCH_KG", "CALL_NEDREX_TOOL", "CALL_DIGEST_TOOL",
           "FETCH_RESEARCH", "ADJUST_NETWORK", "FINALIZE")

STEP_BUDGET = 6
SUMMARY_TOKEN_THRESHOLD = 4000


@dataclass
class AgentAction:
    action: str
    rationale: str = ""
    degraded: bool = False  # planner emitted garbage and was forced here

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action {self.action!r}")


@dataclass
class ToolCallRecord:
    tool: str
    arguments: dict
    outcome: str  # ok | error
    duration: float
    digest: str

    def to_json(self) -> dict:
        return {"tool": self.tool, "arguments": self.arguments,
                "outcome": self.outcome, "duration": self.duration,
                "digest": self.digest}


@dataclass
class AgentResult:
    digest: str
    tool_calls: list[ToolCallRecord] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    ok: bool = True


@dataclass
class SessionState:
    transcript: list[ChatMessage] = field(default_factory=list)
    rolling_summary: str = ""
    steps_remaining: int = STEP_BUDGET
    agent_outputs: list[tuple[str, str, str]] = field(default_factory=list)
    tool_calls: list[ToolCallRecord] = field(default_factory=list)
    artifacts: dict[str, dict] = field(default_factory=dict)
    literature_ids: list[str] = field(default_factory=list)

    def last_user_message(self) -> str:
        for msg in reversed(self.transcript):
            if msg.role == "user":
                return msg.content
        return ""

    def add_artifact(self, payload: dict, kind: str) -> str:
        aid = f"{kind}-{len(self.artifacts) + 1}"
        self.artifacts[aid] = payload
        return aid

    def to_json(self) -> dict:
        return {
            "transcript": [{"role": m.role, "content": m.content}
                           for m in self.transcript],
            "rolling_summary": self.rolling_summary,
            "steps_remaining": self.steps_remaining,
            "agent_outputs": [list(o) for o in self.agent_outputs],
            "tool_calls": [t.to_json() for t in self.tool_calls],
            "artifacts": self.artifacts,
            "literature_ids": self.literature_ids,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "SessionState":
        state = cls(
            transcript=[ChatMessage(m["role"], m["content"])
                        for m in raw.get("transcript", [])],
            rolling_summary=raw.get("rolling_summary", ""),
            steps_remaining=raw.get("steps_remaining", STEP_BUDGET),
            agent_outputs=[tuple(o) for o in raw.get("agent_outputs", [])],
            artifacts=dict(raw.get("artifacts", {})),
            literature_ids=list(raw.get("literature_ids", [])),
        )
        state.tool_calls = [ToolCallRecord(**t) for t in raw.get("tool_calls", [])]
        return state


def estimate_tokens(text: str) -> int:
    # whitespace tokens x 1.3; close enough without a tokenizer dependency
    return int(len(text.split()) * 1.3)


# --- planning -------------------------------------------------------------

PLANNER_PROMPT = """\
You route a biomedical analysis session. Choose exactly one next action from:
{actions}.
Reply on one line as: ACTION ->short rationale.
Steps remaining: {steps}.
Rolling summary: {summary}
Prior agent outputs:
{outputs}"""


def _planner_messages(state: SessionState) -> list[ChatMessage]:
    outputs = "\n".join(f"- {a}: {out}" for a, _, out in state.agent_outputs) or "(none)"
    system = PLANNER_PROMPT.format(actions=", ".join(ACTIONS),
                                   steps=state.steps_remaining,
                                   summary=state.rolling_summary or "(empty)",
                                   outputs=outputs)
    return [ChatMessage("system", system),
            ChatMessage("user", state.last_user_message())]


def parse_action(raw: str) -> AgentAction:
    m = re.match(r"\s*([A-Z_]+)\s*(?:->\s*(.*))?", raw.strip())
    if not m or m.group(1) not in ACTIONS:
        raise ValueError(f"unparseable planner reply: {raw!r}")
    return AgentAction(action=m.group(1), rationale=(m.group(2) or "").strip())


def plan_next(state: SessionState, provider) -> AgentAction:
    """One planning decision; budget exhaustion forces FINALIZE with no call."""
    if state.steps_remaining <= 0:
        return AgentAction("FINALIZE", rationale="step budget exhausted")
    messages = _planner_messages(state)
    reply = provider.complete(messages)
    try:
        return parse_action(reply.content)
    except ValueError:
        retry = messages + [
            ChatMessage("assistant", reply.content),
            ChatMessage("user", f"Invalid action. Reply with one of: {', '.join(ACTIONS)}"),
        ]
        try:
            second = provider.complete(retry)
            action = parse_action(second.content)
            action.degraded = True
            return action
        except (ValueError, ProviderError):
            return AgentAction("FINALIZE",
                               rationale="planner degraded; forcing finalize",
                               degraded=True)


# --- memory compaction ----------------------------------------------------

SUMMARY_PROMPT = """\
Condense this conversation into a short factual summary that preserves the
analyses run, their key results, and the user's goals."""


def summarize_memory(state: SessionState, provider,
                     token_threshold: int = SUMMARY_TOKEN_THRESHOLD) -> SessionState:
    """Replace the transcript with (summary, last user message) when too large."""
    size = sum(estimate_tokens(m.content) for m in state.transcript)
    if size <= token_threshold:
        return state
    blob = "\n".join(f"{m.role}: {m.content}" for m in state.transcript)
    try:
        reply = provider.complete([ChatMessage("system", SUMMARY_PROMPT),
                                   ChatMessage("user", blob)])
    except ProviderError:
        return state  # compaction skipped, not fatal
    state.rolling_summary = reply.content
    last_user = state.last_user_message()
    state.transcript = [ChatMessage("user", last_user)] if last_user else []
    return state


# --- finalize -------------------------------------------------------------

FINALIZE_PROMPT = """\
Write the final Markdown answer to the user's question from the session
results below. Cite tool results as [T<n>] and literature as [L:<id>].
Only state what the results support."""

CLARIFICATION_TEMPLATE = (
    "I could not run any analysis for this request. Could you clarify what "
    "you would like to do? For example: query the knowledge graph, expand a "
    "disease module, rank candidate drugs, or search the literature.")

_CITATION_RE = re.compile(r"\[(T\d+|L:[^\]\s]+)\]")


def _strip_invalid_citations(text: str, state: SessionState) -> str:
    def check(m):
        ref = m.group(1)
        if ref.startswith("T"):
            idx = int(ref[1:])
            return m.group(0) if 1 <= idx <= len(state.tool_calls) else ""
        return m.group(0) if ref[2:] in state.literature_ids else ""
    return _CITATION_RE.sub(check, text)


def context_segments(state: SessionState) -> list[str]:
    segments = [out for _, _, out in state.agent_outputs]
    segments += [t.digest for t in state.tool_calls]
    if state.rolling_summary:
        segments.append(state.rolling_summary)
    return [s for s in segments if s]


def finalize(state: SessionState, provider, review_provider=None) -> str:
    """Synthesize the final answer and screen it paragraph-wise."""
    if not state.agent_outputs:
        return CLARIFICATION_TEMPLATE
    context = "\n".join(
        f"[T{i}] {t.tool}: {t.digest}" for i, t in enumerate(state.tool_calls, 1))
    context += "\n" + "\n".join(out for _, _, out in state.agent_outputs)
    reply = provider.complete([
        ChatMessage("system", FINALIZE_PROMPT),
        ChatMessage("user", f"Question: {state.last_user_message()}\n\nResults:\n{context}"),
    ])
    answer = _strip_invalid_citations(reply.content, state)
    paragraphs = [p for p in answer.split("\n\n")]
    decisions = output_guardrail(paragraphs, context_segments(state),
                                 provider=review_provider)
    return "\n\n".join(apply_guardrail_markers(decisions))


# --- turn loop ------------------------------------------------------------

def run_turn(state: SessionState, user_text: str, registry: dict, provider,
             review_provider=None,
             token_threshold: int = SUMMARY_TOKEN_THRESHOLD):
    """One full conversational turn.

    Returns (final answer, state, ordered events). Dispatch failures are
    recorded and fed forward; the user always gets a final event.
    """
    events: list[dict] = []
    verdict = input_guardrail(user_text)
    if not verdict.allowed:
        refusal = (f"Request blocked by the input guardrail: {verdict.reason} "
                   f"(pattern: {verdict.matched_pattern!r}).")
        state.transcript.append(ChatMessage("user", user_text))
        state.transcript.append(ChatMessage("assistant", refusal))
        events.append({"type": "final", "text": refusal, "guardrail": "rejected"})
        return refusal, state, events

    state = summarize_memory(state, provider, token_threshold)
    state.transcript.append(ChatMessage("user", user_text))
    state.steps_remaining = STEP_BUDGET

    while True:
        action = plan_next(state, provider)
        events.append({"type": "plan_step", "action": action.action,
                       "rationale": action.rationale,
                       "steps_remaining": state.steps_remaining})
        if action.action == "FINALIZE":
            break
        handler = registry[action.action]
        start = time.monotonic()
        try:
            result = handler(state, user_text)
        except Exception as exc:  # failure feeds the next planning step
            result = AgentResult(digest=f"{action.action} failed: {exc}", ok=False)
        duration = time.monotonic() - start
        if not result.ok and not result.tool_calls:
            result.tool_calls = [ToolCallRecord(
                tool=action.action, arguments={"text": user_text},
                outcome="error", duration=duration, digest=result.digest)]
        for rec in result.tool_calls:
            state.tool_calls.append(rec)
            events.append({"type": "tool_call", "tool": rec.tool,
                           "arguments": rec.arguments, "outcome": rec.outcome,
                           "digest": rec.digest})
        events.extend(result.events)
        state.agent_outputs.append((action.action, user_text[:120], result.digest))
        state.steps_remaining -= 1

    answer = finalize(state, provider, review_provider)
    state.transcript.append(ChatMessage("assistant", answer))
    for chunk in _token_chunks(answer):
        events.append({"type": "token", "text": chunk})
    events.append({"type": "final", "text": answer})
    return answer, state, events


def _token_chunks(text: str, words_per_chunk: int = 8) -> list[str]:
    words = text.split(" ")
    return [" ".join(words[i:i + words_per_chunk]) + (" " if i + words_per_chunk < len(words) else "")
            for i in range(0, len(words), words_per_chunk)]
