"""Chat-completion provider layer.

Two interchangeable backends sit behind the same complete/stream_complete
surface: a scripted provider that replays canned exchanges in order (the
test default — every workflow replays offline) and an HTTP client speaking
the OpenAI chat-completions wire format.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass

import httpx

from .errors import (MalformedResponse, PartialContent, ProviderUnreachable,
                     ScriptExhausted, ScriptMismatch)


@dataclass
class ToolCall:
    id: str
    name: str
    arguments: dict


@dataclass
class ChatMessage:
    role: str  # system | user | assistant | tool
    content: str = ""
    tool_call: ToolCall | None = None
    tool_call_id: str | None = None  # set on role="tool" result messages

    def to_wire(self) -> dict:
        msg = {"role": self.role, "content": self.content}
        if self.tool_call is not None:
            msg["tool_calls"] = [{
                "id": self.tool_call.id,
                "type": "function",
                "function": {"name": self.tool_call.name,
                             "arguments": json.dumps(self.tool_call.arguments)},
            }]
        if self.tool_call_id is not None:
            msg["tool_call_id"] = self.tool_call_id
        return msg


@dataclass
class ToolSchema:
    name: str
    description: str
    parameters: dict  # JSON-schema subset

    def to_wire(self) -> dict:
        return {"type": "function",
                "function": {"name": self.name, "description": self.description,
                             "parameters": self.parameters}}


@dataclass
class ScriptedExchange:
    """Predicate over the rendered prompt plus the canned reply.

    `matcher` is a substring to look for in the concatenated prompt, or a
    callable over the message list. `response` may be a string or a list of
    chunks (streamed in order).
    """
    matcher: object
    response: object

    def matches(self, messages: list[ChatMessage]) -> bool:
        if callable(self.matcher):
            return bool(self.matcher(messages))
        blob = "\n".join(m.content for m in messages)
        return str(self.matcher).lower() in blob.lower()

    def chunks(self) -> list[str]:
        if isinstance(self.response, list):
            return [str(c) for c in self.response]
        return [str(self.response)] if self.response else []


class ScriptedProvider:
    """Replays exchanges strictly in order; deterministic by construction."""

    def __init__(self, script: list[ScriptedExchange]):
        self._script = list(script)
        self._initial = list(script)
        self._lock = threading.Lock()
        self.prompts_seen: list[list[ChatMessage]] = []

    @classmethod
    def from_pairs(cls, pairs) -> "ScriptedProvider":
        return cls([ScriptedExchange(m, r) for m, r in pairs])

    def reset(self):
        with self._lock:
            self._script = list(self._initial)
            self.prompts_seen = []

    def _next(self, messages: list[ChatMessage]) -> ScriptedExchange:
        with self._lock:
            self.prompts_seen.append(list(messages))
            if not self._script:
                raise ScriptExhausted("script consumed; no exchange left")
            exchange = self._script.pop(0)
        if not exchange.matches(messages):
            raise ScriptMismatch(
                f"prompt did not match scripted expectation {exchange.matcher!r}")
        return exchange

    def complete(self, messages, tools=None, temperature=0.0,
                 max_tokens=None) -> ChatMessage:
        exchange = self._next(messages)
        return ChatMessage(role="assistant", content="".join(exchange.chunks()))

    def stream_complete(self, messages, tools=None, sink=None, temperature=0.0,
                        max_tokens=None) -> ChatMessage:
        exchange = self._next(messages)
        parts = []
        for chunk in exchange.chunks():
            parts.append(chunk)
            if sink is not None:
                sink(chunk)
        return ChatMessage(role="assistant", content="".join(parts))


class HTTPProvider:
    """OpenAI-compatible chat-completions client.

    Base URL, model name and API key come from constructor arguments or the
    CHATD_MODEL_URL / CHATD_MODEL_NAME / CHATD_API_KEY environment variables.
    """

    def __init__(self, base_url: str | None = None, model: str | None = None,
                 api_key: str | None = None, timeout: float = 60.0):
        self.base_url = (base_url or os.environ.get("CHATD_MODEL_URL", "")).rstrip("/")
        self.model = model or os.environ.get("CHATD_MODEL_NAME", "gpt-oss-20b")
        self.api_key = api_key or os.environ.get("CHATD_API_KEY", "")
        if not self.base_url:
            raise ProviderUnreachable("no model base URL configured")
        self._client = httpx.Client(timeout=timeout)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _body(self, messages, tools, temperature, max_tokens, stream) -> dict:
        body = {"model": self.model,
                "messages": [m.to_wire() for m in messages],
                "temperature": temperature,
                "stream": stream}
        if tools:
            body["tools"] = [t.to_wire() for t in tools]
        if max_tokens is not None:
            body["max_tokens"] = max_tokens
        return body

    def complete(self, messages, tools=None, temperature=0.0,
                 max_tokens=None) -> ChatMessage:
        url = f"{self.base_url}/v1/chat/completions"
        try:
            resp = self._client.post(
                url, headers=self._headers(),
                json=self._body(messages, tools, temperature, max_tokens, False))
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderUnreachable(f"chat completion failed: {exc}") from exc
        return _parse_completion(resp)

    def stream_complete(self, messages, tools=None, sink=None, temperature=0.0,
                        max_tokens=None) -> ChatMessage:
        url = f"{self.base_url}/v1/chat/completions"
        parts: list[str] = []
        try:
            with self._client.stream(
                    "POST", url, headers=self._headers(),
                    json=self._body(messages, tools, temperature, max_tokens, True)) as resp:
                resp.raise_for_status()
                for line in resp.iter_lines():
                    line = line.strip()
                    if not line.startswith("data:"):
                        continue
                    payload = line[len("data:"):].strip()
                    if payload == "[DONE]":
                        break
                    try:
                        delta = json.loads(payload)["choices"][0]["delta"]
                    except (json.JSONDecodeError, KeyError, IndexError) as exc:
                        raise MalformedResponse(f"bad stream chunk: {payload!r}") from exc
                    text = delta.get("content") or ""
                    if text:
                        parts.append(text)
                        if sink is not None:
                            sink(text)
        except httpx.HTTPError as exc:
            raise PartialContent(f"stream interrupted: {exc}", "".join(parts)) from exc
        return ChatMessage(role="assistant", content="".join(parts))

    def close(self):
        self._client.close()


def _parse_completion(resp) -> ChatMessage:
    try:
        msg = resp.json()["choices"][0]["message"]
    except (json.JSONDecodeError, KeyError, IndexError, ValueError) as exc:
        raise MalformedResponse(f"unparseable completion body: {exc}") from exc
    tool_call = None
    calls = msg.get("tool_calls") or []
    if calls:
        fn = calls[0].get("function", {})
        try:
            args = json.loads(fn.get("arguments") or "{}")
        except json.JSONDecodeError as exc:
            raise MalformedResponse("tool call arguments are not JSON") from exc
        tool_call = ToolCall(id=calls[0].get("id", "call_0"),
                             name=fn.get("name", ""), arguments=args)
    return ChatMessage(role="assistant", content=msg.get("content") or "",
                       tool_call=tool_call)
