"""Input and output guardrails around provider calls.

Input side: case-insensitive scan of user text against a bundled
prompt-injection pattern corpus. Output side: paragraph-wise support check
against the session context, provider-backed when a provider is available
and a deterministic token-overlap rule otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import ProviderError
from .provider import ChatMessage

OMISSION_MARKER = "[removed: unsupported content]"

_STOPWORDS = frozenset("""
a an and are as at be by for from has have in is it of on or that the this to
was were which with
""".split())


@dataclass
class GuardrailVerdict:
    allowed: bool
    reason: str
    matched_pattern: str | None = None

    def __post_init__(self):
        if not self.allowed and not self.reason:
            raise ValueError("blocked verdict needs a reason")


def load_injection_patterns() -> list[str]:
    text = resources.files("netmedkit.data").joinpath("injection_patterns.txt").read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def input_guardrail(text: str, patterns: list[str] | None = None) -> GuardrailVerdict:
    """Block text containing any known injection pattern (case-insensitive)."""
    patterns = patterns if patterns is not None else load_injection_patterns()
    lowered = text.lower()
    for pat in patterns:
        if pat.lower() in lowered:
            return GuardrailVerdict(allowed=False,
                                    reason="prompt injection pattern detected",
                                    matched_pattern=pat)
    return GuardrailVerdict(allowed=True, reason="no injection pattern matched")


def content_tokens(text: str) -> set[str]:
    return {t for t in re.findall(r"[a-z0-9][a-z0-9.\-]*", text.lower())
            if t not in _STOPWORDS}


def _supported_by_overlap(paragraph: str, context_segments: list[str],
                          threshold: float) -> bool:
    ptoks = content_tokens(paragraph)
    if not ptoks:
        return True  # nothing factual to check
    best = 0.0
    for seg in context_segments:
        stoks = content_tokens(seg)
        union = ptoks | stoks
        if union:
            best = max(best, len(ptoks & stoks) / len(union))
    return best >= threshold


SUPPORT_CHECK_PROMPT = """\
You verify answer paragraphs against session context. Reply with exactly
YES if the paragraph is supported by the context, NO otherwise."""


def output_guardrail(paragraphs: list[str], context_segments: list[str],
                     provider=None, threshold: float = 0.2) -> list[tuple[str, str]]:
    """Per-paragraph kept/removed decision, order preserved.

    With a provider the check is a YES/NO support question; on provider
    failure (or no provider) the deterministic rule applies: keep iff the
    best content-token Jaccard against any context segment is >= threshold.
    """
    out = []
    for para in paragraphs:
        keep = None
        if provider is not None:
            try:
                reply = provider.complete([
                    ChatMessage("system", SUPPORT_CHECK_PROMPT),
                    ChatMessage("user", "Context:\n" + "\n---\n".join(context_segments)
                                + "\n\nParagraph:\n" + para),
                ])
                verdict = reply.content.strip().upper()
                if verdict.startswith(("YES", "NO")):
                    keep = verdict.startswith("YES")
            except ProviderError:
                keep = None
        if keep is None:
            keep = _supported_by_overlap(para, context_segments, threshold)
        out.append((para, "kept" if keep else "removed"))
    return out


def apply_guardrail_markers(decisions: list[tuple[str, str]]) -> list[str]:
    return [para if status == "kept" else OMISSION_MARKER
            for para, status in decisions]
