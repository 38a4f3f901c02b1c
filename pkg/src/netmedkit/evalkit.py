"""Agent evaluation harness.

Three bookkeeping layers: did the planner pick the expected tool
(tool accuracy), was the call made correctly (call accuracy, or
superset-matching F1 for knowledge-graph cases), and did the answer hold up
(predicate rubric, or a CSV review sheet for human scoring).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

from .errors import TranscriptMissing


@dataclass
class EvalCase:
    case_id: str
    question: str
    agent: str
    tool: str
    expected_action: str
    call_predicate: object = None   # callable(ToolCallRecord-like dict) -> bool
    silver_records: list[dict] = field(default_factory=list)
    answer_rubric: object = "manual"  # "manual" or callable(answer str) -> bool


def superset_match(silver: list[dict], returned: list[dict]) -> list[tuple[int, int]]:
    """Greedy one-to-one assignment of silver records to returned records.

    A returned record is compatible with a silver record iff it contains
    every silver key with an equal value; extra attributes are allowed.
    Silver records claim, in input order, the first compatible unclaimed
    returned record. Returns the (silver index, returned index) pairs.
    """
    claimed: set[int] = set()
    hits = []
    for si, sil in enumerate(silver):
        for ri, ret in enumerate(returned):
            if ri in claimed:
                continue
            if all(k in ret and ret[k] == v for k, v in sil.items()):
                claimed.add(ri)
                hits.append((si, ri))
                break
    return hits


def f1_from_hits(hits: int, silver_count: int, returned_count: int):
    """Classic precision/recall/F1 over matched records."""
    if hits > min(silver_count, returned_count):
        raise ValueError("more hits than records")
    precision = hits / returned_count if returned_count else 0.0
    recall = hits / silver_count if silver_count else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1


@dataclass
class MetricsRow:
    agent: str
    tool: str
    tool_accuracy: float | None
    call_accuracy: float | None
    answer_accuracy: float | None
    n_cases: int
    call_is_f1: bool = False


@dataclass
class MetricsTable:
    rows: list[MetricsRow]

    def averages(self) -> dict[str, float | None]:
        out = {}
        for col in ("tool_accuracy", "call_accuracy", "answer_accuracy"):
            vals = [getattr(r, col) for r in self.rows if getattr(r, col) is not None]
            out[col] = sum(vals) / len(vals) if vals else None
        return out

    def to_json(self) -> dict:
        return {
            "rows": [{"agent": r.agent, "tool": r.tool,
                      "tool_accuracy": r.tool_accuracy,
                      "call_accuracy": r.call_accuracy,
                      "answer_accuracy": r.answer_accuracy,
                      "n_cases": r.n_cases, "call_is_f1": r.call_is_f1}
                     for r in self.rows],
            "averages": self.averages(),
        }

    def render(self) -> str:
        def fmt(v, f1=False):
            if v is None:
                return "-"
            s = f"{v:.2f}".rstrip("0").rstrip(".")
            return f"{s} (F1)" if f1 else s

        lines = ["Agent\tTool\tTool-Accuracy\tCall-Accuracy\tAnswer-Accuracy"]
        for r in self.rows:
            lines.append("\t".join([
                r.agent, r.tool, fmt(r.tool_accuracy),
                fmt(r.call_accuracy, r.call_is_f1), fmt(r.answer_accuracy)]))
        avg = self.averages()
        lines.append("\t".join([
            "Average (recomputed from rows)", "-",
            fmt(avg["tool_accuracy"]), fmt(avg["call_accuracy"]),
            fmt(avg["answer_accuracy"])]))
        return "\n".join(lines)


def score_run(cases: list[EvalCase], transcripts: dict[str, dict]) -> MetricsTable:
    """Score one transcript per case and aggregate per (agent, tool).

    Transcript format: {"planned_action": str, "tool_call": dict | None,
    "returned_records": list, "answer": str}. KG cases (silver records
    present) score call accuracy as mean superset-matching F1; manual
    rubrics contribute no answer accuracy and land on the review sheet.
    """
    grouped: dict[tuple[str, str], list[EvalCase]] = {}
    for case in cases:
        grouped.setdefault((case.agent, case.tool), []).append(case)

    rows = []
    for (agent, tool), group in grouped.items():
        tool_hits, call_vals, answer_vals = [], [], []
        any_f1 = False
        for case in group:
            if case.case_id not in transcripts:
                raise TranscriptMissing(case.case_id)
            tr = transcripts[case.case_id]
            tool_hits.append(tr.get("planned_action") == case.expected_action)
            if case.silver_records:
                any_f1 = True
                hits = superset_match(case.silver_records,
                                      tr.get("returned_records", []))
                _, _, f1 = f1_from_hits(len(hits), len(case.silver_records),
                                        len(tr.get("returned_records", [])))
                call_vals.append(f1)
            elif case.call_predicate is not None:
                call_vals.append(bool(case.call_predicate(tr.get("tool_call"))))
            if callable(case.answer_rubric):
                answer_vals.append(bool(case.answer_rubric(tr.get("answer", ""))))
        rows.append(MetricsRow(
            agent=agent, tool=tool,
            tool_accuracy=sum(tool_hits) / len(tool_hits) if tool_hits else None,
            call_accuracy=sum(call_vals) / len(call_vals) if call_vals else None,
            answer_accuracy=(sum(answer_vals) / len(answer_vals)
                             if answer_vals else None),
            n_cases=len(group), call_is_f1=any_f1))
    return MetricsTable(rows=rows)


def export_review_sheet(cases: list[EvalCase], transcripts: dict[str, dict],
                        path) -> None:
    """CSV for manual answer review; the verdict column stays blank."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "question", "answer", "verdict"])
        for case in cases:
            if case.answer_rubric == "manual":
                answer = transcripts.get(case.case_id, {}).get("answer", "")
                writer.writerow([case.case_id, case.question, answer, ""])


def load_cases(path) -> list[EvalCase]:
    """JSON-lines case files; predicates are not expressible there."""
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            cases.append(EvalCase(
                case_id=raw["case_id"], question=raw["question"],
                agent=raw["agent"], tool=raw["tool"],
                expected_action=raw["expected_action"],
                silver_records=raw.get("silver_records", []),
                answer_rubric=raw.get("answer_rubric", "manual")))
    return cases


def table_from_fixture(rows: list[dict]) -> MetricsTable:
    """Rebuild a metrics table verbatim from fixture row values."""
    return MetricsTable(rows=[MetricsRow(
        agent=r["agent"], tool=r["tool"],
        tool_accuracy=r.get("tool_accuracy"),
        call_accuracy=r.get("call_accuracy"),
        answer_accuracy=r.get("answer_accuracy"),
        n_cases=r.get("n_cases", 0),
        call_is_f1=r.get("call_is_f1", False)) for r in rows])
