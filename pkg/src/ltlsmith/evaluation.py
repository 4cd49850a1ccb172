"""Model evaluation: chat-completion client, answer parsing, metrics, and
the two sweep protocols.

Scoring conventions (pinned; they change the numbers):

* positive class for F1 is label ``True``;
* a response with no parseable verdict counts as predicting the wrong
  class for accuracy and the confusion matrix, and scores 0.5 for AUC;
* AUC is the rank statistic over hard scores (true -> 1.0, false -> 0.0,
  invalid -> 0.5), which equals (TPR+TNR)/2 when every answer parses; with
  a single class present it is reported as 0.5.

The endpoint contract is a generic chat-completion HTTP API: POST
``{base_url}/chat/completions`` with ``{model, messages, temperature}``;
the assistant text is read from the first choice's message content. The
prompt is sent as a single user message with no system prompt.
"""

from __future__ import annotations

import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import requests

from .dataset import DatasetSpec, Problem, build_dataset, derive_seed
from .errors import DomainError, InvalidConfigError, SchemaError, TransportError

#: Sweep grids: operator counts at fixed n=2, event counts at fixed m=2.
OPERATOR_SWEEP_VALUES = (1, 2, 3, 4, 5, 7, 9)
EVENT_SWEEP_VALUES = (2, 3, 4, 5, 7, 9)
SWEEP_CELL_COUNT = 300

_RETRY_ATTEMPTS = 3
_BACKOFF_SECONDS = 0.5
_ANSWER_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model_name: str
    api_key: str | None = None
    temperature: float = 0.0
    timeout: float = 60.0
    max_concurrency: int = 4

    def __post_init__(self):
        if self.temperature < 0:
            raise InvalidConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_concurrency < 1:
            raise InvalidConfigError(
                f"max_concurrency must be >= 1, got {self.max_concurrency}"
            )


@dataclass(frozen=True)
class EvalRecord:
    problem_id: str
    raw_response: str
    parsed: bool | None  # None = invalid
    label: bool
    correct: bool
    error: str | None = None


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    f1: float
    auc: float
    n_total: int
    n_invalid: int
    tp: int
    fp: int
    fn: int
    tn: int


def api_key_from_env(var: str = "OPENAI_API_KEY") -> str | None:
    value = os.environ.get(var, "").strip()
    return value or None


def query_model(cfg: EndpointConfig, prompt: str) -> str:
    """One chat-completion request; the prompt is the sole user message.

    Transient failures (network errors, timeouts, 5xx) are retried up to
    3 attempts with exponential backoff; client errors and malformed
    responses fail immediately.
    """
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"
    payload = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
    }
    last_error: Exception | None = None
    for attempt in range(_RETRY_ATTEMPTS):
        try:
            response = requests.post(
                url, json=payload, headers=headers, timeout=cfg.timeout
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            last_error = exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        else:
            if response.status_code >= 500:
                last_error = TransportError(f"HTTP {response.status_code}")
            elif response.status_code >= 400:
                raise TransportError(
                    f"HTTP {response.status_code}: {response.text[:200]}"
                )
            else:
                try:
                    return response.json()["choices"][0]["message"]["content"]
                except (KeyError, IndexError, TypeError, ValueError) as exc:
                    raise TransportError(f"unexpected response shape: {exc}") from exc
        if attempt + 1 < _RETRY_ATTEMPTS:
            time.sleep(_BACKOFF_SECONDS * 2**attempt)
    raise TransportError(
        f"request failed after {_RETRY_ATTEMPTS} attempts: {last_error}"
    )


def parse_answer(text: str) -> bool | None:
    """Scan for standalone ``true``/``false`` word tokens, case-insensitive.

    Exactly one distinct value present (repeats of the same value are
    fine) gives that value; both or neither give None (invalid).
    """
    seen = {match.group(1).lower() for match in _ANSWER_RE.finditer(text)}
    if seen == {"true"}:
        return True
    if seen == {"false"}:
        return False
    return None


QueryFn = Callable[[EndpointConfig, str], str]


def evaluate_dataset(
    problems: Sequence[Problem], cfg: EndpointConfig, query: QueryFn = query_model
) -> list[EvalRecord]:
    """Query every problem (up to ``cfg.max_concurrency`` in flight) and
    return records aligned 1:1 with the problems, in dataset order.
    Per-problem transport failures are recorded, never raised."""

    def one(problem: Problem) -> EvalRecord:
        try:
            text = query(cfg, problem.prompt)
            error = None
        except Exception as exc:  # recorded per problem, run never aborts
            text = ""
            error = f"{type(exc).__name__}: {exc}"
        parsed = parse_answer(text) if error is None else None
        return EvalRecord(
            problem_id=problem.id,
            raw_response=text,
            parsed=parsed,
            label=problem.label,
            correct=parsed is not None and parsed == problem.label,
            error=error,
        )

    if not problems:
        return []
    with ThreadPoolExecutor(max_workers=cfg.max_concurrency) as pool:
        return list(pool.map(one, problems))


def compute_metrics(records: Sequence[EvalRecord]) -> MetricsReport:
    """Accuracy, F1 (positive class = label true, 0 when undefined), and
    rank-based AUC over hard scores."""
    if not records:
        raise DomainError("no records to score")
    tp = fp = fn = tn = invalid = 0
    for record in records:
        if record.parsed is None:
            invalid += 1
        predicted_true = record.parsed is True or (
            record.parsed is None and not record.label
        )
        if record.label:
            if predicted_true:
                tp += 1
            else:
                fn += 1
        else:
            if predicted_true:
                fp += 1
            else:
                tn += 1
    total = len(records)
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )

    def score(record: EvalRecord) -> float:
        if record.parsed is None:
            return 0.5
        return 1.0 if record.parsed else 0.0

    pos = [score(r) for r in records if r.label]
    neg = [score(r) for r in records if not r.label]
    if not pos or not neg:
        auc = 0.5
    else:
        levels = (0.0, 0.5, 1.0)
        pos_counts = {level: sum(1 for s in pos if s == level) for level in levels}
        neg_counts = {level: sum(1 for s in neg if s == level) for level in levels}
        wins = (
            pos_counts[1.0] * (neg_counts[0.5] + neg_counts[0.0])
            + pos_counts[0.5] * neg_counts[0.0]
        )
        ties = sum(pos_counts[level] * neg_counts[level] for level in levels)
        auc = (wins + 0.5 * ties) / (len(pos) * len(neg))
    return MetricsReport(
        accuracy=accuracy,
        f1=f1,
        auc=auc,
        n_total=total,
        n_invalid=invalid,
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
    )


# --- results persistence ------------------------------------------------------

_PARSED_TO_TEXT = {True: "true", False: "false", None: "invalid"}
_TEXT_TO_PARSED = {"true": True, "false": False, "invalid": None}


def record_to_json(record: EvalRecord) -> dict:
    return {
        "problem_id": record.problem_id,
        "raw_response": record.raw_response,
        "parsed": _PARSED_TO_TEXT[record.parsed],
        "label": record.label,
        "correct": record.correct,
        "error": record.error,
    }


def record_from_json(data: dict) -> EvalRecord:
    try:
        parsed = _TEXT_TO_PARSED[data["parsed"]]
        return EvalRecord(
            problem_id=data["problem_id"],
            raw_response=data["raw_response"],
            parsed=parsed,
            label=bool(data["label"]),
            correct=bool(data["correct"]),
            error=data.get("error"),
        )
    except KeyError as exc:
        raise SchemaError(f"missing or malformed field: {exc}") from exc


def write_records(records: Iterable[EvalRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(
                json.dumps(
                    record_to_json(record), ensure_ascii=False, separators=(",", ":")
                )
            )
            handle.write("\n")


def read_records(path: str | Path) -> list[EvalRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                records.append(record_from_json(data))
            except (json.JSONDecodeError, SchemaError) as exc:
                raise SchemaError(f"line {number}: {exc}", line=number) from exc
    return records


def format_report(metrics: MetricsReport, model_name: str) -> str:
    """Aligned text table with the accuracy / F1 / AUC columns."""
    header = f"{'model':<28}{'accuracy':>10}{'f1':>8}{'auc':>8}{'total':>8}{'invalid':>9}"
    row = (
        f"{model_name:<28}{metrics.accuracy:>10.3f}{metrics.f1:>8.3f}"
        f"{metrics.auc:>8.3f}{metrics.n_total:>8d}{metrics.n_invalid:>9d}"
    )
    return header + "\n" + row


# --- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepCell:
    axis: str
    value: int
    n: int
    m: int
    metrics: MetricsReport


def sweep_dataset_spec(
    axis: str,
    fixed_value: int,
    value: int,
    per_cell_count: int,
    master_seed: int,
    edge_prob: float = 0.5,
) -> DatasetSpec:
    """The balanced per-cell dataset spec; the cell seed derives from the
    sweep seed, axis, and value, so cells are independent of ordering."""
    if axis == "operators":
        n, m = fixed_value, value
    elif axis == "events":
        n, m = value, fixed_value
    else:
        raise InvalidConfigError(f"unknown sweep axis {axis!r}")
    return DatasetSpec(
        count=per_cell_count,
        n=n,
        m=m,
        master_seed=derive_seed(master_seed, "sweep", axis, value),
        edge_prob=edge_prob,
        balanced=True,
    )


def run_sweep(
    axis: str,
    fixed_value: int,
    values: Sequence[int],
    per_cell_count: int,
    cfg: EndpointConfig,
    seed: int,
    query: QueryFn = query_model,
    edge_prob: float = 0.5,
) -> list[SweepCell]:
    """Build and score one balanced dataset per axis value."""
    if not values:
        raise InvalidConfigError("sweep needs at least one axis value")
    cells = []
    for value in values:
        spec = sweep_dataset_spec(
            axis, fixed_value, value, per_cell_count, seed, edge_prob
        )
        problems = build_dataset(spec)
        records = evaluate_dataset(problems, cfg, query=query)
        cells.append(
            SweepCell(
                axis=axis,
                value=value,
                n=spec.n,
                m=spec.m,
                metrics=compute_metrics(records),
            )
        )
    return cells


def sweep_to_csv(cells: Sequence[SweepCell]) -> str:
    """Plot-ready accuracy/AUC curve data, one row per cell."""
    if not cells:
        raise DomainError("no sweep cells to export")
    lines = [f"{cells[0].axis},accuracy,f1,auc,n_total,n_invalid"]
    for cell in cells:
        metrics = cell.metrics
        lines.append(
            f"{cell.value},{metrics.accuracy:.6f},{metrics.f1:.6f},"
            f"{metrics.auc:.6f},{metrics.n_total},{metrics.n_invalid}"
        )
    return "\n".join(lines) + "\n"
