"""Evaluation metrics over externally produced run artifacts.

This module never executes anything: artifacts arrive as JSON lines, one
per (instance, attempt), and are scored against stored ground truth.
An instance passes at N if at least one of its first N attempts ran OK and
matched the truth within relative tolerance 1e-6 (the max(1, |truth|) guard
keeps the test defined at truth = 0).  Failed instances carry one error
class -- EXECUTION for a crash, MODELING for a clean run with the wrong
objective, TIMEOUT for hitting the budget -- taken from the first attempt
considered.  Instances whose verification status is INFEASIBLE or OPEN are
excluded from accuracy but still counted in corpus statistics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import NonFiniteError

DEFAULT_REL_TOL = 1e-6

EXIT_STATUSES = ("OK", "CRASH", "TIMEOUT")


def compare_objective(candidate: float, truth: float,
                      rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """|candidate - truth| <= rel_tol * max(1, |truth|), finite inputs only."""
    if not (math.isfinite(candidate) and math.isfinite(truth)):
        raise NonFiniteError(f"non-finite objective pair ({candidate}, {truth})")
    return abs(candidate - truth) <= rel_tol * max(1.0, abs(truth))


@dataclass(frozen=True)
class RunArtifact:
    instance_id: str
    attempt: int
    exit_status: str  # OK | CRASH | TIMEOUT
    reported_objective: float | None = None
    wall_seconds: float = 0.0
    stderr_excerpt: str | None = None

    def __post_init__(self):
        if self.exit_status not in EXIT_STATUSES:
            raise ValueError(f"bad exit status {self.exit_status!r}")
        if self.exit_status == "OK" and self.reported_objective is None:
            raise ValueError("OK artifact must report an objective")

    @staticmethod
    def from_json(doc: dict) -> "RunArtifact":
        return RunArtifact(
            instance_id=doc["instance_id"],
            attempt=int(doc.get("attempt", 0)),
            exit_status=doc["exit_status"],
            reported_objective=doc.get("reported_objective"),
            wall_seconds=float(doc.get("wall_seconds", 0.0)),
            stderr_excerpt=doc.get("stderr_excerpt"),
        )


def load_artifacts(path) -> list[RunArtifact]:
    """Read JSON-lines run artifacts."""
    artifacts = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                artifacts.append(RunArtifact.from_json(json.loads(line)))
    return artifacts


def classify_error(artifact: RunArtifact, truth: float,
                   rel_tol: float = DEFAULT_REL_TOL) -> str | None:
    """EXECUTION | MODELING | TIMEOUT, or None for a clean match."""
    if artifact.exit_status == "CRASH":
        return "EXECUTION"
    if artifact.exit_status == "TIMEOUT":
        return "TIMEOUT"
    if compare_objective(artifact.reported_objective, truth, rel_tol):
        return None
    return "MODELING"


def pass_at_n(artifacts: list[RunArtifact], truth: float, n: int,
              rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """True iff one of the first ``n`` attempts (by attempt index) is an OK
    run matching the truth."""
    ordered = sorted(artifacts, key=lambda a: a.attempt)[:n]
    return any(
        a.exit_status == "OK"
        and compare_objective(a.reported_objective, truth, rel_tol)
        for a in ordered
    )


def bucket_by_scale(size) -> str:
    """Scale bucket from variables + constraints."""
    from .model import ModelStats

    total = size.size if isinstance(size, ModelStats) else int(size)
    if total < 500:
        return "SMALL"
    if total < 1000:
        return "MEDIUM"
    if total < 10000:
        return "LARGE"
    return "VERY_LARGE"


@dataclass(frozen=True)
class InstanceOutcome:
    """Scoring inputs for one instance."""

    instance_id: str
    truth: float | None  # None for INFEASIBLE/OPEN/UNKNOWN instances
    status: str  # verification status
    size: int  # n_vars + n_rows
    artifacts: tuple[RunArtifact, ...]


@dataclass(frozen=True)
class MetricsTable:
    n_instances: int
    n_scored: int
    n_excluded: int
    n_passed: int
    executable_rate: float
    accuracy: float
    accuracy_by_bucket: dict
    error_shares: dict
    error_counts: dict
    raw_counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n_instances": self.n_instances,
            "n_scored": self.n_scored,
            "n_excluded": self.n_excluded,
            "n_passed": self.n_passed,
            "executable_rate": self.executable_rate,
            "accuracy": self.accuracy,
            "accuracy_by_bucket": dict(sorted(self.accuracy_by_bucket.items())),
            "error_shares": dict(sorted(self.error_shares.items())),
            "error_counts": dict(sorted(self.error_counts.items())),
            "raw_counts": dict(sorted(self.raw_counts.items())),
        }

    def to_text(self) -> str:
        lines = [
            f"instances: {self.n_instances} (scored {self.n_scored}, "
            f"excluded {self.n_excluded})",
            f"accuracy: {self.accuracy:.4f} ({self.n_passed}/{self.n_scored})"
            if self.n_scored
            else "accuracy: n/a (nothing scored)",
            f"executability: {self.executable_rate:.4f}",
            "accuracy by scale bucket:",
        ]
        for bucket in ("SMALL", "MEDIUM", "LARGE", "VERY_LARGE"):
            if bucket in self.accuracy_by_bucket:
                acc, count = self.accuracy_by_bucket[bucket]
                lines.append(f"  {bucket:<11} {acc:.4f}  ({count} instances)")
        lines.append("error shares over failed instances:")
        for kind in ("EXECUTION", "MODELING", "TIMEOUT"):
            share = self.error_shares.get(kind, 0.0)
            count = self.error_counts.get(kind, 0)
            lines.append(f"  {kind:<11} {share:.4f}  ({count})")
        return "\n".join(lines) + "\n"


def aggregate(outcomes: list[InstanceOutcome], n: int = 1,
              rel_tol: float = DEFAULT_REL_TOL) -> MetricsTable:
    """Accuracy, per-bucket accuracy, executability, and error-class shares
    normalized over failed instances."""
    outcomes = sorted(outcomes, key=lambda o: o.instance_id)
    scored = [
        o for o in outcomes
        if o.status not in ("INFEASIBLE", "OPEN") and o.truth is not None
    ]
    excluded = len(outcomes) - len(scored)

    passed = 0
    executable = 0
    error_counts = {"EXECUTION": 0, "MODELING": 0, "TIMEOUT": 0}
    bucket_total: dict[str, int] = {}
    bucket_pass: dict[str, int] = {}
    for o in scored:
        considered = sorted(o.artifacts, key=lambda a: a.attempt)[:n]
        if any(a.exit_status == "OK" for a in considered):
            executable += 1
        ok = pass_at_n(list(o.artifacts), o.truth, n, rel_tol)
        bucket = bucket_by_scale(o.size)
        bucket_total[bucket] = bucket_total.get(bucket, 0) + 1
        if ok:
            passed += 1
            bucket_pass[bucket] = bucket_pass.get(bucket, 0) + 1
        else:
            first = considered[0] if considered else None
            kind = (
                classify_error(first, o.truth, rel_tol) if first else "EXECUTION"
            )
            error_counts[kind or "MODELING"] += 1

    failures = sum(error_counts.values())
    error_shares = {
        kind: (count / failures if failures else 0.0)
        for kind, count in error_counts.items()
    }
    accuracy_by_bucket = {
        bucket: (bucket_pass.get(bucket, 0) / total, total)
        for bucket, total in bucket_total.items()
    }
    return MetricsTable(
        n_instances=len(outcomes),
        n_scored=len(scored),
        n_excluded=excluded,
        n_passed=passed,
        executable_rate=(executable / len(scored)) if scored else 0.0,
        accuracy=(passed / len(scored)) if scored else 0.0,
        accuracy_by_bucket=accuracy_by_bucket,
        error_shares=error_shares,
        error_counts=error_counts,
        raw_counts={
            "failures": failures,
            "ok_runs_considered": executable,
        },
    )
