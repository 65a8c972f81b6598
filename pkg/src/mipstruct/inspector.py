"""Contradiction-driven model diagnosis.

Compares a candidate model's optimum against a reference optimum and turns
the deviation into a mechanical verdict:

* candidate worse than reference (for the given sense): the candidate is
  OVER_CONSTRAINED, and mapping the reference optimum into the candidate
  localizes which candidate rows reject it;
* candidate better than reference: UNDER_CONSTRAINED, and mapping the
  candidate optimum into the reference localizes the rows the candidate
  forgot;
* candidate equal to the negated reference: DIRECTION_MISMATCH;
* equal within tolerance: MATCH.

Relative deviation is |a - b| / max(1, |b|) with the reference as b, which
keeps the test defined at b = 0.  If a mapped solution violates nothing
where a contradiction was expected, the report flags the anomaly instead of
guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    InfeasibleCandidateError,
    MissingReferenceValueError,
    NameMapIncompleteError,
)
from .model import Model, ObjSense, ViolationRecord, evaluate_solution


@dataclass(frozen=True)
class DiagnosisReport:
    verdict: str  # MATCH | OVER_CONSTRAINED | UNDER_CONSTRAINED | DIRECTION_MISMATCH
    candidate_objective: float
    reference_objective: float
    violated_in_candidate: tuple[ViolationRecord, ...] = ()
    violated_in_reference: tuple[ViolationRecord, ...] = ()
    anomaly_no_violation: bool = False
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        def violations(records):
            return [
                {
                    "kind": r.kind,
                    "name": r.name,
                    "activity": r.activity,
                    "lower": r.lower,
                    "upper": r.upper,
                }
                for r in records
            ]

        return {
            "verdict": self.verdict,
            "candidate_objective": self.candidate_objective,
            "reference_objective": self.reference_objective,
            "violated_in_candidate": violations(self.violated_in_candidate),
            "violated_in_reference": violations(self.violated_in_reference),
            "anomaly_no_violation": self.anomaly_no_violation,
            "notes": list(self.notes),
        }


def map_solution(sol: dict, name_map: dict | None) -> dict:
    """Rename solution keys through ``name_map`` (identity when None).

    Every key must be mapped; missing keys raise ``NAME_MAP_INCOMPLETE``.
    """
    if name_map is None:
        return dict(sol)
    missing = [k for k in sol if k not in name_map]
    if missing:
        raise NameMapIncompleteError(missing)
    return {name_map[k]: v for k, v in sol.items()}


def _restrict_to_model(sol: dict, model: Model, drop_note: list[str]) -> dict:
    known = {v.name for v in model.variables}
    kept = {k: v for k, v in sol.items() if k in known}
    dropped = sorted(set(sol) - known)
    if dropped:
        drop_note.append(
            f"{len(dropped)} mapped variable(s) absent from the target model "
            f"(first: {dropped[:5]})"
        )
    return kept


def _invert(name_map: dict) -> dict:
    inverted = {}
    for k, v in name_map.items():
        if v in inverted:
            raise NameMapIncompleteError([v])
        inverted[v] = k
    return inverted


def diagnose(
    candidate: Model,
    reference: Model,
    cand_sol: dict,
    ref_sol: dict | None = None,
    ref_objective: float | None = None,
    sense: ObjSense = ObjSense.MIN,
    rel_tol: float = 1e-6,
    name_map: dict | None = None,
) -> DiagnosisReport:
    """Classify the candidate-vs-reference deviation and localize it.

    ``name_map`` translates reference variable names to candidate names;
    its inverse maps the candidate solution back.  The reference objective
    comes from ``ref_sol`` (evaluated on the reference model) or from
    ``ref_objective`` (a stored optimal value); one of the two is required.
    The candidate solution must be feasible for the candidate model.
    """
    cand_obj, cand_violations = evaluate_solution(candidate, cand_sol, rel_tol)
    if cand_violations:
        names = [v.name for v in cand_violations[:5]]
        raise InfeasibleCandidateError(
            f"candidate solution violates its own model (first: {names})"
        )

    if ref_sol is not None:
        ref_obj, _ = evaluate_solution(reference, ref_sol, rel_tol)
    elif ref_objective is not None:
        ref_obj = float(ref_objective)
    else:
        raise MissingReferenceValueError(
            "need ref_sol or ref_objective to know the reference optimum"
        )

    scale = max(1.0, abs(ref_obj))
    notes: list[str] = []
    if abs(cand_obj - ref_obj) <= rel_tol * scale:
        return DiagnosisReport("MATCH", cand_obj, ref_obj)
    if abs(cand_obj + ref_obj) <= rel_tol * scale:
        return DiagnosisReport(
            "DIRECTION_MISMATCH", cand_obj, ref_obj,
            notes=("candidate optimum equals the negated reference optimum",),
        )

    worse = cand_obj > ref_obj if sense is ObjSense.MIN else cand_obj < ref_obj
    if worse:
        # candidate too strict: the reference optimum must contradict it
        violated: tuple[ViolationRecord, ...] = ()
        anomaly = False
        if ref_sol is not None:
            mapped = map_solution(ref_sol, name_map)
            mapped = _restrict_to_model(mapped, candidate, notes)
            _, records = evaluate_solution(candidate, mapped, rel_tol)
            violated = tuple(records)
            anomaly = not records
        else:
            notes.append("no reference solution supplied; cannot localize rows")
        return DiagnosisReport(
            "OVER_CONSTRAINED", cand_obj, ref_obj,
            violated_in_candidate=violated,
            anomaly_no_violation=anomaly,
            notes=tuple(notes),
        )

    inverse = _invert(name_map) if name_map is not None else None
    mapped = map_solution(cand_sol, inverse)
    mapped = _restrict_to_model(mapped, reference, notes)
    _, records = evaluate_solution(reference, mapped, rel_tol)
    return DiagnosisReport(
        "UNDER_CONSTRAINED", cand_obj, ref_obj,
        violated_in_reference=tuple(records),
        anomaly_no_violation=not records,
        notes=tuple(notes),
    )
