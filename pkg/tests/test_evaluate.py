import math
import random

import pytest
from hypothesis import given, strategies as st

from mipstruct.errors import UnknownVariableError
from mipstruct.model import (
    Integrality,
    ModelBuilder,
    ObjSense,
    Sense,
    evaluate_solution,
)
from mipstruct.mps_io import parse_mps

from conftest import build_random_binary_model


def test_all_zero_violates(two_var_mps):
    model = parse_mps(two_var_mps)
    objective, violations = evaluate_solution(model, {}, 1e-6)
    assert objective == 0.0
    assert [v.name for v in violations] == ["c1"]
    assert violations[0].kind == "row"
    assert violations[0].activity == 0.0


def test_feasible_point(two_var_mps):
    model = parse_mps(two_var_mps)
    objective, violations = evaluate_solution(model, {"x1": 1.0, "x2": 0.0}, 1e-6)
    assert objective == 1.0
    assert violations == []


def test_missing_variables_default_zero(two_var_mps):
    model = parse_mps(two_var_mps)
    objective, violations = evaluate_solution(model, {"x1": 1.0}, 1e-6)
    assert objective == 1.0
    assert violations == []


def test_unknown_variable_rejected(two_var_mps):
    model = parse_mps(two_var_mps)
    with pytest.raises(UnknownVariableError):
        evaluate_solution(model, {"nope": 1.0}, 1e-6)


def test_objective_constant_included():
    b = ModelBuilder(name="m", constant=10.0)
    b.add_variable("x", 0, 5, obj=2.0)
    objective, _ = evaluate_solution(b.build(), {"x": 3.0}, 1e-6)
    assert objective == 16.0


def test_bound_and_integrality_violations():
    b = ModelBuilder(name="m")
    b.add_variable("x", 0, 5, Integrality.INTEGER, obj=1.0)
    model = b.build()
    _, violations = evaluate_solution(model, {"x": 6.5}, 1e-6)
    kinds = sorted(v.kind for v in violations)
    assert kinds == ["bound", "integrality"]
    _, ok = evaluate_solution(model, {"x": 5.0}, 1e-6)
    assert ok == []


def test_row_tolerance_scales_with_bounds():
    b = ModelBuilder(name="m")
    b.add_variable("x", 0, 2000, obj=1.0)
    b.add_row("c", Sense.L, {"x": 1.0}, 1000.0)
    model = b.build()
    tol = 1e-6
    # slack is tol * max(1, |lo|, |hi|) = 1e-3 here
    _, inside = evaluate_solution(model, {"x": 1000.0005}, tol)
    assert all(v.kind != "row" for v in inside)
    _, outside = evaluate_solution(model, {"x": 1000.1}, tol)
    assert any(v.kind == "row" and v.name == "c" for v in outside)


def test_random_models_match_independent_recompute():
    """Violation set equals a from-scratch per-row re-evaluation."""
    rng = random.Random(20240601)
    for trial in range(20):
        model = build_random_binary_model(rng, 6, 20, name=f"t{trial}")
        sol = {f"x_{j}": float(rng.randint(0, 1)) for j in range(1, 7)}
        tol = 1e-9
        _, violations = evaluate_solution(model, sol, tol)
        reported = {v.name for v in violations if v.kind == "row"}

        expected = set()
        for row in model.rows:
            if row.sense is Sense.N:
                continue
            activity = 0.0
            for j, coeff in row.terms:
                activity += coeff * sol.get(model.variables[j].name, 0.0)
            lo, hi = row.bounds()
            scale = max(
                1.0,
                abs(lo) if math.isfinite(lo) else 0.0,
                abs(hi) if math.isfinite(hi) else 0.0,
            )
            if activity < lo - tol * scale or activity > hi + tol * scale:
                expected.add(row.name)
        assert reported == expected


def test_reported_violations_confirmed_by_direct_arithmetic():
    """No false positives: re-checking any reported row confirms it."""
    rng = random.Random(7)
    for trial in range(10):
        model = build_random_binary_model(rng, 5, 12, name=f"c{trial}")
        sol = {f"x_{j}": float(rng.randint(0, 1)) for j in range(1, 6)}
        _, violations = evaluate_solution(model, sol, 1e-6)
        for v in violations:
            if v.kind != "row":
                continue
            row = model.rows[model.row_index(v.name)]
            activity = sum(
                c * sol.get(model.variables[j].name, 0.0) for j, c in row.terms
            )
            lo, hi = row.bounds()
            assert activity < lo or activity > hi


@given(st.floats(min_value=-4, max_value=4, allow_nan=False))
def test_objective_is_linear(alpha):
    b = ModelBuilder(name="m", constant=3.0)
    b.add_variable("x", -100, 100, obj=2.0)
    b.add_variable("y", -100, 100, obj=-1.5)
    model = b.build()
    base = {"x": 1.25, "y": 2.0}
    scaled = {k: alpha * v for k, v in base.items()}
    obj_base, _ = evaluate_solution(model, base, 1e-6)
    obj_scaled, _ = evaluate_solution(model, scaled, 1e-6)
    assert obj_scaled == pytest.approx(alpha * (obj_base - 3.0) + 3.0, abs=1e-9)
