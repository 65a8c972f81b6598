"""Immutable in-memory MILP: variables, sparse rows, objective, evaluation.

The model is the flat solver-level formulation: every constraint is one
explicit algebraic row, every variable carries bounds and integrality.
Structure recovery happens elsewhere; this module only stores and evaluates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DuplicateNameError, UnknownVariableError

INF = math.inf


class Integrality(enum.Enum):
    CONTINUOUS = "CONTINUOUS"
    INTEGER = "INTEGER"
    BINARY = "BINARY"


class Sense(enum.Enum):
    """Row sense as written in the ROWS section."""

    L = "L"
    G = "G"
    E = "E"
    N = "N"


class ObjSense(enum.Enum):
    MIN = "MIN"
    MAX = "MAX"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = INF
    integrality: Integrality = Integrality.CONTINUOUS

    @property
    def is_binary(self) -> bool:
        """Binary either by declaration or by integer bounds within {0,1}."""
        if self.integrality is Integrality.BINARY:
            return True
        return (
            self.integrality is Integrality.INTEGER
            and self.lower >= 0.0
            and self.upper <= 1.0
        )


@dataclass(frozen=True)
class Row:
    name: str
    sense: Sense
    rhs: float = 0.0
    range: float | None = None
    # (variable index, coefficient), sorted by variable index, no duplicates,
    # exact zeros dropped at construction time.
    terms: tuple[tuple[int, float], ...] = ()

    def bounds(self) -> tuple[float, float]:
        """Activity interval [lo, hi] implied by sense, rhs and range."""
        if self.sense is Sense.L:
            lo, hi = -INF, self.rhs
            if self.range is not None:
                lo = self.rhs - abs(self.range)
        elif self.sense is Sense.G:
            lo, hi = self.rhs, INF
            if self.range is not None:
                hi = self.rhs + abs(self.range)
        elif self.sense is Sense.E:
            lo = hi = self.rhs
            if self.range is not None:
                if self.range >= 0:
                    hi = self.rhs + self.range
                else:
                    lo = self.rhs + self.range
        else:  # N rows carry no activity bounds
            lo, hi = -INF, INF
        return lo, hi


@dataclass(frozen=True)
class Model:
    name: str
    variables: tuple[Variable, ...]
    rows: tuple[Row, ...]
    objective_row_index: int
    objective_sense: ObjSense = ObjSense.MIN
    objective_constant: float = 0.0
    _var_index: dict = field(default_factory=dict, repr=False, compare=False)
    _row_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_var_index", {v.name: i for i, v in enumerate(self.variables)}
        )
        object.__setattr__(
            self, "_row_index", {r.name: i for i, r in enumerate(self.rows)}
        )

    # -- lookups -----------------------------------------------------------

    def variable_index(self, name: str) -> int:
        return self._var_index[name]

    def row_index(self, name: str) -> int:
        return self._row_index[name]

    @property
    def objective(self) -> Row:
        return self.rows[self.objective_row_index]

    def constraint_rows(self) -> Iterable[tuple[int, Row]]:
        """All rows that constrain the feasible region (every non-N row)."""
        for i, row in enumerate(self.rows):
            if row.sense is not Sense.N:
                yield i, row

    def validate(self) -> None:
        if len(self._var_index) != len(self.variables):
            raise DuplicateNameError("duplicate variable name")
        if len(self._row_index) != len(self.rows):
            raise DuplicateNameError("duplicate row name")
        obj = self.rows[self.objective_row_index]
        if obj.sense is not Sense.N:
            raise ValueError("objective row must have sense N")
        n = len(self.variables)
        for row in self.rows:
            prev = -1
            for j, coeff in row.terms:
                if not 0 <= j < n:
                    raise ValueError(f"row {row.name}: bad variable index {j}")
                if j <= prev:
                    raise ValueError(f"row {row.name}: terms unsorted or duplicated")
                prev = j
        for v in self.variables:
            if v.lower > v.upper:
                raise ValueError(f"variable {v.name}: lower > upper")
            if v.integrality is Integrality.BINARY and not (
                v.lower >= 0.0 and v.upper <= 1.0
            ):
                raise ValueError(f"variable {v.name}: binary bounds outside [0,1]")


@dataclass(frozen=True)
class ModelStats:
    n_vars: int
    n_rows: int  # constraint rows, objective excluded
    n_nonzeros: int  # constraint terms plus objective terms
    n_integer: int
    n_binary: int

    @property
    def size(self) -> int:
        """Variables plus constraints; the scale metric used downstream."""
        return self.n_vars + self.n_rows


def model_stats(model: Model) -> ModelStats:
    n_rows = 0
    nnz = len(model.objective.terms)
    for _, row in model.constraint_rows():
        n_rows += 1
        nnz += len(row.terms)
    n_bin = sum(1 for v in model.variables if v.integrality is Integrality.BINARY)
    n_int = sum(1 for v in model.variables if v.integrality is Integrality.INTEGER)
    return ModelStats(
        n_vars=len(model.variables),
        n_rows=n_rows,
        n_nonzeros=nnz,
        n_integer=n_int,
        n_binary=n_bin,
    )


@dataclass(frozen=True)
class ViolationRecord:
    kind: str  # "row" | "bound" | "integrality"
    name: str
    activity: float
    lower: float
    upper: float


def _interval_tol(lo: float, hi: float, tol: float) -> float:
    """Absolute slack for [lo, hi]: tol * max(1, finite |lo|, finite |hi|)."""
    scale = 1.0
    if math.isfinite(lo):
        scale = max(scale, abs(lo))
    if math.isfinite(hi):
        scale = max(scale, abs(hi))
    return tol * scale


def evaluate_solution(
    model: Model, sol: Mapping[str, float], tol: float = 1e-6
) -> tuple[float, list[ViolationRecord]]:
    """Evaluate ``sol`` against ``model``.

    Returns the objective value (constant included) and the list of violated
    rows, variable bounds, and integrality requirements.  Variables absent
    from ``sol`` are taken as 0; keys that name no model variable raise
    ``UnknownVariableError``.
    """
    unknown = [k for k in sol if k not in model._var_index]
    if unknown:
        raise UnknownVariableError(f"not model variables: {sorted(unknown)[:10]}")

    x = [0.0] * len(model.variables)
    for name, value in sol.items():
        x[model.variable_index(name)] = float(value)

    violations: list[ViolationRecord] = []

    for i, v in enumerate(model.variables):
        xi = x[i]
        btol = _interval_tol(v.lower, v.upper, tol)
        if xi < v.lower - btol or xi > v.upper + btol:
            violations.append(
                ViolationRecord("bound", v.name, xi, v.lower, v.upper)
            )
        if v.integrality is not Integrality.CONTINUOUS:
            if abs(xi - round(xi)) > tol:
                violations.append(
                    ViolationRecord("integrality", v.name, xi, round(xi), round(xi))
                )

    for _, row in model.constraint_rows():
        activity = sum(c * x[j] for j, c in row.terms)
        lo, hi = row.bounds()
        rtol = _interval_tol(lo, hi, tol)
        if activity < lo - rtol or activity > hi + rtol:
            violations.append(ViolationRecord("row", row.name, activity, lo, hi))

    objective = model.objective_constant + sum(
        c * x[j] for j, c in model.objective.terms
    )
    return objective, violations


class ModelBuilder:
    """Incremental construction helper used by generators and tests."""

    def __init__(self, name: str = "model", objective_name: str = "obj",
                 sense: ObjSense = ObjSense.MIN, constant: float = 0.0):
        self.name = name
        self.objective_name = objective_name
        self.sense = sense
        self.constant = constant
        self._vars: list[Variable] = []
        self._var_index: dict[str, int] = {}
        self._obj_terms: dict[str, float] = {}
        self._rows: list[tuple[str, Sense, float, float | None, dict[str, float]]] = []

    def add_variable(self, name, lower=0.0, upper=INF,
                     integrality=Integrality.CONTINUOUS, obj=0.0):
        if name in self._var_index:
            raise DuplicateNameError(f"variable {name}")
        self._var_index[name] = len(self._vars)
        self._vars.append(Variable(name, float(lower), float(upper), integrality))
        if obj:
            self._obj_terms[name] = float(obj)
        return self

    def add_binary(self, name, obj=0.0):
        return self.add_variable(name, 0.0, 1.0, Integrality.BINARY, obj)

    def add_row(self, name, sense: Sense, terms: Mapping[str, float],
                rhs: float = 0.0, range_: float | None = None):
        self._rows.append((name, sense, float(rhs), range_, dict(terms)))
        return self

    def set_bounds(self, name, lower=None, upper=None):
        i = self._var_index[name]
        v = self._vars[i]
        self._vars[i] = Variable(
            v.name,
            v.lower if lower is None else float(lower),
            v.upper if upper is None else float(upper),
            v.integrality,
        )
        return self

    def build(self) -> Model:
        def pack(terms: Mapping[str, float]) -> tuple[tuple[int, float], ...]:
            pairs = []
            for vname, coeff in terms.items():
                c = float(coeff)
                if c == 0.0:
                    continue
                pairs.append((self._var_index[vname], c))
            pairs.sort()
            return tuple(pairs)

        rows = [Row(self.objective_name, Sense.N, 0.0, None, pack(self._obj_terms))]
        for name, sense, rhs, range_, terms in self._rows:
            rows.append(Row(name, sense, rhs, range_, pack(terms)))
        model = Model(
            name=self.name,
            variables=tuple(self._vars),
            rows=tuple(rows),
            objective_row_index=0,
            objective_sense=self.sense,
            objective_constant=self.constant,
        )
        model.validate()
        return model
