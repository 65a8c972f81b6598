"""MPS reader and canonical writer.

Supported sections: NAME, OBJSENSE, ROWS (N/L/G/E), COLUMNS with
``'MARKER' 'INTORG'/'INTEND'``, RHS, RANGES, BOUNDS (LO, UP, FX, FR, MI, PL,
BV, LI, UI), ENDATA.  Anything else (SOS, QUADOBJ, ...) is rejected with
``UNSUPPORTED_SECTION``.

Dialects:

* ``free``  -- whitespace-separated tokens (MIPLIB 2017 files are free-safe).
* ``fixed`` -- the historical column positions (fields at 2-3, 5-12, 15-22,
  25-36, 40-47, 50-61); names may contain blanks.
* ``auto``  -- sniffs the first 50 data lines and falls back to ``fixed``
  when whitespace tokenization is ambiguous for the section at hand.

Conventions (documented defaults, not configurable unless noted):

* An RHS entry on the objective row stores the negated objective constant.
* Variables inside INTORG/INTEND default to bounds [0, +inf); pass
  ``legacy_int_bounds=True`` for the old [0, 1] convention.
* ``UP`` with a negative value on a variable whose lower bound was never set
  drops the lower bound to -inf (the behavior of the major readers).
* RANGES: L row with rhs b -> [b-|r|, b]; G row -> [b, b+|r|]; E row with
  r >= 0 -> [b, b+r], r < 0 -> [b+r, b].
* Duplicate (column, row) entries are summed; exact zero coefficients are
  dropped, though the column itself stays registered.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass

from .errors import (
    DuplicateNameError,
    MpsSyntaxError,
    UnknownRowError,
    UnsupportedSectionError,
)
from .model import INF, Integrality, Model, ObjSense, Row, Sense, Variable

_SECTIONS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"}
_BOUND_WITH_VALUE = {"LO", "UP", "FX", "LI", "UI"}
_BOUND_NO_VALUE = {"FR", "MI", "PL", "BV"}

# 0-indexed [start, end) character ranges of the six fixed-format fields.
_FIXED_FIELDS = ((1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61))


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if isinstance(source, os.PathLike):
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    raise TypeError(f"cannot read MPS from {type(source).__name__}")


def _is_comment(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("*")


def _parse_number(token: str, lineno: int, col: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MpsSyntaxError(lineno, col, f"expected a number, got {token!r}") from None


def _fixed_tokens(line: str) -> list[str]:
    out = []
    for start, end in _FIXED_FIELDS:
        tok = line[start:end].strip()
        if tok:
            out.append(tok)
    return out


def _sniff_free_safe(lines: list[str]) -> bool:
    """True when whitespace splitting is unambiguous on the first 50 data lines."""
    section = None
    checked = 0
    for line in lines:
        if _is_comment(line):
            continue
        if not line[0].isspace():
            section = line.split()[0].upper()
            continue
        if checked >= 50:
            break
        checked += 1
        toks = line.split()
        if section == "ROWS":
            if len(toks) != 2:
                return False
        elif section == "COLUMNS":
            if len(toks) >= 2 and toks[1] == "'MARKER'":
                continue
            if len(toks) not in (3, 5):
                return False
            if not _all_numeric(toks[2::2]):
                return False
        elif section in ("RHS", "RANGES"):
            if len(toks) in (3, 5):
                ok = _all_numeric(toks[2::2])
            elif len(toks) in (2, 4):
                ok = _all_numeric(toks[1::2])
            else:
                ok = False
            if not ok:
                return False
        elif section == "BOUNDS":
            kind = toks[0].upper() if toks else ""
            if kind in _BOUND_WITH_VALUE:
                if len(toks) not in (3, 4) or not _all_numeric(toks[-1:]):
                    return False
            elif kind in _BOUND_NO_VALUE:
                if len(toks) not in (2, 3):
                    return False
            else:
                return False
    return True


def _all_numeric(tokens) -> bool:
    for tok in tokens:
        try:
            float(tok)
        except ValueError:
            return False
    return True


@dataclass
class _PendingVar:
    name: str
    order: int
    integer: bool
    lower: float | None = None  # None means "never touched by BOUNDS"
    upper: float | None = None
    integrality: Integrality | None = None  # set by BV/LI/UI


class _Parser:
    def __init__(self, text: str, dialect: str, legacy_int_bounds: bool,
                 require_endata: bool):
        self.lines = text.splitlines()
        self.legacy_int_bounds = legacy_int_bounds
        self.require_endata = require_endata
        if dialect == "auto":
            dialect = "free" if _sniff_free_safe(self.lines) else "fixed"
        self.dialect = dialect

        self.name = ""
        self.objsense: ObjSense | None = None
        self.row_order: list[tuple[str, Sense]] = []
        self.row_set: dict[str, Sense] = {}
        self.objective_row: str | None = None
        self.cols: dict[str, _PendingVar] = {}
        self.col_terms: dict[str, list[tuple[str, float]]] = {}
        self.rhs: dict[str, float] = {}
        self.obj_constant = 0.0
        self.ranges: dict[str, float] = {}
        self.saw_endata = False

    # -- tokenization -----------------------------------------------------

    def tokens(self, line: str) -> list[str]:
        if self.dialect == "fixed":
            return _fixed_tokens(line)
        return line.split()

    # -- driver ------------------------------------------------------------

    def parse(self) -> Model:
        section = None
        in_integer = False
        for lineno0, raw in enumerate(self.lines):
            lineno = lineno0 + 1
            if _is_comment(raw):
                continue
            if not raw[0].isspace():
                header = raw.split()
                keyword = header[0].upper()
                if keyword not in _SECTIONS:
                    raise UnsupportedSectionError(keyword, lineno)
                if keyword == "ENDATA":
                    self.saw_endata = True
                    break
                section = keyword
                if keyword == "NAME":
                    self.name = header[1] if len(header) > 1 else ""
                elif keyword == "OBJSENSE" and len(header) > 1:
                    self._set_objsense(header[1], lineno)
                continue
            if section is None:
                raise MpsSyntaxError(lineno, 1, "data line before any section header")
            toks = self.tokens(raw)
            if not toks:
                continue
            if section == "OBJSENSE":
                self._set_objsense(toks[0], lineno)
            elif section == "NAME":
                raise MpsSyntaxError(lineno, 1, "unexpected data in NAME section")
            elif section == "ROWS":
                self._parse_row(toks, lineno)
            elif section == "COLUMNS":
                in_integer = self._parse_column(toks, lineno, in_integer)
            elif section == "RHS":
                self._parse_rhs(toks, lineno)
            elif section == "RANGES":
                self._parse_ranges(toks, lineno)
            elif section == "BOUNDS":
                self._parse_bounds(toks, lineno)
        if self.require_endata and not self.saw_endata:
            raise MpsSyntaxError(len(self.lines), 1, "missing ENDATA")
        return self._assemble()

    def _set_objsense(self, token: str, lineno: int) -> None:
        token = token.upper()
        if token in ("MAX", "MAXIMIZE"):
            self.objsense = ObjSense.MAX
        elif token in ("MIN", "MINIMIZE"):
            self.objsense = ObjSense.MIN
        else:
            raise MpsSyntaxError(lineno, 1, f"bad OBJSENSE value {token!r}")

    # -- sections ----------------------------------------------------------

    def _parse_row(self, toks: list[str], lineno: int) -> None:
        if len(toks) != 2:
            raise MpsSyntaxError(lineno, 1, "ROWS line needs sense and name")
        sense_tok, name = toks[0].upper(), toks[1]
        try:
            sense = Sense(sense_tok)
        except ValueError:
            raise MpsSyntaxError(lineno, 1, f"bad row sense {sense_tok!r}") from None
        if name in self.row_set:
            raise DuplicateNameError(f"row {name!r} redefined at line {lineno}")
        self.row_set[name] = sense
        self.row_order.append((name, sense))
        if sense is Sense.N and self.objective_row is None:
            self.objective_row = name

    def _parse_column(self, toks: list[str], lineno: int, in_integer: bool) -> bool:
        if len(toks) >= 3 and toks[1] == "'MARKER'":
            marker = toks[-1].strip("'").upper()
            if marker == "INTORG":
                return True
            if marker == "INTEND":
                return False
            raise MpsSyntaxError(lineno, 1, f"unknown marker {toks[-1]!r}")
        if len(toks) not in (3, 5):
            raise MpsSyntaxError(lineno, 1, "COLUMNS line needs 1 or 2 (row, value) pairs")
        col = toks[0]
        if col not in self.cols:
            self.cols[col] = _PendingVar(col, len(self.cols), in_integer)
            self.col_terms[col] = []
        for i in range(1, len(toks), 2):
            row, value = toks[i], _parse_number(toks[i + 1], lineno, i + 2)
            if row not in self.row_set:
                raise UnknownRowError(f"row {row!r} at line {lineno} was never declared")
            self.col_terms[col].append((row, value))
        return in_integer

    def _pairs(self, toks: list[str], lineno: int) -> list[tuple[str, float]]:
        """(row, value) pairs of an RHS/RANGES line, set name tolerated."""
        if len(toks) in (3, 5):
            toks = toks[1:]
        if len(toks) not in (2, 4):
            raise MpsSyntaxError(lineno, 1, "expected (row, value) pairs")
        out = []
        for i in range(0, len(toks), 2):
            out.append((toks[i], _parse_number(toks[i + 1], lineno, i + 2)))
        return out

    def _parse_rhs(self, toks: list[str], lineno: int) -> None:
        for row, value in self._pairs(toks, lineno):
            if row not in self.row_set:
                raise UnknownRowError(f"row {row!r} at line {lineno} was never declared")
            if row == self.objective_row:
                self.obj_constant = -value
            else:
                self.rhs[row] = value

    def _parse_ranges(self, toks: list[str], lineno: int) -> None:
        for row, value in self._pairs(toks, lineno):
            if row not in self.row_set:
                raise UnknownRowError(f"row {row!r} at line {lineno} was never declared")
            if self.row_set[row] is Sense.N:
                raise MpsSyntaxError(lineno, 1, f"RANGES entry on N row {row!r}")
            self.ranges[row] = value

    def _parse_bounds(self, toks: list[str], lineno: int) -> None:
        kind = toks[0].upper()
        if kind in _BOUND_WITH_VALUE:
            if len(toks) == 4:
                col, value = toks[2], _parse_number(toks[3], lineno, 4)
            elif len(toks) == 3:
                col, value = toks[1], _parse_number(toks[2], lineno, 3)
            else:
                raise MpsSyntaxError(lineno, 1, f"bad {kind} bound line")
        elif kind in _BOUND_NO_VALUE:
            if len(toks) == 3:
                col = toks[2]
            elif len(toks) == 2:
                col = toks[1]
            else:
                raise MpsSyntaxError(lineno, 1, f"bad {kind} bound line")
            value = 0.0
        else:
            raise MpsSyntaxError(lineno, 1, f"unknown bound type {toks[0]!r}")
        if col not in self.cols:
            raise MpsSyntaxError(lineno, 1, f"bound on unknown column {col!r}")
        v = self.cols[col]
        if kind == "LO":
            v.lower = value
        elif kind == "UP":
            if value < 0 and v.lower is None and not v.integer:
                v.lower = -INF
            v.upper = value
        elif kind == "FX":
            v.lower = v.upper = value
        elif kind == "FR":
            v.lower, v.upper = -INF, INF
        elif kind == "MI":
            v.lower = -INF
        elif kind == "PL":
            v.upper = INF
        elif kind == "BV":
            v.integrality = Integrality.BINARY
            v.lower, v.upper = 0.0, 1.0
        elif kind == "LI":
            v.integrality = Integrality.INTEGER
            v.lower = value
        elif kind == "UI":
            v.integrality = Integrality.INTEGER
            v.upper = value

    # -- assembly ----------------------------------------------------------

    def _assemble(self) -> Model:
        if self.objective_row is None:
            raise MpsSyntaxError(1, 1, "no N row found; objective row required")

        variables = []
        for col in self.cols.values():
            if col.integrality is not None:
                integrality = col.integrality
            elif col.integer:
                integrality = Integrality.INTEGER
            else:
                integrality = Integrality.CONTINUOUS
            if integrality is Integrality.CONTINUOUS:
                default_lower, default_upper = 0.0, INF
            elif integrality is Integrality.BINARY:
                default_lower, default_upper = 0.0, 1.0
            elif self.legacy_int_bounds:
                default_lower, default_upper = 0.0, 1.0
            else:
                default_lower, default_upper = 0.0, INF
            lower = default_lower if col.lower is None else col.lower
            upper = default_upper if col.upper is None else col.upper
            variables.append(Variable(col.name, lower, upper, integrality))
        var_index = {v.name: i for i, v in enumerate(variables)}

        accum: dict[str, dict[int, float]] = {name: {} for name, _ in self.row_order}
        for col, pairs in self.col_terms.items():
            j = var_index[col]
            for row, value in pairs:
                accum[row][j] = accum[row].get(j, 0.0) + value

        rows = []
        objective_row_index = -1
        for name, sense in self.row_order:
            terms = tuple(sorted((j, c) for j, c in accum[name].items() if c != 0.0))
            rows.append(Row(name, sense, self.rhs.get(name, 0.0),
                            self.ranges.get(name), terms))
            if name == self.objective_row:
                objective_row_index = len(rows) - 1

        model = Model(
            name=self.name,
            variables=tuple(variables),
            rows=tuple(rows),
            objective_row_index=objective_row_index,
            objective_sense=self.objsense or ObjSense.MIN,
            objective_constant=self.obj_constant,
        )
        model.validate()
        return model


def parse_mps(source, dialect: str = "auto", legacy_int_bounds: bool = False,
              require_endata: bool = True,
              objective_sense: ObjSense | None = None) -> Model:
    """Parse an MPS document into a :class:`Model`.

    ``source`` may be text, bytes, a path, or a file object.  ``dialect`` is
    one of ``auto``, ``free``, ``fixed``.  ``objective_sense`` overrides both
    the MIN default and any OBJSENSE section (CLI flag hook).
    """
    if dialect not in ("auto", "free", "fixed"):
        raise ValueError(f"unknown dialect {dialect!r}")
    model = _Parser(_read_text(source), dialect, legacy_int_bounds,
                    require_endata).parse()
    if objective_sense is not None and objective_sense is not model.objective_sense:
        model = Model(
            name=model.name,
            variables=model.variables,
            rows=model.rows,
            objective_row_index=model.objective_row_index,
            objective_sense=objective_sense,
            objective_constant=model.objective_constant,
        )
    return model


# ---------------------------------------------------------------------------
# canonical writer


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def serialize_model(model: Model) -> str:
    """Emit canonical free-format MPS: one (row, value) pair per COLUMNS
    line, rows and columns in first-appearance order, shortest round-trip
    numbers.  Parsing the output reproduces the model exactly."""
    for v in model.variables:
        if any(ch.isspace() for ch in v.name):
            raise ValueError(f"free format cannot represent name {v.name!r}")
    for r in model.rows:
        if any(ch.isspace() for ch in r.name):
            raise ValueError(f"free format cannot represent name {r.name!r}")

    out = [f"NAME {model.name}".rstrip()]
    if model.objective_sense is ObjSense.MAX:
        out.append("OBJSENSE MAX")
    out.append("ROWS")
    for row in model.rows:
        out.append(f" {row.sense.value} {row.name}")

    obj_name = model.objective.name
    by_var: dict[int, list[tuple[str, float]]] = {}
    for row in model.rows:
        for j, coeff in row.terms:
            by_var.setdefault(j, []).append((row.name, coeff))

    out.append("COLUMNS")
    marker = 0
    in_integer = False
    for j, var in enumerate(model.variables):
        wants_integer = var.integrality is not Integrality.CONTINUOUS
        if wants_integer and not in_integer:
            marker += 1
            out.append(f" M{marker} 'MARKER' 'INTORG'")
            in_integer = True
        elif not wants_integer and in_integer:
            marker += 1
            out.append(f" M{marker} 'MARKER' 'INTEND'")
            in_integer = False
        entries = by_var.get(j, [])
        if not entries:
            entries = [(obj_name, 0.0)]  # register an otherwise empty column
        for row_name, coeff in entries:
            out.append(f" {var.name} {row_name} {_fmt(coeff)}")
    if in_integer:
        marker += 1
        out.append(f" M{marker} 'MARKER' 'INTEND'")

    rhs_lines = []
    if model.objective_constant != 0.0:
        rhs_lines.append(f" RHS1 {obj_name} {_fmt(-model.objective_constant)}")
    for i, row in enumerate(model.rows):
        if i != model.objective_row_index and row.rhs != 0.0:
            rhs_lines.append(f" RHS1 {row.name} {_fmt(row.rhs)}")
    if rhs_lines:
        out.append("RHS")
        out.extend(rhs_lines)

    range_lines = [f" RNG1 {row.name} {_fmt(row.range)}"
                   for row in model.rows if row.range is not None]
    if range_lines:
        out.append("RANGES")
        out.extend(range_lines)

    bound_lines = []
    for var in model.variables:
        bound_lines.extend(_bound_entries(var))
    if bound_lines:
        out.append("BOUNDS")
        out.extend(bound_lines)

    out.append("ENDATA")
    return "\n".join(out) + "\n"


def _bound_entries(var: Variable) -> list[str]:
    name = var.name
    lo, up = var.lower, var.upper
    lines = []
    if var.integrality is Integrality.BINARY:
        lines.append(f" BV BND1 {name}")
        if lo == up:
            if lo != 0.0 or up != 1.0:
                lines.append(f" FX BND1 {name} {_fmt(lo)}")
        else:
            if lo != 0.0:
                lines.append(f" LO BND1 {name} {_fmt(lo)}")
            if up != 1.0:
                lines.append(f" UP BND1 {name} {_fmt(up)}")
        return lines
    # CONTINUOUS and INTEGER both default to [0, +inf) on reparse
    if lo == 0.0 and up == INF:
        return lines
    if lo == -INF and up == INF:
        lines.append(f" FR BND1 {name}")
        return lines
    if lo == up:
        lines.append(f" FX BND1 {name} {_fmt(lo)}")
        return lines
    if lo == -INF:
        lines.append(f" MI BND1 {name}")
    elif lo != 0.0:
        lines.append(f" LO BND1 {name} {_fmt(lo)}")
    elif up < 0:
        lines.append(f" LO BND1 {name} 0")  # guard the negative-UP convention
    if up != INF:
        lines.append(f" UP BND1 {name} {_fmt(up)}")
    return lines
