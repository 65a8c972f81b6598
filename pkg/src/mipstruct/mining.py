"""Recover indexed variable groups and repeated constraint families.

Flat MPS rows carry two cheap structural signals: the naming scheme of
variables and rows (``b64_713``, ``x#3#12``, ``bal_2_4``) and the algebraic
template of each row.  Variables partition by (name base, index arity).
Constraint rows partition primarily by row-name blocks, refined by template
compatibility (sense plus the set of (variable group, coefficient sign)
buckets), so that one loop's output lands in one family even when supports
or coefficients differ row to row.

Packed composite indices (a ``713`` that means (7,1,3)) are *not*
decomposed; disambiguating them needs domain knowledge no name carries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .model import Model, Row, Sense

_DELIMS = set("_#()[],.")

VARIES = "VARIES"


@dataclass(frozen=True)
class NameToken:
    base: str
    indices: tuple[str, ...]
    delimiters: tuple[str, ...]  # delimiter text preceding each index ('' allowed)
    suffix: str = ""

    def reconstruct(self) -> str:
        parts = [self.base]
        for delim, idx in zip(self.delimiters, self.indices):
            parts.append(delim)
            parts.append(idx)
        parts.append(self.suffix)
        return "".join(parts)

    @property
    def arity(self) -> int:
        return len(self.indices)


@lru_cache(maxsize=65536)
def tokenize_name(name: str) -> NameToken:
    """Split a name into base and index tokens.

    Splits on the delimiters ``_ # ( ) [ ] , .`` and on alphabetic-to-numeric
    boundaries.  The base is the leading maximal alphabetic run; everything
    after it becomes an index token.  Worst case (no delimiters, no digits)
    the whole name is the base.
    """
    if not name:
        raise ValueError("empty name")
    n = len(name)
    pos = 0
    base = []
    while pos < n and name[pos].isalpha():
        base.append(name[pos])
        pos += 1
    indices: list[str] = []
    delims: list[str] = []
    suffix = ""
    while pos < n:
        d = []
        while pos < n and name[pos] in _DELIMS:
            d.append(name[pos])
            pos += 1
        if pos == n:
            suffix = "".join(d)
            break
        tok = [name[pos]]
        is_digit = name[pos].isdigit()
        pos += 1
        while pos < n and name[pos] not in _DELIMS and name[pos].isdigit() == is_digit:
            tok.append(name[pos])
            pos += 1
        delims.append("".join(d))
        indices.append("".join(tok))
    return NameToken("".join(base), tuple(indices), tuple(delims), suffix)


@dataclass(frozen=True)
class IndexDomain:
    values: tuple[str, ...]  # distinct observed tokens, sorted
    numeric_min: int | None
    numeric_max: int | None

    @property
    def all_numeric(self) -> bool:
        return self.numeric_min is not None


def _index_domain(values: set[str]) -> IndexDomain:
    ordered = tuple(sorted(values))
    if ordered and all(v.isdigit() for v in ordered):
        nums = [int(v) for v in ordered]
        return IndexDomain(ordered, min(nums), max(nums))
    return IndexDomain(ordered, None, None)


@dataclass(frozen=True)
class VariableGroup:
    id: int
    base: str
    arity: int
    members: tuple[int, ...]  # variable indices, appearance order
    index_domains: tuple[IndexDomain, ...]


def infer_variable_groups(model: Model) -> list[VariableGroup]:
    """Partition variables by (name base, index arity), appearance-ordered."""
    buckets: dict[tuple[str, int], list[int]] = {}
    order: list[tuple[str, int]] = []
    for j, var in enumerate(model.variables):
        tok = tokenize_name(var.name)
        key = (tok.base, tok.arity)
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(j)
    groups = []
    for gid, key in enumerate(order):
        members = buckets[key]
        arity = key[1]
        per_pos: list[set[str]] = [set() for _ in range(arity)]
        for j in members:
            tok = tokenize_name(model.variables[j].name)
            for p, value in enumerate(tok.indices):
                per_pos[p].add(value)
        groups.append(
            VariableGroup(
                id=gid,
                base=key[0],
                arity=arity,
                members=tuple(members),
                index_domains=tuple(_index_domain(s) for s in per_pos),
            )
        )
    return groups


def group_of(groups: list[VariableGroup]) -> dict[int, int]:
    """variable index -> group id"""
    out = {}
    for g in groups:
        for j in g.members:
            out[j] = g.id
    return out


@dataclass(frozen=True)
class RowSignature:
    sense: Sense
    # ((group id, sign, coefficient class, count), ...) sorted; coefficient
    # class is the exact shared constant or VARIES; ``count`` is the per-row
    # term count of the bucket, or VARIES when supports differ across rows.
    term_pattern: tuple[tuple[int, int, object, object], ...]
    rhs_class: object  # exact constant or VARIES


@dataclass(frozen=True)
class ConstraintFamily:
    id: int
    base: str  # row-name base of the block ('' when names carry none)
    rows: tuple[int, ...]  # row indices into model.rows
    signature: RowSignature
    atomic: bool  # singleton family
    # per-row tuple of index tokens from participating variables: the values
    # that stay constant within the row (its loop coordinates)
    index_map: tuple[tuple[str, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)


def _row_buckets(row: Row, gid_of: dict[int, int]) -> dict[tuple[int, int], list[float]]:
    """(group id, sign) -> coefficients of this row in that bucket."""
    buckets: dict[tuple[int, int], list[float]] = {}
    for j, c in row.terms:
        key = (gid_of[j], 1 if c > 0 else -1)
        buckets.setdefault(key, []).append(c)
    return buckets


def _template_key(row: Row, gid_of: dict[int, int]):
    """Merge key: sense + the set of (group, sign) buckets."""
    return (row.sense, frozenset(_row_buckets(row, gid_of).keys()))


def _family_signature(rows: list[Row], gid_of: dict[int, int]) -> RowSignature:
    sense = rows[0].sense
    per_row = [_row_buckets(r, gid_of) for r in rows]
    keys = sorted(per_row[0].keys())
    pattern = []
    for key in keys:
        gid, sign = key
        counts = {len(b[key]) for b in per_row}
        count: object = counts.pop() if len(counts) == 1 else VARIES
        values = {c for b in per_row for c in b[key]}
        coeff: object = values.pop() if len(values) == 1 else VARIES
        pattern.append((gid, sign, coeff, count))
    rhs_values = {r.rhs for r in rows}
    rhs: object = rhs_values.pop() if len(rhs_values) == 1 else VARIES
    return RowSignature(sense, tuple(pattern), rhs)


def _row_loop_coordinates(model: Model, row: Row) -> tuple[str, ...]:
    """Index tokens constant across the row's participating variables,
    ordered by (group base, position) of first appearance."""
    per_slot: dict[tuple[str, int], set[str]] = {}
    slot_order: list[tuple[str, int]] = []
    for j, _ in row.terms:
        tok = tokenize_name(model.variables[j].name)
        for p, value in enumerate(tok.indices):
            slot = (tok.base, p)
            if slot not in per_slot:
                per_slot[slot] = set()
                slot_order.append(slot)
            per_slot[slot].add(value)
    return tuple(
        next(iter(per_slot[slot])) for slot in slot_order if len(per_slot[slot]) == 1
    )


def row_signature(model: Model, row: int, groups: list[VariableGroup]) -> RowSignature:
    """Signature of a single constraint row; equality is the grouping key."""
    return _family_signature([model.rows[row]], group_of(groups))


def group_constraints(model: Model, groups: list[VariableGroup]) -> list[ConstraintFamily]:
    """Partition constraint rows into families.

    Rows first split into blocks by row-name (base, arity); inside a block
    they split further by template key (sense plus (group, sign) bucket
    set).  Blocks of one row become atomic singleton families.  Family
    order follows first-row appearance; ids are stable across runs.
    """
    gid_of = group_of(groups)
    blocks: dict[tuple, list[int]] = {}
    order: list[tuple] = []
    for i, row in model.constraint_rows():
        tok = tokenize_name(row.name)
        template = _template_key(row, gid_of)
        key = (tok.base, tok.arity, template)
        if key not in blocks:
            blocks[key] = []
            order.append(key)
        blocks[key].append(i)

    families = []
    for fid, key in enumerate(order):
        row_ids = blocks[key]
        rows = [model.rows[i] for i in row_ids]
        families.append(
            ConstraintFamily(
                id=fid,
                base=key[0],
                rows=tuple(row_ids),
                signature=_family_signature(rows, gid_of),
                atomic=len(row_ids) == 1,
                index_map=tuple(_row_loop_coordinates(model, r) for r in rows),
            )
        )
    return families


def family_similarity(a: ConstraintFamily, b: ConstraintFamily) -> float:
    """Jaccard similarity of term patterns, used to flag near-duplicate
    templates (kept separate, surfaced for review at >= 0.9)."""
    if a.signature.sense is not b.signature.sense:
        return 0.0
    pa = {(gid, sign, coeff) for gid, sign, coeff, _ in a.signature.term_pattern}
    pb = {(gid, sign, coeff) for gid, sign, coeff, _ in b.signature.term_pattern}
    if not pa and not pb:
        return 1.0
    return len(pa & pb) / len(pa | pb)


@dataclass(frozen=True)
class MiningResult:
    groups: tuple[VariableGroup, ...]
    families: tuple[ConstraintFamily, ...]
    gid_of: dict = field(compare=False)


def mine(model: Model) -> MiningResult:
    groups = infer_variable_groups(model)
    families = group_constraints(model, groups)
    return MiningResult(tuple(groups), tuple(families), group_of(groups))
