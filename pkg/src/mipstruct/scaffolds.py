"""Atomic constraint typing and loop-scaffold classification.

Each constraint family gets two orthogonal labels: an *atomic type*
describing the algebraic relation of a single row (bound, weighted sum,
exactly-one, implication, ...) and a *scaffold label* describing the loop
mechanism that generated the family (global, single loop, nested, subset
indexed, temporal coupling, cyclic wrap-around, sliding window, all-pairs,
extra-dimension replication).

Detectors run in fixed most-specific-first precedence:

    SLIDING_WINDOW > CYCLIC_MODULAR > TEMPORAL_COUPLED > PAIRWISE_ALL_PAIRS
    > EXTRA_DIMENSION > NESTED_LOOP > SINGLE_LOOP > SUBSET_INDEXED > GLOBAL

Boundary calls baked into the detectors (all deterministic):

* window detection needs width >= 3; width-2 contiguous links read as
  cyclic adjacency when a wrap pair is present, temporal coupling otherwise;
* pairwise detection demands the big-M coefficient on a pair-indexed
  binary; pair-complete families without one fall through (usually to
  SUBSET_INDEXED, the conflict-pair reading);
* extra-dimension replication needs >= 2 replicas of >= 2 rows each,
  structurally identical after deleting the replication position;
* window / cycle / coupling detectors abstain on non-integer index tokens.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field

from .errors import ToolkitError
from .mining import (
    VARIES,
    ConstraintFamily,
    MiningResult,
    VariableGroup,
    mine,
    family_similarity,
    tokenize_name,
)
from .model import Model, ModelStats, Row, Sense, model_stats

SIMILARITY_FLAG_THRESHOLD = 0.9
DEFAULT_BIGM_RATIO = 100.0


class AtomicType(enum.Enum):
    UPPER_BOUND_VAR = "UPPER_BOUND_VAR"
    UPPER_BOUND_SUM = "UPPER_BOUND_SUM"
    UPPER_BOUND_WEIGHTED = "UPPER_BOUND_WEIGHTED"
    UPPER_BOUND_PROPORTION = "UPPER_BOUND_PROPORTION"
    LOWER_BOUND_VAR = "LOWER_BOUND_VAR"
    LOWER_BOUND_SUM = "LOWER_BOUND_SUM"
    LOWER_BOUND_WEIGHTED = "LOWER_BOUND_WEIGHTED"
    LOWER_BOUND_PROPORTION = "LOWER_BOUND_PROPORTION"
    COMPARISON = "COMPARISON"
    IMPLICATION = "IMPLICATION"
    EXACTLY_ONE = "EXACTLY_ONE"
    AT_LEAST_ONE = "AT_LEAST_ONE"
    AT_MOST_ONE = "AT_MOST_ONE"
    EQUALITY = "EQUALITY"
    AGGREGATION_DEF = "AGGREGATION_DEF"
    # The last two complete the type vocabulary but are never inferred from
    # flat rows: MPS encodes conditionals as big-M rows (-> IMPLICATION) and
    # integrality lives on variables, not rows.
    INDICATOR = "INDICATOR"
    DOMAIN_INTEGRALITY = "DOMAIN_INTEGRALITY"


class ScaffoldLabel(enum.Enum):
    GLOBAL = "GLOBAL"
    SINGLE_LOOP = "SINGLE_LOOP"
    NESTED_LOOP = "NESTED_LOOP"
    SUBSET_INDEXED = "SUBSET_INDEXED"
    TEMPORAL_COUPLED = "TEMPORAL_COUPLED"
    CYCLIC_MODULAR = "CYCLIC_MODULAR"
    SLIDING_WINDOW = "SLIDING_WINDOW"
    PAIRWISE_ALL_PAIRS = "PAIRWISE_ALL_PAIRS"
    EXTRA_DIMENSION = "EXTRA_DIMENSION"


CANONICAL_FORMS = {
    ScaffoldLabel.GLOBAL: "sum_j a[j]*x[j] (<=|=|>=) b",
    ScaffoldLabel.SINGLE_LOOP: "for each i: sum_j a[i,j]*x[i,j] (<=|=|>=) b[i]",
    ScaffoldLabel.NESTED_LOOP: "for each (i,t): sum_j a[i,j,t]*x[i,j,t] (<=|=|>=) b[i,t]",
    ScaffoldLabel.SUBSET_INDEXED: "for each subset S[k]: sum_{j in S[k]} x[j] (<=|>=) b[k]",
    ScaffoldLabel.TEMPORAL_COUPLED: "for each t: c1*H[t] + c2*H[t-lag] (<=|>=) b",
    ScaffoldLabel.CYCLIC_MODULAR: "for each t: x[t] + x[(t mod S)+1] <= b",
    ScaffoldLabel.SLIDING_WINDOW: "for each t: sum_{s=t..t+W-1} x[s] <= K",
    ScaffoldLabel.PAIRWISE_ALL_PAIRS: "for each pair (i,j), i != j: row with M on y[i,j]",
    ScaffoldLabel.EXTRA_DIMENSION: "for each k: one copy of the inner family",
}


@dataclass(frozen=True)
class ScaffoldEvidence:
    loop_indices: tuple[tuple[str, int], ...] = ()  # (group base, position)
    window_width: int | None = None
    window_cap: float | None = None
    cycle_length: int | None = None
    coupling_lag: int | None = None
    coupling_coeffs: tuple[float, ...] | None = None
    big_m: float | None = None
    replication_position: tuple[str, int] | None = None
    pair_count_check: tuple[int, bool] | None = None

    def to_json(self) -> dict:
        return {
            "loop_indices": [list(s) for s in self.loop_indices],
            "window_width": self.window_width,
            "window_cap": self.window_cap,
            "cycle_length": self.cycle_length,
            "coupling_lag": self.coupling_lag,
            "coupling_coeffs": list(self.coupling_coeffs)
            if self.coupling_coeffs is not None
            else None,
            "big_m": self.big_m,
            "replication_position": list(self.replication_position)
            if self.replication_position is not None
            else None,
            "pair_count_check": list(self.pair_count_check)
            if self.pair_count_check is not None
            else None,
        }


class AmbiguousScaffoldError(ToolkitError):
    code = "AMBIGUOUS"

    def __init__(self, family_id: int, candidates):
        labels = sorted({label.value for label, _ in candidates})
        super().__init__(
            f"family {family_id}: {len(candidates)} equally specific "
            f"parameterizations for {labels}"
        )
        self.family_id = family_id
        self.candidates = list(candidates)


# ---------------------------------------------------------------------------
# atomic classification


def _bigm_terms(rows: list[Row], model: Model, ratio: float) -> list[float]:
    """Magnitudes of large coefficients sitting on binary variables."""
    mags = [abs(c) for row in rows for _, c in row.terms]
    if not mags:
        return []
    med = statistics.median(mags)
    out = []
    for row in rows:
        for j, c in row.terms:
            if model.variables[j].is_binary and abs(c) >= ratio * max(med, 1e-300):
                out.append(abs(c))
    return out


def classify_atomic(model: Model, family: ConstraintFamily,
                    bigm_ratio: float = DEFAULT_BIGM_RATIO) -> AtomicType:
    """Atomic semantic type from sense, coefficient pattern, rhs, and
    participant integrality.  Deterministic decision list; falls back to the
    sense-level bound/equality types."""
    rows = [model.rows[i] for i in family.rows]
    row = rows[0]
    terms = row.terms
    sense = row.sense
    coeffs = [c for _, c in terms]
    all_binary = all(model.variables[j].is_binary for j, _ in terms)

    if len(terms) == 1:
        c = coeffs[0]
        if sense is Sense.E:
            return AtomicType.EQUALITY
        upper = (sense is Sense.L) == (c > 0)
        return AtomicType.UPPER_BOUND_VAR if upper else AtomicType.LOWER_BOUND_VAR

    if all(c == 1.0 for c in coeffs):
        if row.rhs == 1.0 and all_binary:
            if sense is Sense.E:
                return AtomicType.EXACTLY_ONE
            if sense is Sense.G:
                return AtomicType.AT_LEAST_ONE
            return AtomicType.AT_MOST_ONE
        if sense is Sense.L:
            return AtomicType.UPPER_BOUND_SUM
        if sense is Sense.G:
            return AtomicType.LOWER_BOUND_SUM
        return AtomicType.EQUALITY

    mags = [abs(c) for c in coeffs]
    if _bigm_terms(rows, model, bigm_ratio) and min(mags) < max(mags):
        return AtomicType.IMPLICATION

    if len(terms) == 2 and row.rhs == 0.0 and sense is not Sense.E:
        c1, c2 = coeffs
        if c1 * c2 < 0:
            if all_binary and sorted((c1, c2)) == [-1.0, 1.0]:
                return AtomicType.IMPLICATION
            return AtomicType.COMPARISON

    if row.rhs == 0.0 and len(terms) >= 3 and sense is not Sense.E:
        pos = [c for c in coeffs if c > 0]
        neg = [c for c in coeffs if c < 0]
        lone, rest = (pos, neg) if len(pos) == 1 else (neg, pos)
        if len(lone) == 1 and abs(lone[0]) == 1.0 and len(set(rest)) == 1:
            # single +/-1 term against a uniformly weighted aggregate
            bounded_above = (sense is Sense.L) == (lone[0] > 0)
            return (
                AtomicType.UPPER_BOUND_PROPORTION
                if bounded_above
                else AtomicType.LOWER_BOUND_PROPORTION
            )

    if sense is Sense.E:
        if row.rhs == 0.0:
            pos = [(j, c) for j, c in terms if c > 0]
            neg = [(j, c) for j, c in terms if c < 0]
            lone = pos if len(pos) == 1 else (neg if len(neg) == 1 else None)
            if lone and abs(lone[0][1]) == 1.0 and len(terms) >= 2:
                return AtomicType.AGGREGATION_DEF
        return AtomicType.EQUALITY
    if sense is Sense.L:
        return AtomicType.UPPER_BOUND_WEIGHTED
    return AtomicType.LOWER_BOUND_WEIGHTED


# ---------------------------------------------------------------------------
# index view of a family


@dataclass
class _Slot:
    group_base: str
    per_row: list[tuple[str, ...]]  # distinct values per row, sorted

    @property
    def within_varying(self) -> bool:
        return any(len(v) > 1 for v in self.per_row)

    @property
    def is_loop(self) -> bool:
        if self.within_varying:
            return False
        values = {v[0] for v in self.per_row if v}
        return len(values) > 1

    @property
    def numeric(self) -> bool:
        return all(all(t.isdigit() for t in v) for v in self.per_row)

    def int_sets(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(int(t) for t in v)) for v in self.per_row]

    def single_values(self) -> list[str]:
        return [v[0] for v in self.per_row]


def _family_slots(model: Model, family: ConstraintFamily,
                  groups: list[VariableGroup]) -> dict[tuple[int, int], _Slot]:
    gid_of = {}
    base_of = {}
    for g in groups:
        base_of[g.id] = g.base
        for j in g.members:
            gid_of[j] = g.id

    slots: dict[tuple[int, int], list[list[str]]] = {}
    for r, row_id in enumerate(family.rows):
        row = model.rows[row_id]
        for j, _ in row.terms:
            tok = tokenize_name(model.variables[j].name)
            gid = gid_of[j]
            for p, value in enumerate(tok.indices):
                key = (gid, p)
                if key not in slots:
                    slots[key] = [[] for _ in range(len(family.rows))]
                slots[key][r].append(value)

    out = {}
    for key, rows_values in sorted(slots.items()):
        per_row = [tuple(sorted(set(vals))) for vals in rows_values]
        if any(not v for v in per_row):
            continue  # group absent from some rows; not a usable slot
        out[key] = _Slot(base_of[key[0]], per_row)
    return out


def _loop_indices(slots: dict[tuple[int, int], _Slot]) -> tuple[tuple[str, int], ...]:
    return tuple(
        (slot.group_base, key[1])
        for key, slot in sorted(slots.items())
        if slot.is_loop
    )


def _cyclic_run(values: tuple[int, ...], cycle: int) -> int | None:
    """Start of the unique contiguous run mod ``cycle``, or None."""
    vset = set(values)
    starts = [v for v in vset if ((v - 2) % cycle) + 1 not in vset]
    if len(starts) != 1:
        return None
    start = starts[0]
    run = {((start + k - 1) % cycle) + 1 for k in range(len(values))}
    return start if run == vset else None


# ---------------------------------------------------------------------------
# scaffold detectors; each returns a list of (label, evidence) candidates


def _detect_sliding_window(model, family, slots, loops):
    candidates = []
    rhs = family.signature.rhs_class
    for (gid, p), slot in sorted(slots.items()):
        if not slot.within_varying or not slot.numeric:
            continue
        runs = slot.int_sets()
        widths = {len(r) for r in runs}
        if len(widths) != 1:
            continue
        width = widths.pop()
        if width < 3:
            continue
        if len(set(runs)) < 2:
            continue  # the aggregation range must shift with the row
        cycle = max(v for r in runs for v in r)
        if width > cycle - 1:
            continue
        wrapped = False
        ok = True
        for run in runs:
            if run[-1] - run[0] == width - 1:
                continue
            if _cyclic_run(run, cycle) is None:
                ok = False
                break
            wrapped = True
        if not ok:
            continue
        candidates.append(
            (
                ScaffoldLabel.SLIDING_WINDOW,
                ScaffoldEvidence(
                    loop_indices=loops,
                    window_width=width,
                    window_cap=rhs if rhs is not VARIES else None,
                    cycle_length=cycle if wrapped else None,
                ),
            )
        )
    return candidates


def _detect_cyclic(model, family, slots, loops):
    candidates = []
    for (gid, p), slot in sorted(slots.items()):
        if not slot.within_varying or not slot.numeric:
            continue
        pairs = slot.int_sets()
        if any(len(v) != 2 for v in pairs):
            continue
        if len(set(pairs)) < 2:
            continue  # one repeated pair is no evidence of a cycle
        cycle = max(b for _, b in pairs)
        if cycle < 4:
            continue  # a 3-cycle's edges equal the complete pair set
        wrap = (1, cycle)
        if wrap not in pairs:
            continue
        if all(b == a + 1 or (a, b) == wrap for a, b in pairs):
            candidates.append(
                (
                    ScaffoldLabel.CYCLIC_MODULAR,
                    ScaffoldEvidence(loop_indices=loops, cycle_length=cycle),
                )
            )
    return candidates


def _detect_temporal(model, family, slots, loops):
    candidates = []
    for (gid, p), slot in sorted(slots.items()):
        if not slot.within_varying or not slot.numeric:
            continue
        pairs = slot.int_sets()
        if any(len(v) != 2 for v in pairs):
            continue
        lags = {b - a for a, b in pairs}
        if len(lags) != 1:
            continue
        if len(set(pairs)) < 2:
            continue  # a fixed pair repeated is not coupling across the index
        lag = lags.pop()
        coeffs = tuple(
            c
            for g, _sign, c, _count in family.signature.term_pattern
            if g == gid and c is not VARIES
        )
        candidates.append(
            (
                ScaffoldLabel.TEMPORAL_COUPLED,
                ScaffoldEvidence(
                    loop_indices=loops,
                    coupling_lag=lag,
                    coupling_coeffs=coeffs or None,
                ),
            )
        )
    return candidates


def _detect_pairwise(model, family, slots, loops, groups, bigm_ratio):
    rows = [model.rows[i] for i in family.rows]
    bigm = _bigm_terms(rows, model, bigm_ratio)
    if len(bigm) < len(rows):  # every row must carry its big-M binary term
        return []
    by_group: dict[int, VariableGroup] = {g.id: g for g in groups}
    participating = sorted({gid for gid, _ in slots})
    candidates = []
    for gid in participating:
        group = by_group[gid]
        if group.arity < 2:
            continue
        positions = [p for g, p in slots if g == gid]
        for a in positions:
            for b in positions:
                if a >= b:
                    continue
                pairs = set()
                members = set()
                for row in rows:
                    for j, _ in row.terms:
                        if j in group.members:
                            tok = tokenize_name(model.variables[j].name)
                            pairs.add((tok.indices[a], tok.indices[b]))
                            members.add(j)
                base = {x for pr in pairs for x in pr}
                n = len(base)
                if n < 2 or any(x == y for x, y in pairs):
                    continue
                ordered = len(pairs) == n * (n - 1) and {
                    x for pr in pairs for x in pr
                } == base
                unordered = (
                    len(pairs) == n * (n - 1) // 2
                    and {frozenset(pr) for pr in pairs}
                    == {frozenset((x, y)) for x in base for y in base if x < y}
                )
                if not (ordered or unordered):
                    continue
                if len(rows) not in (n * (n - 1), n * (n - 1) // 2):
                    continue
                candidates.append(
                    (
                        ScaffoldLabel.PAIRWISE_ALL_PAIRS,
                        ScaffoldEvidence(
                            loop_indices=loops,
                            big_m=max(bigm),
                            pair_count_check=(n, True),
                        ),
                    )
                )
    return candidates


def _detect_extra_dimension(model, family, slots, loops, groups):
    gid_of = {}
    for g in groups:
        for j in g.members:
            gid_of[j] = g.id
    candidates = []
    for (gid, p), slot in sorted(slots.items()):
        if not slot.is_loop:
            continue
        values = slot.single_values()
        parts: dict[str, list[int]] = {}
        for r, v in enumerate(values):
            parts.setdefault(v, []).append(r)
        if len(parts) < 2 or any(len(rs) < 2 for rs in parts.values()):
            continue
        sizes = {len(rs) for rs in parts.values()}
        if len(sizes) != 1:
            continue

        def skeleton(r: int):
            row = model.rows[family.rows[r]]
            terms = []
            for j, c in row.terms:
                tok = tokenize_name(model.variables[j].name)
                g = gid_of[j]
                idx = tok.indices
                if g == gid:
                    idx = idx[:p] + idx[p + 1 :]
                terms.append((g, c, idx))
            return (row.sense.value, tuple(sorted(terms)))

        part_keys = {
            v: tuple(sorted(skeleton(r) for r in rs)) for v, rs in parts.items()
        }
        if len(set(part_keys.values())) == 1:
            candidates.append(
                (
                    ScaffoldLabel.EXTRA_DIMENSION,
                    ScaffoldEvidence(
                        loop_indices=loops,
                        replication_position=(slot.group_base, p),
                    ),
                )
            )
    return candidates


def _conceptual_dims(slots: dict[tuple[int, int], _Slot]) -> int:
    """Loop dimensions after merging slots whose joint values are sparse.

    Two loop slots that never form a full Cartesian product (arc endpoints,
    or the same index mirrored in two groups) count as one conceptual index
    set; independent slots count separately.
    """
    loop_keys = [k for k, s in sorted(slots.items()) if s.is_loop]
    if not loop_keys:
        return 0
    values = {k: slots[k].single_values() for k in loop_keys}
    parent = {k: k for k in loop_keys}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for i, a in enumerate(loop_keys):
        for b in loop_keys[i + 1 :]:
            joint = set(zip(values[a], values[b]))
            if len(joint) < len(set(values[a])) * len(set(values[b])):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    return len({find(k) for k in loop_keys})


def classify_scaffold(
    model: Model,
    family: ConstraintFamily,
    groups: list[VariableGroup],
    bigm_ratio: float = DEFAULT_BIGM_RATIO,
) -> tuple[ScaffoldLabel, ScaffoldEvidence]:
    """Assign the loop scaffold for one family.

    Raises :class:`AmbiguousScaffoldError` when the winning detector admits
    several incompatible parameterizations; never guesses.
    """
    if family.size == 1:
        return ScaffoldLabel.GLOBAL, ScaffoldEvidence()

    slots = _family_slots(model, family, groups)
    loops = _loop_indices(slots)

    detectors = (
        lambda: _detect_sliding_window(model, family, slots, loops),
        lambda: _detect_cyclic(model, family, slots, loops),
        lambda: _detect_temporal(model, family, slots, loops),
        lambda: _detect_pairwise(model, family, slots, loops, groups, bigm_ratio),
        lambda: _detect_extra_dimension(model, family, slots, loops, groups),
    )
    for detect in detectors:
        candidates = detect()
        if len(candidates) == 1:
            return candidates[0]
        if len(candidates) > 1:
            unique = {
                (label, evidence) for label, evidence in candidates
            }
            if len(unique) == 1:
                return candidates[0]
            raise AmbiguousScaffoldError(family.id, sorted(
                unique, key=lambda c: (c[0].value, repr(c[1]))))

    dims = _conceptual_dims(slots)
    if dims >= 2:
        return ScaffoldLabel.NESTED_LOOP, ScaffoldEvidence(loop_indices=loops)
    if dims == 1:
        return ScaffoldLabel.SINGLE_LOOP, ScaffoldEvidence(loop_indices=loops)
    # No index position stays constant within rows: the loop identity lives
    # only in the row itself.  Pure all-ones membership rows read as
    # subset-indexed (cover / packing / conflict groups); weighted or
    # mixed-sign rows read as one row per iteration with data-driven support.
    all_ones = all(
        coeff == 1.0 for _g, _s, coeff, _n in family.signature.term_pattern
    )
    if all_ones:
        return ScaffoldLabel.SUBSET_INDEXED, ScaffoldEvidence()
    return ScaffoldLabel.SINGLE_LOOP, ScaffoldEvidence(loop_indices=loops)


# ---------------------------------------------------------------------------
# whole-model report


@dataclass(frozen=True)
class FamilyReport:
    family: ConstraintFamily
    atomic_type: AtomicType
    label: ScaffoldLabel | None
    evidence: ScaffoldEvidence | None
    ambiguous: tuple[tuple[ScaffoldLabel, ScaffoldEvidence], ...] = ()

    def to_json(self) -> dict:
        sig = self.family.signature
        return {
            "id": self.family.id,
            "base": self.family.base,
            "size": self.family.size,
            "atomic": self.family.atomic,
            "sense": sig.sense.value,
            "term_pattern": [
                [gid, sign, coeff, count]
                for gid, sign, coeff, count in sig.term_pattern
            ],
            "rhs": sig.rhs_class,
            "atomic_type": self.atomic_type.value,
            "scaffold": self.label.value if self.label else None,
            "canonical_form": CANONICAL_FORMS[self.label] if self.label else None,
            "evidence": self.evidence.to_json() if self.evidence else None,
            "ambiguous": [
                {"scaffold": lab.value, "evidence": ev.to_json()}
                for lab, ev in self.ambiguous
            ],
            "rows": [self.family.rows[i] for i in range(min(5, self.family.size))],
            "index_map": [list(t) for t in self.family.index_map[:5]],
        }


@dataclass(frozen=True)
class ScaffoldReport:
    model_name: str
    stats: ModelStats
    groups: tuple[VariableGroup, ...]
    families: tuple[FamilyReport, ...]
    warnings: tuple[str, ...]
    similar_families: tuple[tuple[int, int, float], ...]
    mining: MiningResult = field(compare=False, repr=False, default=None)

    @property
    def n_variable_groups(self) -> int:
        return len(self.groups)

    @property
    def n_constraint_families(self) -> int:
        return len(self.families)

    def labels_by_base(self) -> dict[str, str]:
        return {
            fr.family.base: fr.label.value
            for fr in self.families
            if fr.label is not None
        }

    def counts_by_base(self) -> dict[str, int]:
        return {fr.family.base: fr.family.size for fr in self.families}

    def to_json(self) -> dict:
        return {
            "model": self.model_name,
            "stats": {
                "n_vars": self.stats.n_vars,
                "n_rows": self.stats.n_rows,
                "n_nonzeros": self.stats.n_nonzeros,
                "n_integer": self.stats.n_integer,
                "n_binary": self.stats.n_binary,
                "size": self.stats.size,
            },
            "groups": [
                {
                    "id": g.id,
                    "base": g.base,
                    "arity": g.arity,
                    "size": len(g.members),
                    "index_domains": [
                        {
                            "size": len(d.values),
                            "numeric_min": d.numeric_min,
                            "numeric_max": d.numeric_max,
                            "values": list(d.values) if len(d.values) <= 32 else None,
                        }
                        for d in g.index_domains
                    ],
                }
                for g in self.groups
            ],
            "families": [fr.to_json() for fr in self.families],
            "warnings": list(self.warnings),
            "similar_families": [list(t) for t in self.similar_families],
        }


def classify_all(model: Model, bigm_ratio: float = DEFAULT_BIGM_RATIO) -> ScaffoldReport:
    """Mine groups and families, classify each family, assemble the report."""
    mined = mine(model)
    groups = list(mined.groups)
    reports = []
    warnings = []
    for family in mined.families:
        atomic = classify_atomic(model, family, bigm_ratio)
        try:
            label, evidence = classify_scaffold(model, family, groups, bigm_ratio)
            reports.append(FamilyReport(family, atomic, label, evidence))
        except AmbiguousScaffoldError as exc:
            warnings.append(str(exc))
            reports.append(
                FamilyReport(family, atomic, None, None, tuple(exc.candidates))
            )

    similar = []
    fams = list(mined.families)
    for i, a in enumerate(fams):
        for b in fams[i + 1 :]:
            score = family_similarity(a, b)
            if score >= SIMILARITY_FLAG_THRESHOLD:
                similar.append((a.id, b.id, round(score, 6)))

    return ScaffoldReport(
        model_name=model.name,
        stats=model_stats(model),
        groups=tuple(groups),
        families=tuple(reports),
        warnings=tuple(warnings),
        similar_families=tuple(similar),
        mining=mined,
    )
