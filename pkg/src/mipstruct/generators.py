"""Deterministic parametric instance generators.

Every generator emits a full artifact directory (data tables, instance.json,
model.md, generator.py, solve.py, model.mps) plus the scaffold labels and
family cardinalities it constructed, so the mining/classification path can
be round-trip tested against declared ground truth.

Determinism contract: identical parameters produce byte-identical directory
trees.  All randomness flows through one splitmix64 stream; nothing is
emitted in the traversal order of an unordered container; no timestamps.

Numeric ranges are chosen so that ordinary data coefficients stay far below
the big-M detection ratio (demands <= 5, capacities <= 2 * total demand,
costs <= 100) and only deliberate disjunctive constants look like big-M.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import DisconnectedError, ParameterError, ToolkitError
from .model import Integrality, Model, ModelBuilder, ObjSense, Sense
from .mps_io import serialize_model
from .oracle import solve_exhaustive
from .scaffolds import ScaffoldLabel, classify_all
from .schema import EmitOptions, InstanceRecord, VerificationBlock, emit_instance

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SOLVE_BUDGET = 1 << 18


def prng_next(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (value, next state), all mod 2**64."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)), state


class SplitMix64:
    """Tiny deterministic RNG over the splitmix64 stream."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        value, self.state = prng_next(self.state)
        return value

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]; modulo bias is irrelevant here,
        bit-exact reproducibility is not."""
        return lo + self.next_u64() % (hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]
        return items


@dataclass(frozen=True)
class GeneratorParams:
    name: str
    seed: int = 0
    # network design
    n_nodes: int = 4
    n_commodities: int = 2
    density: float = 1.0
    # cyclic roster
    n_people: int = 4
    n_periods: int = 12
    window: int = 4
    cap: int = 2
    min_staff: int = 1
    fixed_assignments: bool = False
    # set cover
    n_elements: int = 8
    n_sets: int = 6
    cover_density: float = 0.4
    # knapsack
    n_items: int = 6
    capacity_ratio: float = 0.5
    # pairwise scheduling
    n_jobs: int = 4
    separation: int = 2
    big_m: float = 1000.0


@dataclass(frozen=True)
class GeneratedInstance:
    dir: Path
    declared_labels: dict
    declared_counts: dict
    record: InstanceRecord


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


def _try_solve(model: Model):
    try:
        result = solve_exhaustive(model, max_points=_SOLVE_BUDGET)
    except ToolkitError:
        return VerificationBlock(status="UNKNOWN"), None
    if result.status == "OPTIMAL":
        return VerificationBlock(status="OPTIMAL"), result.objective
    return VerificationBlock(status="INFEASIBLE"), None


_GENERATOR_MAIN = '''\
"""Deterministic regeneration of this instance directory."""

from pathlib import Path

from mipstruct.generators import GeneratorParams, generate

PARAMS = {params!r}

if __name__ == "__main__":
    out = Path(__file__).resolve().parent
    generate(PARAMS, out)
    print(f"regenerated {{out}}")
'''


def _finish(params: GeneratorParams, out_dir, model: Model, tables,
            parameters: dict, declared: dict[str, ScaffoldLabel],
            counts: dict[str, int], instance_id: str,
            major: str, sub: str) -> GeneratedInstance:
    verification, optimal = _try_solve(model)
    report = classify_all(model)
    metadata = {
        "generator": params.name,
        "seed": params.seed,
        "declared_scaffolds": {k: v.value for k, v in sorted(declared.items())},
        "declared_counts": dict(sorted(counts.items())),
    }
    record = emit_instance(
        report,
        model,
        out_dir,
        EmitOptions(
            instance_id=instance_id,
            major_category=major,
            subcategory=sub,
            parameters=parameters,
            tables=tables,
            verification=verification,
            optimal_value=optimal,
            metadata=metadata,
            mps_text=serialize_model(model),
            generator_code_text=_GENERATOR_MAIN.format(params=params),
        ),
    )
    return GeneratedInstance(Path(out_dir), dict(declared), dict(counts), record)


# ---------------------------------------------------------------------------
# multi-commodity capacitated network design


def _strongly_connected(nodes: list[int], arcs: set[tuple[int, int]]) -> bool:
    def reach(forward: bool) -> set[int]:
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            u = stack.pop()
            for a, b in arcs:
                v = b if (a == u and forward) else (a if (b == u and not forward) else None)
                if v is not None and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    all_nodes = set(nodes)
    return reach(True) == all_nodes and reach(False) == all_nodes


def generate_mcnd(params: GeneratorParams, out_dir) -> GeneratedInstance:
    """Capacitated network design with per-commodity flow balance.

    Arcs are Bernoulli(density) draws over ordered pairs; a random
    Hamiltonian cycle is added when the digraph is not strongly connected.
    A permutation digraph (every node in/out degree one) additionally gets
    the first missing arc so that balance rows never all degenerate to
    two-term cyclic links.
    """
    n, k, density = params.n_nodes, params.n_commodities, params.density
    _require(n >= 2, "n_nodes must be >= 2")
    _require(1 <= k <= 8, "n_commodities must be in [1, 8]")
    _require(0.0 < density <= 1.0, "density must be in (0, 1]")
    rng = SplitMix64(params.seed)
    nodes = list(range(1, n + 1))

    arcs = set()
    for i in nodes:
        for j in nodes:
            if i != j and rng.random() < density:
                arcs.add((i, j))
    if not _strongly_connected(nodes, arcs):
        cycle = rng.shuffle(list(nodes))
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            arcs.add((a, b))
    if n >= 3:
        out_deg = {i: sum(1 for a, _ in arcs if a == i) for i in nodes}
        in_deg = {i: sum(1 for _, b in arcs if b == i) for i in nodes}
        if all(out_deg[i] == 1 for i in nodes) and all(in_deg[i] == 1 for i in nodes):
            extra = next(
                (i, j) for i in nodes for j in nodes if i != j and (i, j) not in arcs
            )
            arcs.add(extra)
    if not _strongly_connected(nodes, arcs):
        raise DisconnectedError(f"mcnd seed {params.seed}: digraph not connected")
    arc_list = sorted(arcs)

    commodities = []
    for c in range(1, k + 1):
        source = rng.randint(1, n)
        sink = rng.randint(1, n - 1)
        if sink >= source:
            sink += 1
        demand = rng.randint(1, 5)
        commodities.append((c, source, sink, demand))
    total_demand = sum(d for _, _, _, d in commodities)
    max_demand = max(d for _, _, _, d in commodities)

    arc_capacity = {a: rng.randint(max_demand, 2 * total_demand) for a in arc_list}
    arc_fixed = {a: rng.randint(1, 100) for a in arc_list}
    arc_unit = {a: rng.randint(1, 100) for a in arc_list}

    builder = ModelBuilder(name=f"mcnd_s{params.seed}", sense=ObjSense.MIN)
    for c, _, _, demand in commodities:
        for i, j in arc_list:
            builder.add_variable(
                f"f_{c}_{i}_{j}", 0, demand, Integrality.INTEGER,
                obj=arc_unit[(i, j)],
            )
    for i, j in arc_list:
        builder.add_binary(f"y_{i}_{j}", obj=arc_fixed[(i, j)])

    for c, source, sink, demand in commodities:
        for i in nodes:
            terms = {}
            for a, b in arc_list:
                if a == i:
                    terms[f"f_{c}_{a}_{b}"] = 1.0
                if b == i:
                    terms[f"f_{c}_{a}_{b}"] = -1.0
            rhs = demand if i == source else (-demand if i == sink else 0.0)
            builder.add_row(f"bal_{c}_{i}", Sense.E, terms, rhs)
    for i, j in arc_list:
        terms = {f"f_{c}_{i}_{j}": 1.0 for c, _, _, _ in commodities}
        terms[f"y_{i}_{j}"] = -float(arc_capacity[(i, j)])
        builder.add_row(f"cap_{i}_{j}", Sense.L, terms, 0.0)
    model = builder.build()

    tables = [
        ("nodes", ["node"], [[i] for i in nodes], "network nodes"),
        (
            "arcs",
            ["from_node", "to_node", "capacity"],
            [[a, b, arc_capacity[(a, b)]] for a, b in arc_list],
            "directed arcs with installed capacity",
        ),
        (
            "commodities",
            ["commodity", "source", "sink", "demand"],
            [list(c) for c in commodities],
            "commodities with origin, destination and demand",
        ),
        (
            "arc_costs",
            ["from_node", "to_node", "fixed_cost", "unit_cost"],
            [[a, b, arc_fixed[(a, b)], arc_unit[(a, b)]] for a, b in arc_list],
            "fixed design cost and per-unit flow cost per arc",
        ),
        (
            "parameters",
            ["name", "value"],
            [
                ["density", params.density],
                ["n_arcs", len(arc_list)],
                ["n_commodities", k],
                ["n_nodes", n],
            ],
            "realized structural parameters",
        ),
    ]
    declared = {
        "bal": ScaffoldLabel.EXTRA_DIMENSION if k >= 2 else ScaffoldLabel.SINGLE_LOOP,
        "cap": ScaffoldLabel.SINGLE_LOOP,
    }
    counts = {"bal": k * n, "cap": len(arc_list)}
    parameters = {
        "n_nodes": n,
        "n_commodities": k,
        "n_arcs": len(arc_list),
        "density": density,
    }
    return _finish(
        params, out_dir, model, tables, parameters, declared, counts,
        instance_id=f"mcnd-n{n}-k{k}-s{params.seed}",
        major="Network Flow Optimization",
        sub="Multi-Commodity Capacitated Network Design Problem",
    )


# ---------------------------------------------------------------------------
# cyclic roster


def generate_roster(params: GeneratorParams, out_dir) -> GeneratedInstance:
    """Cyclic watch roster: wrap-around adjacency bans, a sliding workload
    window, and per-period staffing coverage."""
    people, s = params.n_people, params.n_periods
    w, cap, staff = params.window, params.cap, params.min_staff
    _require(people >= 2, "n_people must be >= 2")
    _require(s >= 5, "n_periods must be >= 5")
    _require(3 <= w <= s - 2, "window must be in [3, n_periods - 2]")
    _require(1 <= cap < w, "cap must be in [1, window)")
    _require(1 <= staff <= people, "min_staff must be in [1, n_people]")

    builder = ModelBuilder(name=f"roster_s{params.seed}", sense=ObjSense.MAX)
    for i in range(1, people + 1):
        for t in range(1, s + 1):
            builder.add_binary(f"x_{i}_{t}", obj=1.0)
    if params.fixed_assignments:
        for i in range(1, min(3, people) + 1):
            builder.set_bounds(f"x_{i}_1", lower=1.0)

    for i in range(1, people + 1):
        for t in range(1, s + 1):
            succ = (t % s) + 1
            builder.add_row(
                f"adj_{i}_{t}", Sense.L,
                {f"x_{i}_{t}": 1.0, f"x_{i}_{succ}": 1.0}, 1.0,
            )
    for i in range(1, people + 1):
        for t in range(1, s + 1):
            terms = {
                f"x_{i}_{((t + k - 1) % s) + 1}": 1.0 for k in range(w)
            }
            builder.add_row(f"win_{i}_{t}", Sense.L, terms, float(cap))
    for t in range(1, s + 1):
        terms = {f"x_{i}_{t}": 1.0 for i in range(1, people + 1)}
        builder.add_row(f"cov_{t}", Sense.G, terms, float(staff))
    model = builder.build()

    tables = [
        (
            "parameters",
            ["name", "value"],
            [
                ["cap", cap],
                ["min_staff", staff],
                ["n_people", people],
                ["n_periods", s],
                ["window", w],
            ],
            "roster structure parameters",
        )
    ]
    declared = {
        "adj": ScaffoldLabel.CYCLIC_MODULAR,
        "win": ScaffoldLabel.SLIDING_WINDOW,
        "cov": ScaffoldLabel.SINGLE_LOOP,
    }
    counts = {"adj": people * s, "win": people * s, "cov": s}
    parameters = {
        "n_people": people,
        "n_periods": s,
        "window": w,
        "cap": cap,
        "min_staff": staff,
    }
    return _finish(
        params, out_dir, model, tables, parameters, declared, counts,
        instance_id=f"roster-p{people}-t{s}-w{w}-s{params.seed}",
        major="Transportation and Routing Optimization",
        sub="Operations Optimization",
    )


# ---------------------------------------------------------------------------
# set cover


def _break_accidental_regularity(memberships: list[list[int]], n_sets: int) -> None:
    """Keep subset supports irregular: index-regular supports would make the
    cover family look like a window/adjacency loop to the classifier."""
    sizes = {len(m) for m in memberships}
    if len(sizes) != 1:
        return
    runs_contiguous = all(
        m and m[-1] - m[0] == len(m) - 1 for m in memberships
    )
    if not runs_contiguous:
        return
    for j in range(1, n_sets + 1):
        if j not in memberships[0] and (
            memberships[0] and abs(j - memberships[0][0]) > 1
        ):
            memberships[0].append(j)
            memberships[0].sort()
            return
    if n_sets >= 1 and len(memberships[0]) < n_sets:
        for j in range(1, n_sets + 1):
            if j not in memberships[0]:
                memberships[0].append(j)
                memberships[0].sort()
                return


def generate_setcover(params: GeneratorParams, out_dir) -> GeneratedInstance:
    """Weighted set cover over Bernoulli membership with guaranteed
    coverage of every element."""
    n_el, n_sets, density = params.n_elements, params.n_sets, params.cover_density
    _require(n_el >= 2, "n_elements must be >= 2")
    _require(n_sets >= 3, "n_sets must be >= 3")
    _require(0.0 < density <= 1.0, "cover_density must be in (0, 1]")
    rng = SplitMix64(params.seed)

    memberships: list[list[int]] = []
    for _e in range(n_el):
        sets = [j for j in range(1, n_sets + 1) if rng.random() < density]
        memberships.append(sets)
    for sets in memberships:
        if not sets:
            sets.append(rng.randint(1, n_sets))
    _break_accidental_regularity(memberships, n_sets)
    costs = {j: rng.randint(1, 100) for j in range(1, n_sets + 1)}

    builder = ModelBuilder(name=f"setcover_s{params.seed}", sense=ObjSense.MIN)
    for j in range(1, n_sets + 1):
        builder.add_binary(f"s_{j}", obj=costs[j])
    for e in range(1, n_el + 1):
        terms = {f"s_{j}": 1.0 for j in memberships[e - 1]}
        builder.add_row(f"cover_{e}", Sense.G, terms, 1.0)
    model = builder.build()

    tables = [
        (
            "sets",
            ["set", "cost"],
            [[j, costs[j]] for j in range(1, n_sets + 1)],
            "candidate sets and their selection costs",
        ),
        (
            "memberships",
            ["element", "set"],
            [[e, j] for e in range(1, n_el + 1) for j in memberships[e - 1]],
            "which sets cover which elements",
        ),
        (
            "parameters",
            ["name", "value"],
            [
                ["cover_density", density],
                ["n_elements", n_el],
                ["n_sets", n_sets],
            ],
            "realized structural parameters",
        ),
    ]
    declared = {"cover": ScaffoldLabel.SUBSET_INDEXED}
    counts = {"cover": n_el}
    parameters = {
        "n_elements": n_el,
        "n_sets": n_sets,
        "cover_density": density,
    }
    return _finish(
        params, out_dir, model, tables, parameters, declared, counts,
        instance_id=f"setcover-e{n_el}-m{n_sets}-s{params.seed}",
        major="Combinatorial Optimization",
        sub="Set Cover Problem",
    )


# ---------------------------------------------------------------------------
# knapsack


def generate_knapsack(params: GeneratorParams, out_dir) -> GeneratedInstance:
    """0/1 knapsack: one global weighted capacity row."""
    n, ratio = params.n_items, params.capacity_ratio
    _require(n >= 2, "n_items must be >= 2")
    _require(0.0 < ratio <= 1.0, "capacity_ratio must be in (0, 1]")
    rng = SplitMix64(params.seed)
    values = {i: rng.randint(1, 100) for i in range(1, n + 1)}
    weights = {i: rng.randint(1, 50) for i in range(1, n + 1)}
    capacity = max(1, round(ratio * sum(weights.values())))

    builder = ModelBuilder(name=f"knapsack_s{params.seed}", sense=ObjSense.MAX)
    for i in range(1, n + 1):
        builder.add_binary(f"x_{i}", obj=values[i])
    builder.add_row(
        "cap", Sense.L, {f"x_{i}": float(weights[i]) for i in range(1, n + 1)},
        float(capacity),
    )
    model = builder.build()

    tables = [
        (
            "items",
            ["item", "value", "weight"],
            [[i, values[i], weights[i]] for i in range(1, n + 1)],
            "item values and weights",
        ),
        (
            "parameters",
            ["name", "value"],
            [["capacity", capacity], ["capacity_ratio", ratio], ["n_items", n]],
            "realized structural parameters",
        ),
    ]
    declared = {"cap": ScaffoldLabel.GLOBAL}
    counts = {"cap": 1}
    parameters = {"n_items": n, "capacity": capacity, "capacity_ratio": ratio}
    return _finish(
        params, out_dir, model, tables, parameters, declared, counts,
        instance_id=f"knapsack-n{n}-s{params.seed}",
        major="Combinatorial Optimization",
        sub="Knapsack Problem",
    )


# ---------------------------------------------------------------------------
# pairwise disjunctive scheduling toy


def generate_pairwise(params: GeneratorParams, out_dir) -> GeneratedInstance:
    """All-pairs separation scheduling: big-M disjunctive rows over every
    ordered job pair plus at-most-one ordering-deactivation rows."""
    n, sep, big_m = params.n_jobs, params.separation, params.big_m
    _require(n >= 2, "n_jobs must be >= 2")
    _require(sep >= 1, "separation must be >= 1")
    horizon = sep * n
    _require(big_m >= sep * (n + 1), "big_m too small for the time horizon")

    builder = ModelBuilder(name=f"pairwise_s{params.seed}", sense=ObjSense.MIN)
    for i in range(1, n + 1):
        builder.add_variable(f"t_{i}", 0, horizon, Integrality.INTEGER, obj=1.0)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                builder.add_binary(f"y_{i}_{j}")

    # y[i,j] = 1 buys out the requirement "j starts at least `sep` after i";
    # at most one direction per pair may be bought out.
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            builder.add_row(
                f"sep_{i}_{j}", Sense.G,
                {f"t_{j}": 1.0, f"t_{i}": -1.0, f"y_{i}_{j}": big_m},
                float(sep),
            )
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            builder.add_row(
                f"link_{i}_{j}", Sense.L,
                {f"y_{i}_{j}": 1.0, f"y_{j}_{i}": 1.0}, 1.0,
            )
    model = builder.build()

    tables = [
        (
            "jobs",
            ["job"],
            [[i] for i in range(1, n + 1)],
            "jobs to be scheduled",
        ),
        (
            "parameters",
            ["name", "value"],
            [
                ["big_m", big_m],
                ["horizon", horizon],
                ["n_jobs", n],
                ["separation", sep],
            ],
            "realized structural parameters",
        ),
    ]
    declared = {
        "sep": ScaffoldLabel.PAIRWISE_ALL_PAIRS,
        "link": ScaffoldLabel.SUBSET_INDEXED,
    }
    counts = {"sep": n * (n - 1), "link": n * (n - 1) // 2}
    parameters = {
        "n_jobs": n,
        "separation": sep,
        "big_m": big_m,
        "horizon": horizon,
    }
    return _finish(
        params, out_dir, model, tables, parameters, declared, counts,
        instance_id=f"pairwise-n{n}-s{params.seed}",
        major="Disjunctive and Pairwise Scheduling",
        sub="Pairwise Disjunctive Scheduling",
    )


_GENERATORS = {
    "mcnd": generate_mcnd,
    "roster": generate_roster,
    "setcover": generate_setcover,
    "knapsack": generate_knapsack,
    "pairwise": generate_pairwise,
}

GENERATOR_NAMES = tuple(sorted(_GENERATORS))


def generate(params: GeneratorParams, out_dir) -> GeneratedInstance:
    if params.name not in _GENERATORS:
        raise ParameterError(
            f"unknown generator {params.name!r}; choose from {GENERATOR_NAMES}"
        )
    return _GENERATORS[params.name](params, out_dir)
