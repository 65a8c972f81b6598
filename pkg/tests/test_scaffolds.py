import random

import pytest

from mipstruct.mining import mine
from mipstruct.model import Integrality, ModelBuilder, ObjSense, Sense
from mipstruct.scaffolds import (
    AtomicType,
    ScaffoldLabel,
    classify_all,
    classify_atomic,
    classify_scaffold,
)


def _classify(model):
    mined = mine(model)
    out = {}
    for fam in mined.families:
        label, evidence = classify_scaffold(model, fam, list(mined.groups))
        out[fam.base] = (label, evidence, fam)
    return out


def _atomics(model):
    mined = mine(model)
    return {
        fam.base: classify_atomic(model, fam) for fam in mined.families
    }


# -- atomic types -------------------------------------------------------------


def test_exactly_one_over_binaries():
    b = ModelBuilder(name="m")
    for k in range(1, 5):
        b.add_binary(f"y_{k}", obj=1.0)
    b.add_row("pick", Sense.E, {f"y_{k}": 1.0 for k in range(1, 5)}, 1.0)
    assert _atomics(b.build())["pick"] is AtomicType.EXACTLY_ONE


def test_at_least_and_at_most_one():
    b = ModelBuilder(name="m")
    for k in range(1, 4):
        b.add_binary(f"y_{k}", obj=1.0)
    b.add_row("ge", Sense.G, {f"y_{k}": 1.0 for k in range(1, 4)}, 1.0)
    b.add_row("le", Sense.L, {f"y_{k}": 1.0 for k in range(1, 4)}, 1.0)
    atomics = _atomics(b.build())
    assert atomics["ge"] is AtomicType.AT_LEAST_ONE
    assert atomics["le"] is AtomicType.AT_MOST_ONE


def test_single_variable_bounds():
    b = ModelBuilder(name="m")
    b.add_variable("x", 0, 100, obj=1.0)
    b.add_row("ub", Sense.L, {"x": 1.0}, 5.0)
    b.add_row("lb", Sense.G, {"x": 1.0}, 2.0)
    b.add_row("flip", Sense.L, {"x": -1.0}, -1.0)
    atomics = _atomics(b.build())
    assert atomics["ub"] is AtomicType.UPPER_BOUND_VAR
    assert atomics["lb"] is AtomicType.LOWER_BOUND_VAR
    assert atomics["flip"] is AtomicType.LOWER_BOUND_VAR


def test_sum_bounds_and_weighted_fallbacks():
    b = ModelBuilder(name="m")
    for k in range(1, 4):
        b.add_variable(f"x_{k}", 0, 10, obj=1.0)
    b.add_row("s", Sense.L, {f"x_{k}": 1.0 for k in range(1, 4)}, 7.0)
    b.add_row("g", Sense.G, {f"x_{k}": 1.0 for k in range(1, 4)}, 2.0)
    b.add_row("w", Sense.L, {"x_1": 2.0, "x_2": 5.0}, 9.0)
    b.add_row("v", Sense.G, {"x_1": 2.0, "x_2": 5.0}, 1.0)
    atomics = _atomics(b.build())
    assert atomics["s"] is AtomicType.UPPER_BOUND_SUM
    assert atomics["g"] is AtomicType.LOWER_BOUND_SUM
    assert atomics["w"] is AtomicType.UPPER_BOUND_WEIGHTED
    assert atomics["v"] is AtomicType.LOWER_BOUND_WEIGHTED


def test_aggregation_definition():
    # one +/-1 variable defined against an opposite-sign weighted sum
    b = ModelBuilder(name="m")
    b.add_variable("H_2", 0, 1000, obj=1.0)
    for i in range(1, 4):
        b.add_variable(f"x_{i}_2", 0, 10, obj=0.0)
    b.add_row(
        "defH_2", Sense.E,
        {"H_2": 1.0, "x_1_2": -3.0, "x_2_2": -4.0, "x_3_2": -2.5}, 0.0,
    )
    assert _atomics(b.build())["defH_2"] is AtomicType.AGGREGATION_DEF


def test_big_m_implication():
    b = ModelBuilder(name="m")
    b.add_variable("t_1", 0, 100, obj=1.0)
    b.add_variable("t_2", 0, 100, obj=1.0)
    b.add_binary("y_1_2")
    b.add_row(
        "sep_1_2", Sense.G, {"t_2": 1.0, "t_1": -1.0, "y_1_2": 1000.0}, 3.0
    )
    assert _atomics(b.build())["sep_1_2"] is AtomicType.IMPLICATION


def test_binary_logical_implication():
    b = ModelBuilder(name="m")
    b.add_binary("a", obj=1.0)
    b.add_binary("c", obj=1.0)
    b.add_row("imp", Sense.L, {"a": 1.0, "c": -1.0}, 0.0)
    assert _atomics(b.build())["imp"] is AtomicType.IMPLICATION


def test_comparison_and_proportion():
    b = ModelBuilder(name="m")
    for n in ("u", "v", "w", "z"):
        b.add_variable(n, 0, 50, obj=1.0)
    b.add_row("cmp", Sense.L, {"u": 2.0, "v": -1.0}, 0.0)
    b.add_row("prop", Sense.L, {"z": 1.0, "u": -0.3, "v": -0.3, "w": -0.3}, 0.0)
    b.add_row("propg", Sense.G, {"z": 1.0, "u": -0.2, "v": -0.2, "w": -0.2}, 0.0)
    atomics = _atomics(b.build())
    assert atomics["cmp"] is AtomicType.COMPARISON
    assert atomics["prop"] is AtomicType.UPPER_BOUND_PROPORTION
    assert atomics["propg"] is AtomicType.LOWER_BOUND_PROPORTION


def test_equality_fallback():
    b = ModelBuilder(name="m")
    b.add_variable("x", 0, 9, obj=1.0)
    b.add_variable("y", 0, 9, obj=1.0)
    b.add_row("eq", Sense.E, {"x": 2.0, "y": 3.0}, 6.0)
    assert _atomics(b.build())["eq"] is AtomicType.EQUALITY


# -- scaffolds ----------------------------------------------------------------


def test_global_single_row():
    b = ModelBuilder(name="m")
    for i in range(1, 4):
        b.add_binary(f"x_{i}", obj=1.0)
    b.add_row("budget", Sense.L, {f"x_{i}": float(i) for i in range(1, 4)}, 4.0)
    label, evidence, _ = _classify(b.build())["budget"]
    assert label is ScaffoldLabel.GLOBAL


def test_single_loop_scalar_bounds():
    b = ModelBuilder(name="m")
    for i in range(1, 6):
        b.add_variable(f"x_{i}", 0, 100, obj=1.0)
        b.add_row(f"ub_{i}", Sense.L, {f"x_{i}": 1.0}, 5.0 + i)
    label, evidence, _ = _classify(b.build())["ub"]
    assert label is ScaffoldLabel.SINGLE_LOOP
    assert evidence.loop_indices == (("x", 0),)


def test_nested_loop_full_product():
    b = ModelBuilder(name="m")
    for i in range(1, 4):
        for t in range(1, 5):
            for j in range(1, 3):
                b.add_variable(f"x_{i}_{j}_{t}", 0, 10, obj=1.0)
    for i in range(1, 4):
        for t in range(1, 5):
            terms = {f"x_{i}_{j}_{t}": 2.0 for j in range(1, 3)}
            b.add_row(f"capy_{i}_{t}", Sense.L, terms, 8.0)
    label, evidence, _ = _classify(b.build())["capy"]
    assert label is ScaffoldLabel.NESTED_LOOP
    assert (("x", 0) in evidence.loop_indices
            and ("x", 2) in evidence.loop_indices)


def test_arc_indexed_family_is_single_loop():
    # two loop positions that never form a full product = one index set
    b = ModelBuilder(name="m")
    arcs = [(1, 2), (2, 3), (3, 1), (1, 3)]
    for i, j in arcs:
        b.add_variable(f"f_{i}_{j}", 0, 10, obj=1.0)
        b.add_binary(f"y_{i}_{j}")
    for i, j in arcs:
        b.add_row(
            f"cap_{i}_{j}", Sense.L,
            {f"f_{i}_{j}": 1.0, f"y_{i}_{j}": -7.0}, 0.0,
        )
    label, _, _ = _classify(b.build())["cap"]
    assert label is ScaffoldLabel.SINGLE_LOOP


def test_subset_indexed_irregular_cover():
    b = ModelBuilder(name="m")
    for j in range(1, 6):
        b.add_binary(f"s_{j}", obj=1.0)
    supports = [(1, 3), (2, 4, 5), (1, 2, 5), (3,), (2, 3, 4, 5)]
    for e, sup in enumerate(supports, start=1):
        b.add_row(f"cover_{e}", Sense.G, {f"s_{j}": 1.0 for j in sup}, 1.0)
    label, evidence, _ = _classify(b.build())["cover"]
    assert label is ScaffoldLabel.SUBSET_INDEXED


def test_temporal_coupling():
    b = ModelBuilder(name="m")
    for t in range(1, 7):
        b.add_variable(f"H_{t}", 0, 1000, obj=1.0)
    for t in range(2, 7):
        b.add_row(
            f"smooth_{t}", Sense.G, {f"H_{t}": 1.0, f"H_{t-1}": -0.8}, 0.0
        )
    label, evidence, _ = _classify(b.build())["smooth"]
    assert label is ScaffoldLabel.TEMPORAL_COUPLED
    assert evidence.coupling_lag == 1
    assert evidence.coupling_coeffs == (1.0, -0.8)


def test_cyclic_adjacency_with_wrap():
    b = ModelBuilder(name="m")
    s = 6
    for t in range(1, s + 1):
        b.add_binary(f"x_{t}", obj=1.0)
    for t in range(1, s + 1):
        succ = (t % s) + 1
        b.add_row(f"adj_{t}", Sense.L, {f"x_{t}": 1.0, f"x_{succ}": 1.0}, 1.0)
    label, evidence, _ = _classify(b.build())["adj"]
    assert label is ScaffoldLabel.CYCLIC_MODULAR
    assert evidence.cycle_length == 6


def test_sliding_window_linear():
    b = ModelBuilder(name="m")
    horizon, width = 8, 3
    for t in range(1, horizon + 1):
        b.add_binary(f"x_{t}", obj=1.0)
    for t in range(1, horizon - width + 2):
        terms = {f"x_{t + k}": 1.0 for k in range(width)}
        b.add_row(f"win_{t}", Sense.L, terms, 2.0)
    label, evidence, fam = _classify(b.build())["win"]
    assert label is ScaffoldLabel.SLIDING_WINDOW
    assert evidence.window_width == 3
    assert evidence.window_cap == 2.0
    assert evidence.cycle_length is None


def test_sliding_window_wrapped_records_cycle():
    b = ModelBuilder(name="m")
    s, width = 7, 3
    for t in range(1, s + 1):
        b.add_binary(f"x_{t}", obj=1.0)
    for t in range(1, s + 1):
        terms = {f"x_{((t + k - 1) % s) + 1}": 1.0 for k in range(width)}
        b.add_row(f"win_{t}", Sense.L, terms, 2.0)
    label, evidence, _ = _classify(b.build())["win"]
    assert label is ScaffoldLabel.SLIDING_WINDOW
    assert evidence.window_width == 3
    assert evidence.cycle_length == 7


def test_sliding_window_evidence_consistency():
    """Re-scan: every row's participating index run is contiguous with the
    recorded width (mod cycle when cyclic)."""
    b = ModelBuilder(name="m")
    s, width = 9, 4
    for t in range(1, s + 1):
        b.add_binary(f"x_{t}", obj=1.0)
    for t in range(1, s + 1):
        terms = {f"x_{((t + k - 1) % s) + 1}": 1.0 for k in range(width)}
        b.add_row(f"win_{t}", Sense.L, terms, 2.0)
    model = b.build()
    label, evidence, fam = _classify(model)["win"]
    assert label is ScaffoldLabel.SLIDING_WINDOW
    w, cyc = evidence.window_width, evidence.cycle_length
    for row_id in fam.rows:
        row = model.rows[row_id]
        values = sorted(
            int(model.variables[j].name.split("_")[1]) for j, _ in row.terms
        )
        assert len(values) == w
        linear = values[-1] - values[0] == w - 1
        wrapped = cyc is not None and any(
            set(values) == {((start + k - 1) % cyc) + 1 for k in range(w)}
            for start in values
        )
        assert linear or wrapped


def test_pairwise_all_pairs_with_big_m():
    b = ModelBuilder(name="m")
    n, big_m = 4, 1000.0
    for i in range(1, n + 1):
        b.add_variable(f"t_{i}", 0, 50, obj=1.0)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                b.add_binary(f"y_{i}_{j}")
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                b.add_row(
                    f"sep_{i}_{j}", Sense.G,
                    {f"t_{j}": 1.0, f"t_{i}": -1.0, f"y_{i}_{j}": big_m}, 2.0,
                )
    label, evidence, fam = _classify(b.build())["sep"]
    assert label is ScaffoldLabel.PAIRWISE_ALL_PAIRS
    assert evidence.big_m == big_m
    assert evidence.pair_count_check == (n, True)
    assert fam.size == n * (n - 1)


def test_pair_complete_without_big_m_is_subset():
    b = ModelBuilder(name="m")
    n = 4
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                b.add_binary(f"y_{i}_{j}", obj=1.0)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            b.add_row(
                f"link_{i}_{j}", Sense.L,
                {f"y_{i}_{j}": 1.0, f"y_{j}_{i}": 1.0}, 1.0,
            )
    label, _, _ = _classify(b.build())["link"]
    assert label is ScaffoldLabel.SUBSET_INDEXED


def test_extra_dimension_replication():
    b = ModelBuilder(name="m")
    arcs = [(1, 2), (2, 3), (3, 1)]
    for k in (1, 2):
        for i, j in arcs:
            b.add_variable(f"f_{k}_{i}_{j}", 0, 5, obj=1.0)
    for k in (1, 2):
        for node in (1, 2, 3):
            terms = {}
            for i, j in arcs:
                if i == node:
                    terms[f"f_{k}_{i}_{j}"] = 1.0
                if j == node:
                    terms[f"f_{k}_{i}_{j}"] = -1.0
            b.add_row(f"bal_{k}_{node}", Sense.E, terms, float(k))
    label, evidence, _ = _classify(b.build())["bal"]
    assert label is ScaffoldLabel.EXTRA_DIMENSION
    assert evidence.replication_position == ("f", 0)


def test_window_with_extra_static_index_stays_sliding():
    # composite case: a moving window plus a replicated person index
    b = ModelBuilder(name="m")
    people, s, width = 3, 8, 3
    for i in range(1, people + 1):
        for t in range(1, s + 1):
            b.add_binary(f"x_{i}_{t}", obj=1.0)
    for i in range(1, people + 1):
        for t in range(1, s + 1):
            terms = {f"x_{i}_{((t + k - 1) % s) + 1}": 1.0 for k in range(width)}
            b.add_row(f"win_{i}_{t}", Sense.L, terms, 2.0)
    label, evidence, _ = _classify(b.build())["win"]
    assert label is ScaffoldLabel.SLIDING_WINDOW
    assert ("x", 0) in evidence.loop_indices  # the extra index is recorded


def test_ambiguous_two_window_readings():
    b = ModelBuilder(name="m")
    names = [
        ("x_5_2", "x_6_3", "x_1_4"),
        ("x_6_3", "x_1_4", "x_2_5"),
    ]
    seen = set()
    for row in names:
        for n in row:
            if n not in seen:
                seen.add(n)
                b.add_binary(n, obj=1.0)
    for r, row in enumerate(names, start=1):
        b.add_row(f"w_{r}", Sense.L, {n: 1.0 for n in row}, 2.0)
    model = b.build()
    report = classify_all(model)
    fam_report = next(fr for fr in report.families if fr.family.base == "w")
    assert fam_report.label is None
    assert len(fam_report.ambiguous) == 2
    assert report.warnings


def test_permutation_invariance_of_labels():
    from mipstruct.generators import GeneratorParams, generate
    from mipstruct.mps_io import parse_mps, serialize_model
    import tempfile
    from pathlib import Path

    out = Path(tempfile.mkdtemp())
    generate(
        GeneratorParams(name="roster", seed=2, n_people=3, n_periods=10,
                        window=3, cap=2),
        out / "inst",
    )
    model = parse_mps(out / "inst" / "model.mps")
    base_labels = classify_all(model).labels_by_base()

    rng = random.Random(99)
    order = list(model.rows)
    obj = order.pop(model.objective_row_index)
    rng.shuffle(order)
    shuffled = model.__class__(
        name=model.name,
        variables=model.variables,
        rows=tuple([obj] + order),
        objective_row_index=0,
        objective_sense=model.objective_sense,
        objective_constant=model.objective_constant,
    )
    text = serialize_model(shuffled)
    assert classify_all(parse_mps(text)).labels_by_base() == base_labels


def test_label_totality_on_random_models():
    from conftest import build_random_binary_model

    rng = random.Random(5150)
    for trial in range(15):
        model = build_random_binary_model(
            rng, rng.randint(2, 7), rng.randint(1, 10), name=f"t{trial}"
        )
        report = classify_all(model)
        for fr in report.families:
            assert (fr.label is not None) or fr.ambiguous
