import math
import random

import pytest
from hypothesis import given, strategies as st

from mipstruct.errors import (
    DuplicateNameError,
    MpsSyntaxError,
    UnknownRowError,
    UnsupportedSectionError,
)
from mipstruct.model import (
    INF,
    Integrality,
    ModelBuilder,
    ObjSense,
    Sense,
    model_stats,
)
from mipstruct.mps_io import parse_mps, serialize_model


def test_two_var_fixture(two_var_mps):
    model = parse_mps(two_var_mps)
    stats = model_stats(model)
    assert stats.n_vars == 2
    assert stats.n_rows == 1
    assert stats.n_nonzeros == 4  # 2 constraint + 2 objective
    assert stats.size == 3
    assert model.objective_sense is ObjSense.MIN
    assert model.name == "twovars"


def test_objsense_same_line_and_next_line():
    base = "NAME m\n{objsense}ROWS\n N obj\nCOLUMNS\n x obj 1\nENDATA\n"
    same = parse_mps(base.format(objsense="OBJSENSE MAX\n"))
    nxt = parse_mps(base.format(objsense="OBJSENSE\n    MAX\n"))
    assert same.objective_sense is ObjSense.MAX
    assert nxt.objective_sense is ObjSense.MAX
    override = parse_mps(
        base.format(objsense="OBJSENSE MAX\n"), objective_sense=ObjSense.MIN
    )
    assert override.objective_sense is ObjSense.MIN


INT_BOUNDS_MPS = """\
NAME m
ROWS
 N obj
 L c1
COLUMNS
 M1 'MARKER' 'INTORG'
 z obj 1
 z c1 1
 M2 'MARKER' 'INTEND'
 w obj 1
 w c1 1
RHS
 RHS1 c1 10
ENDATA
"""


def test_intorg_marker_and_default_bounds():
    model = parse_mps(INT_BOUNDS_MPS)
    z = model.variables[model.variable_index("z")]
    w = model.variables[model.variable_index("w")]
    assert z.integrality is Integrality.INTEGER
    assert (z.lower, z.upper) == (0.0, INF)
    assert w.integrality is Integrality.CONTINUOUS

    legacy = parse_mps(INT_BOUNDS_MPS, legacy_int_bounds=True)
    z2 = legacy.variables[legacy.variable_index("z")]
    assert (z2.lower, z2.upper) == (0.0, 1.0)


BOUNDS_MPS = """\
NAME m
ROWS
 N obj
COLUMNS
 a obj 1
 b obj 1
 c obj 1
 d obj 1
 e obj 1
 f obj 1
 g obj 1
 h obj 1
BOUNDS
 LO BND a 2
 UP BND a 9
 FX BND b 3.5
 FR BND c
 MI BND d
 UP BND d -1
 BV BND e
 LI BND f 1
 UI BND f 4
 UP BND g -5
 PL BND h
ENDATA
"""


def test_bounds_semantics():
    m = parse_mps(BOUNDS_MPS)

    def var(name):
        return m.variables[m.variable_index(name)]

    assert (var("a").lower, var("a").upper) == (2.0, 9.0)
    assert (var("b").lower, var("b").upper) == (3.5, 3.5)
    assert (var("c").lower, var("c").upper) == (-INF, INF)
    assert (var("d").lower, var("d").upper) == (-INF, -1.0)
    assert var("e").integrality is Integrality.BINARY
    assert (var("e").lower, var("e").upper) == (0.0, 1.0)
    assert var("f").integrality is Integrality.INTEGER
    assert (var("f").lower, var("f").upper) == (1.0, 4.0)
    # negative UP with untouched lower drops the lower bound to -inf
    assert (var("g").lower, var("g").upper) == (-INF, -5.0)
    assert (var("h").lower, var("h").upper) == (0.0, INF)


RANGES_MPS = """\
NAME m
ROWS
 N obj
 L lo
 G hi
 E eqp
 E eqn
COLUMNS
 x obj 1
 x lo 1
 x hi 1
 x eqp 1
 x eqn 1
RHS
 RHS1 lo 10
 RHS1 hi 2
 RHS1 eqp 5
 RHS1 eqn 5
RANGES
 RNG1 lo 4
 RNG1 hi -3
 RNG1 eqp 2
 RNG1 eqn -2
ENDATA
"""


def test_ranges_table():
    m = parse_mps(RANGES_MPS)

    def bounds(name):
        return m.rows[m.row_index(name)].bounds()

    assert bounds("lo") == (6.0, 10.0)   # L, rhs b, |r| -> [b-|r|, b]
    assert bounds("hi") == (2.0, 5.0)    # G -> [b, b+|r|]
    assert bounds("eqp") == (5.0, 7.0)   # E, r >= 0 -> [b, b+r]
    assert bounds("eqn") == (3.0, 5.0)   # E, r < 0 -> [b+r, b]


def test_objective_constant_from_rhs():
    text = (
        "NAME m\nROWS\n N obj\n L c\nCOLUMNS\n x obj 2\n x c 1\n"
        "RHS\n RHS1 obj -7\n RHS1 c 4\nENDATA\n"
    )
    m = parse_mps(text)
    assert m.objective_constant == 7.0
    assert m.rows[m.row_index("c")].rhs == 4.0


def test_multiple_n_rows_first_is_objective():
    text = (
        "NAME m\nROWS\n N obj\n N free2\n L c\nCOLUMNS\n x obj 1\n"
        " x free2 3\n x c 1\nRHS\n RHS1 c 1\nENDATA\n"
    )
    m = parse_mps(text)
    assert m.objective.name == "obj"
    stats = model_stats(m)
    assert stats.n_rows == 1  # non-objective N rows are not constraints
    assert stats.n_nonzeros == 2  # objective + constraint terms only


@pytest.mark.parametrize(
    "mutation, error",
    [
        ("unknown_row", UnknownRowError),
        ("dup_row", DuplicateNameError),
        ("sos", UnsupportedSectionError),
        ("bad_number", MpsSyntaxError),
        ("no_endata", MpsSyntaxError),
        ("data_before_section", MpsSyntaxError),
        ("bad_bound_type", MpsSyntaxError),
    ],
)
def test_errors(mutation, error):
    texts = {
        "unknown_row": "NAME m\nROWS\n N obj\nCOLUMNS\n x nope 1\nENDATA\n",
        "dup_row": "NAME m\nROWS\n N obj\n L c\n L c\nENDATA\n",
        "sos": "NAME m\nROWS\n N obj\nSOS\n S1 s1 1\nENDATA\n",
        "bad_number": "NAME m\nROWS\n N obj\nCOLUMNS\n x obj abc\nENDATA\n",
        "no_endata": "NAME m\nROWS\n N obj\nCOLUMNS\n x obj 1\n",
        "data_before_section": " x obj 1\nNAME m\nENDATA\n",
        "bad_bound_type": (
            "NAME m\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n XX B x 1\nENDATA\n"
        ),
    }
    with pytest.raises(error):
        parse_mps(texts[mutation])


def test_lenient_endata():
    text = "NAME m\nROWS\n N obj\nCOLUMNS\n x obj 1\n"
    m = parse_mps(text, require_endata=False)
    assert len(m.variables) == 1


def test_syntax_error_carries_location():
    try:
        parse_mps("NAME m\nROWS\n N obj\nCOLUMNS\n x obj abc\nENDATA\n")
    except MpsSyntaxError as exc:
        assert exc.line == 5
        assert exc.code == "SYNTAX"
    else:
        pytest.fail("expected a syntax error")


def _fixed_line(f1="", f2="", f3="", f4="", f5="", f6=""):
    # historical field start columns (0-indexed): 1, 4, 14, 24, 39, 49
    line = [" "] * 61
    for text, start in ((f1, 1), (f2, 4), (f3, 14), (f4, 24), (f5, 39), (f6, 49)):
        for i, ch in enumerate(text):
            line[start + i] = ch
    return "".join(line).rstrip()


FIXED_MPS = "\n".join(
    [
        "NAME          spaced",
        "ROWS",
        _fixed_line("N", "obj"),
        _fixed_line("L", "row one"),
        "COLUMNS",
        _fixed_line("", "my var", "obj", "1.0", "row one", "2.0"),
        _fixed_line("", "y", "obj", "1.0"),
        "RHS",
        _fixed_line("", "RHS", "row one", "5.0"),
        "ENDATA",
    ]
) + "\n"


def test_fixed_format_names_with_blanks():
    m = parse_mps(FIXED_MPS, dialect="fixed")
    assert [v.name for v in m.variables] == ["my var", "y"]
    assert m.rows[m.row_index("row one")].terms[0][1] == 2.0


def test_auto_sniffs_fixed():
    auto = parse_mps(FIXED_MPS, dialect="auto")
    assert [v.name for v in auto.variables] == ["my var", "y"]


def test_auto_prefers_free(two_var_mps):
    m = parse_mps(two_var_mps, dialect="auto")
    assert [v.name for v in m.variables] == ["x1", "x2"]


def test_nonzeros_invariant_under_permutation(two_var_mps):
    base = model_stats(parse_mps(two_var_mps))
    shuffled = (
        "NAME twovars\nROWS\n N obj\n G c1\nCOLUMNS\n"
        " x2 c1 1\n x2 obj 1\n x1 obj 1\n x1 c1 1\n"
        "RHS\n RHS1 c1 1\nENDATA\n"
    )
    assert model_stats(parse_mps(shuffled)).n_nonzeros == base.n_nonzeros


def test_duplicate_column_entries_sum():
    text = (
        "NAME m\nROWS\n N obj\n L c\nCOLUMNS\n x obj 1\n x c 2\n x c 3\n"
        "RHS\n RHS1 c 9\nENDATA\n"
    )
    m = parse_mps(text)
    assert m.rows[m.row_index("c")].terms == ((0, 5.0),)


# -- round trip -------------------------------------------------------------


def _random_model(seed: int):
    rng = random.Random(seed)
    b = ModelBuilder(
        name="m",
        sense=ObjSense.MAX if rng.random() < 0.5 else ObjSense.MIN,
        constant=float(rng.randint(-3, 3)),
    )
    n = rng.randint(1, 6)
    for j in range(n):
        kind = rng.choice(list(Integrality))
        if kind is Integrality.BINARY:
            b.add_binary(f"v{j}", obj=float(rng.randint(-4, 4)))
            continue
        lower = rng.choice([-INF, -2.0, 0.0, 1.5])
        upper = rng.choice([INF, 8.0, 2.5])
        if lower == 1.5 and upper == 2.5 and rng.random() < 0.3:
            lower = upper
        if lower > upper:
            lower, upper = upper, lower
        b.add_variable(f"v{j}", lower, upper, kind, obj=float(rng.randint(-4, 4)))
    for r in range(rng.randint(0, 6)):
        support = rng.sample(range(n), rng.randint(1, n))
        terms = {f"v{j}": rng.choice([-2.5, -1.0, 1.0, 3.25]) for j in support}
        sense = rng.choice([Sense.L, Sense.G, Sense.E])
        range_ = rng.choice([None, None, 2.0, -1.5])
        b.add_row(f"r{r}", sense, terms, float(rng.randint(-5, 5)), range_)
    return b.build()


@given(st.integers(min_value=0, max_value=10_000))
def test_serialize_parse_round_trip(seed):
    model = _random_model(seed)
    text = serialize_model(model)
    back = parse_mps(text)
    assert back == model
    # a second hop is byte-stable
    assert serialize_model(back) == text


def test_round_trip_two_var(two_var_mps):
    model = parse_mps(two_var_mps)
    again = parse_mps(serialize_model(model))
    assert again == model


def test_empty_column_registered():
    b = ModelBuilder(name="m")
    b.add_variable("used", 0, 5, obj=1.0)
    b.add_variable("unused", 0, 3)
    model = b.build()
    back = parse_mps(serialize_model(model))
    assert [v.name for v in back.variables] == ["used", "unused"]
    assert back == model


def test_serializer_rejects_spacey_names():
    m = parse_mps(FIXED_MPS, dialect="fixed")
    with pytest.raises(ValueError):
        serialize_model(m)
