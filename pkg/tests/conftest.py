import hypothesis
import pytest

from mipstruct.model import Integrality, ModelBuilder, ObjSense, Sense

hypothesis.settings.register_profile(
    "ci", deadline=None, derandomize=True, max_examples=50
)
hypothesis.settings.load_profile("ci")


TWO_VAR_MPS = """\
NAME twovars
ROWS
 N obj
 G c1
COLUMNS
 x1 obj 1
 x1 c1 1
 x2 obj 1
 x2 c1 1
RHS
 RHS1 c1 1
ENDATA
"""


@pytest.fixture
def two_var_mps() -> str:
    return TWO_VAR_MPS


def build_knapsack(values, weights, capacity, sense=ObjSense.MAX):
    """Binary knapsack used as a small workhorse model in several suites."""
    b = ModelBuilder(name="knap", sense=sense)
    for i, v in enumerate(values, start=1):
        b.add_binary(f"x_{i}", obj=float(v))
    b.add_row(
        "cap",
        Sense.L,
        {f"x_{i}": float(w) for i, w in enumerate(weights, start=1)},
        float(capacity),
    )
    return b.build()


def build_random_binary_model(rng, n_vars, n_rows, name="rand"):
    """Random all-binary model with small integer data; deterministic given
    the caller's seeded ``random.Random``."""
    b = ModelBuilder(name=name)
    for j in range(1, n_vars + 1):
        b.add_binary(f"x_{j}", obj=float(rng.randint(-5, 5)))
    senses = (Sense.L, Sense.G, Sense.E)
    for r in range(1, n_rows + 1):
        support = rng.sample(range(1, n_vars + 1), rng.randint(1, n_vars))
        terms = {f"x_{j}": float(rng.choice([-3, -2, -1, 1, 2, 3])) for j in support}
        sense = senses[rng.randrange(3)]
        if sense is Sense.E:
            # keep equality rows satisfiable reasonably often
            rhs = float(rng.randint(-2, 2))
        else:
            rhs = float(rng.randint(-4, 6))
        b.add_row(f"r_{r}", sense, terms, rhs)
    return b.build()


def assert_tree_equal(a, b):
    """Byte-identical directory trees (names and contents)."""
    import pathlib

    a, b = pathlib.Path(a), pathlib.Path(b)
    la = sorted(p.relative_to(a) for p in a.rglob("*"))
    lb = sorted(p.relative_to(b) for p in b.rglob("*"))
    assert la == lb, f"tree shapes differ: {la} vs {lb}"
    for rel in la:
        pa, pb = a / rel, b / rel
        assert pa.is_dir() == pb.is_dir()
        if pa.is_file():
            assert pa.read_bytes() == pb.read_bytes(), f"{rel} differs"
