import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crgames.core import Semantics, is_short_range, validate_instance
from crgames.io import GenParams, InstanceError, ParseError, generate, parse, serialize

MINIMAL = """crg-v1
dim 1
semantics z
loc a R
edge a a 0
init a 0
objective single a 0
"""


def test_minimal():
    g = parse(MINIMAL)
    assert g.system.num_locations == 1
    assert serialize(g) == MINIMAL


def test_comments_and_blank_lines_ignored():
    text = "# leading note\n\n" + MINIMAL.replace("loc a R", "loc a R   # owner")
    assert parse(text) == parse(MINIMAL)


def test_all_objective_kinds():
    base = "crg-v1\ndim 2\nsemantics vass\nloc a R\nloc b O\nedge a b 1 -1\ninit a 0 3\n"
    for line in ("objective single b 1 1", "objective zeroset a b", "objective axiszero a"):
        g = parse(base + line + "\n")
        assert serialize(g).endswith(line + "\n")


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("dim 1\n", 1, "header"),
        (MINIMAL.replace("edge a a 0", "edge a a 1 2"), 5, "counter value"),
        (MINIMAL.replace("edge a a 0", "edge a b 0"), 5, "unknown location"),
        (MINIMAL + "init a 0\n", 8, "duplicate 'init'"),
        (MINIMAL + "objective single a 0\n", 8, "duplicate 'objective'"),
        (MINIMAL.replace("dim 1", "dim 1\nfrobnicate"), 3, "unknown directive"),
        (MINIMAL.replace("loc a R", "loc a X"), 4, "owner"),
        (MINIMAL.replace("loc a R", "loc a R\nloc a O"), 5, "duplicate location"),
        (MINIMAL.replace("init a 0", "init a x"), 6, "integer"),
        (MINIMAL.replace("semantics z", "semantics q"), 3, "semantics"),
        (MINIMAL.replace("init a 0\n", ""), 7, "missing 'init'"),
        (MINIMAL.replace("objective single a 0", "objective weird a"), 7, "objective kind"),
    ],
)
def test_syntax_errors(text, line, message):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == line
    assert message in info.value.message


def test_arity_error_column():
    with pytest.raises(ParseError) as info:
        parse(MINIMAL.replace("edge a a 0", "edge a a 1 2"))
    assert info.value.column == 12


def test_semantic_error():
    with pytest.raises(InstanceError) as info:
        parse(MINIMAL.replace("semantics z", "semantics vass").replace("init a 0", "init a -1"))
    assert [d.code for d in info.value.diagnostics] == ["negative-counter"]


def test_notes_become_comments():
    g = parse(MINIMAL)
    text = serialize(g, ["built by a test", "second note"])
    assert text.startswith("# built by a test\n# second note\ncrg-v1\n")
    assert parse(text) == g


PARAM_GRID = [
    GenParams(num_locations=n, dimension=d, label_bound=b, semantics=s, objective_kind=k)
    for n in (1, 4)
    for d in (1, 2)
    for b in (0, 1, 3)
    for s in Semantics
    for k in ("single", "zeroset") + (("axiszero",) if d == 2 else ())
]


def test_roundtrip_many():
    for seed in range(1000):
        g = generate(PARAM_GRID[seed % len(PARAM_GRID)], seed)
        text = serialize(g)
        assert parse(text) == g
        assert serialize(parse(text)) == text


def test_serialize_injective():
    texts = {}
    for seed in range(300):
        g = generate(PARAM_GRID[seed % len(PARAM_GRID)], seed)
        t = serialize(g)
        assert texts.setdefault(t, g) == g


def test_generator_bounds():
    for seed in range(1000):
        p = PARAM_GRID[seed % len(PARAM_GRID)]
        g = generate(p, seed)
        assert validate_instance(g) == []
        assert g.system.num_locations == p.num_locations
        assert all(1 <= len(g.system.outgoing(q)) <= 2 for q in range(p.num_locations))
        assert all(abs(c) <= p.label_bound for e in g.system.edges for c in e.label)
        if p.semantics.nonnegative:
            assert min(g.initial.counters) >= 0
        if p.label_bound == 1:
            assert is_short_range(g.system)


def test_generator_deterministic():
    p = GenParams(num_locations=5, label_bound=2)
    assert serialize(generate(p, 9)) == serialize(generate(p, 9))
    assert serialize(generate(p, 9)) != serialize(generate(p, 10))


def test_generator_owner_pinning():
    from crgames.core import Player

    p = GenParams(num_locations=4, objective_kind="single-reacher")
    for seed in range(50):
        g = generate(p, seed)
        assert g.system.owner(g.objective.config.location) is Player.REACHER


@pytest.mark.parametrize(
    "kwargs",
    [dict(num_locations=0), dict(label_bound=-1), dict(edges_per_location=(2, 1)),
     dict(reacher_fraction=2), dict(objective_kind="axiszero"), dict(objective_value=(1, 2))],
)
def test_bad_params(kwargs):
    with pytest.raises(ValueError):
        GenParams(**kwargs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 3), st.sampled_from(list(Semantics)))
def test_roundtrip_property(seed, n, d, semantics):
    g = generate(GenParams(num_locations=n, dimension=d, label_bound=2, semantics=semantics), seed)
    assert parse(serialize(g)) == g
