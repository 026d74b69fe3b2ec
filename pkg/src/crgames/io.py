"""The crg-v1 text format and a seeded random instance generator.

A file looks like::

    crg-v1
    dim 1
    semantics vass
    loc a R
    loc f O
    edge a f -1
    init a 3
    objective single f 0

``#`` starts a comment.  Objectives are ``single <loc> <x...>``,
``zeroset <loc>+`` or ``axiszero <loc>+``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from .core import (
    NAME_RE,
    AxisZero,
    Configuration,
    CounterSystem,
    Diagnostic,
    Edge,
    GameInstance,
    Location,
    LocationsAtZero,
    Player,
    Semantics,
    SingleConfig,
    validate_instance,
)

HEADER = "crg-v1"

_SEMANTICS = {s.value: s for s in Semantics}
_OWNERS = {p.value: p for p in Player}


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class InstanceError(ValueError):
    """The text parsed but describes an invalid instance."""

    def __init__(self, diagnostics: List[Diagnostic]) -> None:
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


def _tokens(line: str) -> List[Tuple[int, str]]:
    """Whitespace-separated tokens with 1-based columns."""
    out = []
    i, n = 0, len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def parse(text: str) -> GameInstance:
    dim: Optional[int] = None
    semantics: Optional[Semantics] = None
    locations: List[Location] = []
    index = {}
    edges: List[Edge] = []
    initial: Optional[Configuration] = None
    objective = None
    header_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        col, word = toks[0]

        def fail(message: str, column: int = col) -> ParseError:
            return ParseError(lineno, column, message)

        if not header_seen:
            if word != HEADER or len(toks) != 1:
                raise fail(f"expected header {HEADER!r}")
            header_seen = True
            continue

        def integer(tok: Tuple[int, str]) -> int:
            c, s = tok
            body = s[1:] if s.startswith("-") else s
            if not body.isdigit() or not body.isascii():
                raise fail(f"expected an integer, got {s!r}", c)
            return int(s)

        def location(tok: Tuple[int, str]) -> int:
            c, s = tok
            if s not in index:
                raise fail(f"unknown location {s!r}", c)
            return index[s]

        def need_dim() -> int:
            if dim is None:
                raise fail(f"'{word}' before 'dim'")
            return dim

        def vector(toks_: List[Tuple[int, str]]) -> Tuple[int, ...]:
            d = need_dim()
            if len(toks_) != d:
                column = toks_[d][0] if len(toks_) > d else len(line) + 1
                raise fail(f"'{word}' expects {d} counter value(s), got {len(toks_)}", column)
            return tuple(integer(t) for t in toks_)

        args = toks[1:]
        if word == "dim":
            if dim is not None:
                raise fail("duplicate 'dim'")
            if len(args) != 1:
                raise fail("'dim' takes one argument")
            dim = integer(args[0])
            if dim < 1:
                raise fail("dimension must be at least 1", args[0][0])
        elif word == "semantics":
            if semantics is not None:
                raise fail("duplicate 'semantics'")
            if len(args) != 1 or args[0][1] not in _SEMANTICS:
                raise fail("'semantics' takes one of z, vass, nbvass")
            semantics = _SEMANTICS[args[0][1]]
        elif word == "loc":
            if len(args) != 2:
                raise fail("'loc' takes a name and an owner")
            (nc, name), (oc, owner) = args
            if not NAME_RE.match(name):
                raise fail(f"bad location name {name!r}", nc)
            if name in index:
                raise fail(f"duplicate location {name!r}", nc)
            if owner not in _OWNERS:
                raise fail(f"owner must be R or O, got {owner!r}", oc)
            index[name] = len(locations)
            locations.append(Location(name, _OWNERS[owner]))
        elif word == "edge":
            if len(args) < 2:
                raise fail("'edge' takes a source, a target and a label")
            src, dst = location(args[0]), location(args[1])
            edges.append(Edge(src, vector(args[2:]), dst))
        elif word == "init":
            if initial is not None:
                raise fail("duplicate 'init'")
            if not args:
                raise fail("'init' takes a location and a vector")
            initial = Configuration(location(args[0]), vector(args[1:]))
        elif word == "objective":
            if objective is not None:
                raise fail("duplicate 'objective'")
            if not args:
                raise fail("'objective' needs a kind")
            kc, kind = args[0]
            rest = args[1:]
            if kind == "single":
                if not rest:
                    raise fail("'objective single' takes a location and a vector")
                objective = SingleConfig(Configuration(location(rest[0]), vector(rest[1:])))
            elif kind in ("zeroset", "axiszero"):
                if not rest:
                    raise fail(f"'objective {kind}' needs at least one location")
                locs = [location(t) for t in rest]
                if len(set(locs)) != len(locs):
                    raise fail("repeated location in objective set")
                objective = LocationsAtZero(frozenset(locs)) if kind == "zeroset" else AxisZero(frozenset(locs))
            else:
                raise fail(f"unknown objective kind {kind!r}", kc)
        else:
            raise fail(f"unknown directive {word!r}")

    last = len(text.splitlines()) + 1
    if not header_seen:
        raise ParseError(1, 1, f"missing header {HEADER!r}")
    for what, value in (("dim", dim), ("semantics", semantics), ("init", initial), ("objective", objective)):
        if value is None:
            raise ParseError(last, 1, f"missing '{what}'")
    game = GameInstance(CounterSystem(dim, tuple(locations), tuple(edges)), semantics, objective, initial)
    diags = validate_instance(game)
    if diags:
        raise InstanceError(diags)
    return game


def _vec(v: Iterable[int]) -> str:
    return " ".join(str(x) for x in v)


def serialize(game: GameInstance, comments: Iterable[str] = ()) -> str:
    """Canonical crg-v1 text; ``comments`` become leading ``#`` lines."""
    system = game.system
    name = system.name
    lines = [f"# {c}" for c in comments]
    lines.append(HEADER)
    lines.append(f"dim {system.dimension}")
    lines.append(f"semantics {game.semantics.value}")
    lines.extend(f"loc {loc.name} {loc.owner.value}" for loc in system.locations)
    lines.extend(f"edge {name(e.src)} {name(e.dst)} {_vec(e.label)}" for e in system.edges)
    lines.append(f"init {name(game.initial.location)} {_vec(game.initial.counters)}")
    obj = game.objective
    if isinstance(obj, SingleConfig):
        lines.append(f"objective single {name(obj.config.location)} {_vec(obj.config.counters)}")
    else:
        kind = "zeroset" if isinstance(obj, LocationsAtZero) else "axiszero"
        lines.append(f"objective {kind} {' '.join(name(q) for q in sorted(obj.locations))}")
    return "\n".join(lines) + "\n"


# -- random generation ---------------------------------------------------------

OBJECTIVE_KINDS = ("single", "single-reacher", "zeroset", "axiszero")


@dataclass(frozen=True)
class GenParams:
    """Shape of generated instances.

    ``objective_kind`` is ``single`` (objective location owner by coin flip),
    ``single-reacher`` (Reacher-owned), ``zeroset`` or ``axiszero`` (the
    location sets are Reacher-owned).  ``objective_value`` pins the objective
    vector; otherwise each component is drawn from ``[lo, objective_bound]``.
    Initial counters are drawn from ``[-init_bound, init_bound]``
    (``[0, init_bound]`` for the nonnegative semantics).
    """

    num_locations: int = 3
    dimension: int = 1
    label_bound: int = 1
    edges_per_location: Tuple[int, int] = (1, 2)
    semantics: Semantics = Semantics.Z
    objective_kind: str = "single"
    reacher_fraction: Union[Fraction, float] = Fraction(1, 2)
    init_bound: int = 4
    objective_bound: int = 2
    objective_value: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        lo, hi = self.edges_per_location
        if self.num_locations < 1:
            raise ValueError("num_locations must be at least 1")
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if self.label_bound < 0 or self.init_bound < 0 or self.objective_bound < 0:
            raise ValueError("bounds must be nonnegative")
        if not 1 <= lo <= hi:
            raise ValueError("edges_per_location must satisfy 1 <= min <= max")
        if not 0 <= self.reacher_fraction <= 1:
            raise ValueError("reacher_fraction must lie in [0, 1]")
        if self.objective_kind not in OBJECTIVE_KINDS:
            raise ValueError(f"objective_kind must be one of {OBJECTIVE_KINDS}")
        if self.objective_kind == "axiszero" and self.dimension != 2:
            raise ValueError("axiszero objectives need dimension 2")
        if self.objective_value is not None:
            if len(self.objective_value) != self.dimension:
                raise ValueError("objective_value has the wrong length")
            if self.semantics.nonnegative and min(self.objective_value) < 0:
                raise ValueError("objective_value must be nonnegative for this semantics")


def generate(params: GenParams, seed: int) -> GameInstance:
    """Deterministic random instance for ``(params, seed)``.

    Every location gets at least one outgoing edge.
    """
    rng = random.Random(f"crg-v1/{seed}")
    n, d = params.num_locations, params.dimension
    b = params.label_bound
    objective_loc = rng.randrange(n)
    owners = [Player.REACHER if rng.random() < params.reacher_fraction else Player.OPPONENT for _ in range(n)]
    if params.objective_kind == "single":
        owners[objective_loc] = Player.REACHER if rng.random() < 0.5 else Player.OPPONENT
    else:
        owners[objective_loc] = Player.REACHER
    locations = tuple(Location(f"q{i}", owners[i]) for i in range(n))
    lo_e, hi_e = params.edges_per_location
    edges = []
    for src in range(n):
        for _ in range(rng.randint(lo_e, hi_e)):
            label = tuple(rng.randint(-b, b) for _ in range(d))
            edges.append(Edge(src, label, rng.randrange(n)))
    low = 0 if params.semantics.nonnegative else -params.init_bound
    initial = Configuration(rng.randrange(n), tuple(rng.randint(low, params.init_bound) for _ in range(d)))
    if params.objective_kind in ("single", "single-reacher"):
        if params.objective_value is not None:
            target = tuple(params.objective_value)
        else:
            olow = 0 if params.semantics.nonnegative else -params.objective_bound
            target = tuple(rng.randint(olow, params.objective_bound) for _ in range(d))
        objective = SingleConfig(Configuration(objective_loc, target))
    else:
        chosen = {objective_loc} | {q for q in range(n) if rng.random() < 0.3}
        chosen = {q for q in chosen if owners[q] is Player.REACHER}
        objective = (LocationsAtZero if params.objective_kind == "zeroset" else AxisZero)(frozenset(chosen))
    system = CounterSystem(d, locations, tuple(edges))
    return GameInstance(system, params.semantics, objective, initial)


__all__ = [
    "GenParams",
    "HEADER",
    "InstanceError",
    "ParseError",
    "generate",
    "parse",
    "serialize",
]
