"""Counter systems, game instances and the three successor semantics."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, NamedTuple, Sequence, Tuple, Union

Vector = Tuple[int, ...]

NAME_RE = re.compile(r"^[A-Za-z0-9_.+-]+$")


class Player(Enum):
    REACHER = "R"
    OPPONENT = "O"

    @property
    def adversary(self) -> "Player":
        return Player.OPPONENT if self is Player.REACHER else Player.REACHER


class Semantics(Enum):
    Z = "z"
    VASS = "vass"
    NONBLOCKING_VASS = "nbvass"

    @property
    def nonnegative(self) -> bool:
        return self is not Semantics.Z


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class Configuration(NamedTuple):
    location: int
    counters: Vector


class Edge(NamedTuple):
    src: int
    label: Vector
    dst: int


class Location(NamedTuple):
    name: str
    owner: Player


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    element: object = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class CounterSystem:
    """Arena of a counter reachability game.

    Locations and edges are kept in declaration order; every algorithm in the
    package iterates them in that order.
    """

    dimension: int
    locations: Tuple[Location, ...]
    edges: Tuple[Edge, ...]
    _out: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", tuple(Location(n, o) for n, o in self.locations))
        object.__setattr__(
            self, "edges", tuple(Edge(s, tuple(int(c) for c in v), t) for s, v, t in self.edges)
        )
        out: List[List[int]] = [[] for _ in self.locations]
        for i, e in enumerate(self.edges):
            if 0 <= e.src < len(out):
                out[e.src].append(i)
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))
        object.__setattr__(self, "_index", {loc.name: i for i, loc in enumerate(self.locations)})

    @property
    def num_locations(self) -> int:
        return len(self.locations)

    def owner(self, q: int) -> Player:
        return self.locations[q].owner

    def name(self, q: int) -> str:
        return self.locations[q].name

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown location {name!r}") from None

    def outgoing(self, q: int) -> Tuple[int, ...]:
        """Indices of the edges leaving ``q``, in declaration order."""
        return self._out[q]

    def max_label(self) -> int:
        return max((abs(c) for e in self.edges for c in e.label), default=0)


def validate(system: CounterSystem) -> List[Diagnostic]:
    diags: List[Diagnostic] = []
    if not isinstance(system.dimension, int) or system.dimension < 1:
        diags.append(Diagnostic("bad-dimension", f"dimension must be >= 1, got {system.dimension}"))
    seen = set()
    for loc in system.locations:
        if not NAME_RE.match(loc.name):
            diags.append(Diagnostic("bad-name", f"location name {loc.name!r} is not an identifier", loc))
        if loc.name in seen:
            diags.append(Diagnostic("duplicate-location", f"location {loc.name!r} declared twice", loc))
        seen.add(loc.name)
        if not isinstance(loc.owner, Player):
            diags.append(Diagnostic("bad-owner", f"location {loc.name!r} has no valid owner", loc))
    n = system.num_locations
    for i, e in enumerate(system.edges):
        if not (0 <= e.src < n and 0 <= e.dst < n):
            diags.append(Diagnostic("bad-edge-endpoint", f"edge {i} references a missing location", e))
        if len(e.label) != system.dimension:
            diags.append(
                Diagnostic(
                    "bad-label-arity",
                    f"edge {i} has a label of length {len(e.label)}, expected {system.dimension}",
                    e,
                )
            )
    return diags


def is_short_range(system: CounterSystem) -> bool:
    return all(c in (-1, 0, 1) for e in system.edges for c in e.label)


def enabled_edges(system: CounterSystem, semantics: Semantics, config: Configuration) -> List[int]:
    out = system.outgoing(config.location)
    if semantics is not Semantics.VASS:
        return list(out)
    x = config.counters
    return [
        i for i in out if all(a + b >= 0 for a, b in zip(x, system.edges[i].label))
    ]


def apply_edge(
    semantics: Semantics,
    config: Configuration,
    edge: Edge,
) -> Configuration:
    """Fire ``edge`` from ``config``.

    Raises ContractError when a VASS edge would drive a counter negative.
    """
    if edge.src != config.location:
        raise ContractError(f"edge leaves location {edge.src}, not {config.location}")
    x = tuple(a + b for a, b in zip(config.counters, edge.label))
    if semantics is Semantics.NONBLOCKING_VASS:
        x = tuple(c if c > 0 else 0 for c in x)
    elif semantics is Semantics.VASS and any(c < 0 for c in x):
        raise ContractError(f"edge {edge} is disabled at {config}")
    return Configuration(edge.dst, x)


# -- objectives -------------------------------------------------------------


@dataclass(frozen=True)
class SingleConfig:
    config: Configuration

    def contains(self, config: Configuration) -> bool:
        return config == self.config

    @property
    def locations(self) -> FrozenSet[int]:
        return frozenset((self.config.location,))


@dataclass(frozen=True)
class LocationsAtZero:
    """Every configuration ``(q, 0...0)`` with ``q`` in the set."""

    locations: FrozenSet[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", frozenset(self.locations))

    def contains(self, config: Configuration) -> bool:
        return config.location in self.locations and not any(config.counters)


@dataclass(frozen=True)
class AxisZero:
    """Two-dimensional objective: a location in the set with one counter at zero
    and the other nonnegative."""

    locations: FrozenSet[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", frozenset(self.locations))

    def contains(self, config: Configuration) -> bool:
        if config.location not in self.locations or len(config.counters) != 2:
            return False
        x1, x2 = config.counters
        return (x1 == 0 and x2 >= 0) or (x2 == 0 and x1 >= 0)


Objective = Union[SingleConfig, LocationsAtZero, AxisZero]


@dataclass(frozen=True)
class GameInstance:
    system: CounterSystem
    semantics: Semantics
    objective: Objective
    initial: Configuration

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "initial", Configuration(self.initial[0], tuple(self.initial[1]))
        )
        if isinstance(self.objective, SingleConfig):
            c = self.objective.config
            object.__setattr__(
                self, "objective", SingleConfig(Configuration(c[0], tuple(c[1])))
            )

    @property
    def dimension(self) -> int:
        return self.system.dimension

    def is_objective(self, config: Configuration) -> bool:
        return self.objective.contains(config)

    def enabled(self, config: Configuration) -> List[int]:
        return enabled_edges(self.system, self.semantics, config)

    def step(self, config: Configuration, edge_index: int) -> Configuration:
        return apply_edge(self.semantics, config, self.system.edges[edge_index])

    def with_initial(self, initial: Configuration) -> "GameInstance":
        return GameInstance(self.system, self.semantics, self.objective, initial)


def validate_instance(game: GameInstance) -> List[Diagnostic]:
    system = game.system
    diags = validate(system)
    d, n = system.dimension, system.num_locations

    def check_config(what: str, c: Configuration) -> None:
        if not 0 <= c.location < n:
            diags.append(Diagnostic("bad-location", f"{what} references a missing location", c))
        if len(c.counters) != d:
            diags.append(Diagnostic("bad-arity", f"{what} vector has length {len(c.counters)}, expected {d}", c))
        elif game.semantics.nonnegative and any(x < 0 for x in c.counters):
            diags.append(Diagnostic("negative-counter", f"{what} has a negative counter", c))

    check_config("initial configuration", game.initial)
    obj = game.objective
    if isinstance(obj, SingleConfig):
        check_config("objective", obj.config)
    else:
        if not obj.locations:
            diags.append(Diagnostic("empty-objective", "objective location set is empty", obj))
        for q in obj.locations:
            if not 0 <= q < n:
                diags.append(Diagnostic("bad-location", f"objective references missing location {q}", obj))
        if isinstance(obj, AxisZero) and d != 2:
            diags.append(Diagnostic("bad-objective", "axis-zero objective requires dimension 2", obj))
    return diags


def check_instance(game: GameInstance) -> GameInstance:
    """Return ``game`` unchanged or raise ContractError listing its diagnostics."""
    diags = validate_instance(game)
    if diags:
        raise ContractError("; ".join(str(d) for d in diags))
    return game


def make_system(
    dimension: int,
    locations: Iterable[Tuple[str, Union[Player, str]]],
    edges: Iterable[Tuple[Union[int, str], Sequence[int], Union[int, str]]],
) -> CounterSystem:
    """Convenience constructor accepting location names in edges and
    'R'/'O' owners."""
    locs = tuple(Location(n, o if isinstance(o, Player) else Player(o)) for n, o in locations)
    idx = {loc.name: i for i, loc in enumerate(locs)}

    def ref(x: Union[int, str]) -> int:
        return idx[x] if isinstance(x, str) else x

    return CounterSystem(dimension, locs, tuple(Edge(ref(s), tuple(v), ref(t)) for s, v, t in edges))


def objective_vectors(game: GameInstance) -> List[Vector]:
    """Counter vectors that a window must contain for ``game``."""
    vecs = [game.initial.counters]
    obj = game.objective
    if isinstance(obj, SingleConfig):
        vecs.append(obj.config.counters)
    else:
        vecs.append((0,) * game.dimension)
    return vecs


__all__ = [
    "AxisZero",
    "Configuration",
    "ContractError",
    "CounterSystem",
    "Diagnostic",
    "Edge",
    "GameInstance",
    "Location",
    "LocationsAtZero",
    "Objective",
    "Player",
    "Semantics",
    "SingleConfig",
    "Vector",
    "apply_edge",
    "check_instance",
    "enabled_edges",
    "is_short_range",
    "make_system",
    "objective_vectors",
    "validate",
    "validate_instance",
]
