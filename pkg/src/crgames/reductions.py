"""Winner-preserving transformations between counter reachability games.

Every construction takes a :class:`GameInstance` and returns a
:class:`ReductionOutput` holding the transformed instance, a map sending
source configurations to target configurations, and the names chosen for the
gadget locations.  Gadget locations are named ``role.<edge index>`` (or just
``role`` when there is one per construction); a numeric suffix is appended if
the source already uses the name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    AxisZero,
    Configuration,
    ContractError,
    CounterSystem,
    Edge,
    GameInstance,
    Location,
    Player,
    Semantics,
    SingleConfig,
    Vector,
    check_instance,
    is_short_range,
)

FIGURE = "figure"
ALIGN = "align"
VARIANTS = (FIGURE, ALIGN)


def _identity(config: Configuration) -> Configuration:
    return config


@dataclass(frozen=True)
class ReductionOutput:
    game: GameInstance
    config_map: Callable[[Configuration], Configuration]
    fresh_names: Mapping[str, str] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()
    # target location -> source location, for target locations that stand
    # for a source location with the same counter values
    origin: Mapping[int, int] = field(default_factory=dict)
    # the instance the last construction step was applied to
    source: Optional[GameInstance] = None


def map_config(output: ReductionOutput, config: Configuration) -> Configuration:
    return output.config_map(Configuration(config[0], tuple(config[1])))


def project_play(output: ReductionOutput, configs: Sequence[Configuration]) -> List[Configuration]:
    """Configurations of a target play that sit at copies of source locations,
    translated back to source locations."""
    return [Configuration(output.origin[c.location], c.counters) for c in configs if c.location in output.origin]


class _Builder:
    def __init__(self, dimension: int, locations: Sequence[Location] = ()) -> None:
        self.dimension = dimension
        self.locations: List[Location] = list(locations)
        self.edges: List[Edge] = []
        self.taken = {loc.name for loc in self.locations}
        self.fresh: Dict[str, str] = {}

    def add(self, role: str, name: str, owner: Player) -> int:
        candidate, k = name, 0
        while candidate in self.taken:
            k += 1
            candidate = f"{name}.{k}"
        self.taken.add(candidate)
        self.fresh[role] = candidate
        self.locations.append(Location(candidate, owner))
        return len(self.locations) - 1

    def edge(self, src: int, label: Sequence[int], dst: int) -> None:
        self.edges.append(Edge(src, tuple(label), dst))

    def system(self) -> CounterSystem:
        return CounterSystem(self.dimension, tuple(self.locations), tuple(self.edges))


def _unit(i: int, value: int, d: int) -> Vector:
    return tuple(value if j == i else 0 for j in range(d))


def _zero(d: int) -> Vector:
    return (0,) * d


def _single(game: GameInstance, what: str) -> Configuration:
    if not isinstance(game.objective, SingleConfig):
        raise ContractError(f"{what} needs a single-configuration objective")
    return game.objective.config


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ContractError(message)


def _finish(
    source: GameInstance,
    b: _Builder,
    semantics: Semantics,
    objective: object,
    config_map: Callable[[Configuration], Configuration],
    notes: Sequence[str] = (),
    origin: Optional[Mapping[int, int]] = None,
) -> ReductionOutput:
    target = GameInstance(b.system(), semantics, objective, config_map(source.initial))
    check_instance(target)
    if origin is None:
        origin = {q: q for q in range(source.system.num_locations)}
    return ReductionOutput(target, config_map, dict(b.fresh), tuple(notes), dict(origin), source)


# -- objective normalisation --------------------------------------------------


def normalize_reacher_objective(game: GameInstance) -> ReductionOutput:
    """Make the objective location Reacher-owned.

    Edges into an Opponent objective location ``q_f`` are redirected to a new
    Reacher location ``q_f'`` whose only edge leads to ``q_f`` with a zero
    label; ``q_f`` itself is mapped to ``q_f'`` so that configurations at the
    objective keep their status.
    """
    check_instance(game)
    target = _single(game, "normalize_reacher_objective")
    system = game.system
    qf = target.location
    if system.owner(qf) is Player.REACHER:
        return ReductionOutput(game, _identity, {}, (), {q: q for q in range(system.num_locations)}, game)
    b = _Builder(system.dimension, system.locations)
    goal = b.add("q_f'", f"{system.name(qf)}.goal", Player.REACHER)
    for e in system.edges:
        b.edge(e.src, e.label, goal if e.dst == qf else e.dst)
    b.edge(goal, _zero(system.dimension), qf)

    def cmap(c: Configuration) -> Configuration:
        return Configuration(goal, c.counters) if c.location == qf else c

    origin = {q: q for q in range(system.num_locations)}
    origin[goal] = qf
    notes = ["objective location moved to a fresh Reacher location; source objective location maps to it"]
    return _finish(game, b, game.semantics, SingleConfig(Configuration(goal, target.counters)), cmap, notes, origin)


def shift_objective_to_zero(game: GameInstance) -> ReductionOutput:
    check_instance(game)
    target = _single(game, "shift_objective_to_zero")
    _require(game.semantics is Semantics.Z, "shifting the objective is only sound under Z semantics")
    xf = target.counters
    if not any(xf):
        return ReductionOutput(game, _identity, {}, (), {q: q for q in range(game.system.num_locations)}, game)

    def cmap(c: Configuration) -> Configuration:
        return Configuration(c.location, tuple(a - b for a, b in zip(c.counters, xf)))

    b = _Builder(game.dimension, game.system.locations)
    b.edges = list(game.system.edges)
    objective = SingleConfig(Configuration(target.location, _zero(game.dimension)))
    return _finish(game, b, Semantics.Z, objective, cmap)


def split_to_short_range(game: GameInstance) -> ReductionOutput:
    """Replace every edge whose label has a component of magnitude m >= 2 by a
    chain of m unit steps through fresh locations owned by the edge's source
    owner.  Step k moves coordinate i by sign(v_i) while k <= |v_i|."""
    check_instance(game)
    system = game.system
    d = system.dimension
    b = _Builder(d, system.locations)
    for idx, e in enumerate(system.edges):
        m = max((abs(c) for c in e.label), default=0)
        if m < 2:
            b.edge(e.src, e.label, e.dst)
            continue
        owner = system.owner(e.src)
        chain = [e.src]
        for k in range(1, m):
            chain.append(b.add(f"chain.{idx}.{k}", f"chain.{idx}.{k}", owner))
        chain.append(e.dst)
        for k in range(1, m + 1):
            step = tuple((1 if c > 0 else -1) if k <= abs(c) else 0 for c in e.label)
            b.edge(chain[k - 1], step, chain[k])
    return _finish(game, b, game.semantics, game.objective, _identity)


# -- VASS to Z (any dimension) ------------------------------------------------


def vass_to_z(game: GameInstance, variant: str = FIGURE) -> ReductionOutput:
    """Simulate VASS edge-disabling under Z semantics.

    Each edge with a negative label component passes through ``test.e``, from
    which the adversary of the mover may divert to a check location: ``chk``
    (only decrements available, so Reacher reaches zero iff no counter is
    negative) or ``chk.i`` (coordinate i can only grow, so Reacher reaches zero
    iff counter i was negative).  The ``figure`` variant enters ``chk.i``
    with +1 on coordinate i; ``align`` enters with a zero label.
    """
    check_instance(game)
    _require(variant in VARIANTS, f"unknown variant {variant!r}")
    _require(game.semantics is Semantics.VASS, "vass_to_z needs VASS semantics")
    target = _single(game, "vass_to_z")
    system = game.system
    _require(system.owner(target.location) is Player.REACHER, "objective location must be Reacher-owned")
    d = system.dimension
    b = _Builder(d, system.locations)
    negative = [i for i, e in enumerate(system.edges) if any(c < 0 for c in e.label)]
    tests = {}
    for i in negative:
        src_owner = system.owner(system.edges[i].src)
        tests[i] = b.add(f"test_e.{i}", f"test.{i}", src_owner.adversary)
    check = b.add("check", "chk", Player.REACHER)
    checks = [b.add(f"check_{i + 1}", f"chk.{i + 1}", Player.REACHER) for i in range(d)]
    bot = b.add("bot", "bot", Player.REACHER)
    for i, e in enumerate(system.edges):
        if i not in tests:
            b.edge(e.src, e.label, e.dst)
            continue
        t = tests[i]
        b.edge(e.src, e.label, t)
        b.edge(t, _zero(d), e.dst)
        if system.owner(e.src) is Player.REACHER:
            b.edge(t, _zero(d), check)
        else:
            for k in range(d):
                b.edge(t, _unit(k, 1, d) if variant == FIGURE else _zero(d), checks[k])
    for k in range(d):
        b.edge(check, _unit(k, -1, d), check)
    for k in range(d):
        for j in range(d):
            if j != k:
                b.edge(checks[k], _unit(j, -1, d), checks[k])
        for j in range(d):
            b.edge(checks[k], _unit(j, 1, d), checks[k])
    b.edge(target.location, tuple(-c for c in target.counters), bot)
    for p in [bot, check, *checks]:
        b.edge(p, _zero(d), bot)
    notes = []
    if variant == FIGURE:
        notes.append("check_i entry edges increment coordinate i")
    else:
        notes.append("check_i entry edges carry a zero label")
    return _finish(game, b, Semantics.Z, SingleConfig(Configuration(bot, _zero(d))), _identity, notes)


def axis_zero_to_single(game: GameInstance) -> ReductionOutput:
    """Two-dimensional VASS: replace an axis-zero objective over Q_Z by the
    single objective (bot, (0, 0)) using two reset loops."""
    check_instance(game)
    _require(game.dimension == 2, "axis_zero_to_single needs dimension 2")
    _require(game.semantics is Semantics.VASS, "axis_zero_to_single needs VASS semantics")
    _require(isinstance(game.objective, AxisZero), "axis_zero_to_single needs an axis-zero objective")
    system = game.system
    qz = sorted(game.objective.locations)
    _require(all(system.owner(q) is Player.REACHER for q in qz), "axis-zero locations must be Reacher-owned")
    b = _Builder(2, system.locations)
    b.edges = list(system.edges)
    empty1 = b.add("empty_1", "empty.1", Player.REACHER)
    empty2 = b.add("empty_2", "empty.2", Player.REACHER)
    bot = b.add("bot", "bot", Player.REACHER)
    for q in qz:
        b.edge(q, (0, 0), empty1)
        b.edge(q, (0, 0), empty2)
    b.edge(empty1, (-1, 0), empty1)
    b.edge(empty2, (0, -1), empty2)
    b.edge(empty1, (0, 0), bot)
    b.edge(empty2, (0, 0), bot)
    b.edge(bot, (0, 0), bot)
    return _finish(game, b, Semantics.VASS, SingleConfig(Configuration(bot, (0, 0))), _identity)


# -- dimension one --------------------------------------------------------------


def _one_dim(game: GameInstance, semantics: Semantics, name: str) -> Configuration:
    check_instance(game)
    _require(game.dimension == 1, f"{name} needs dimension 1")
    _require(game.semantics is semantics, f"{name} needs {semantics.value} semantics")
    target = _single(game, name)
    _require(
        game.system.owner(target.location) is Player.REACHER, "objective location must be Reacher-owned"
    )
    return target


def z_to_vass(game: GameInstance) -> ReductionOutput:
    """Encode a Z counter in a VASS with a positive and a negative copy of
    every location; crossing zero goes through ``cross.e``, where the
    adversary of the mover punishes a crossing made at a nonzero value."""
    target = _one_dim(game, Semantics.Z, "z_to_vass")
    _require(target.counters == (0,), "z_to_vass needs objective value 0")
    system = game.system
    _require(is_short_range(system), "z_to_vass needs a short-ranged system")
    n = system.num_locations
    b = _Builder(1)
    plus = [b.add(f"plus.{system.name(q)}", f"plus.{system.name(q)}", system.owner(q)) for q in range(n)]
    minus = [b.add(f"minus.{system.name(q)}", f"minus.{system.name(q)}", system.owner(q)) for q in range(n)]
    cross = {}
    for i, e in enumerate(system.edges):
        if e.label[0] != 0:
            cross[i] = b.add(f"q_e.{i}", f"cross.{i}", system.owner(e.src).adversary)
    no = b.add("no", "no", Player.REACHER)
    bot = b.add("bot", "bot", Player.REACHER)
    for i, e in enumerate(system.edges):
        v = e.label[0]
        b.edge(plus[e.src], (v,), plus[e.dst])
        b.edge(minus[e.src], (-v,), minus[e.dst])
        if i not in cross:
            continue
        qe = cross[i]
        if v == 1:
            b.edge(minus[e.src], (0,), qe)
        else:
            b.edge(plus[e.src], (0,), qe)
        if system.owner(e.src) is Player.REACHER:
            b.edge(qe, (0,), bot)
        else:
            b.edge(qe, (-1,), no)
        b.edge(qe, (1,), plus[e.dst] if v == 1 else minus[e.dst])
    b.edge(no, (-1,), no)
    b.edge(no, (0,), bot)
    b.edge(plus[target.location], (0,), bot)
    b.edge(minus[target.location], (0,), bot)
    b.edge(bot, (0,), bot)

    def cmap(c: Configuration) -> Configuration:
        x = c.counters[0]
        return Configuration(plus[c.location], (x,)) if x >= 0 else Configuration(minus[c.location], (-x,))

    origin = {plus[q]: q for q in range(n)}
    notes = ["negative source values live in the minus copy with the sign flipped"]
    return _finish(game, b, Semantics.VASS, SingleConfig(Configuration(bot, (0,))), cmap, notes, origin)


def nbvass_one_to_vass_zero(game: GameInstance, variant: str = FIGURE) -> ReductionOutput:
    """Simulate non-blocking decrements in a VASS.

    Each decrement edge goes through an Opponent location ``guess.e`` where
    Opponent declares the counter positive (``pos.e``) or zero (``zero.e``);
    Reacher can then continue or check the claim.  Under ``figure`` a false
    zero-claim is punished through ``no``; ``align`` goes straight to ``bot``
    with a decrement, which only catches the value 1.
    """
    _require(variant in VARIANTS, f"unknown variant {variant!r}")
    target = _one_dim(game, Semantics.NONBLOCKING_VASS, "nbvass_one_to_vass_zero")
    _require(target.counters == (1,), "nbvass_one_to_vass_zero needs objective value 1")
    system = game.system
    _require(is_short_range(system), "nbvass_one_to_vass_zero needs a short-ranged system")
    b = _Builder(1, system.locations)
    gadgets = {}
    for i, e in enumerate(system.edges):
        if e.label == (-1,):
            gadgets[i] = (
                b.add(f"q_e.{i}", f"guess.{i}", Player.OPPONENT),
                b.add(f"q_e>0.{i}", f"pos.{i}", Player.REACHER),
                b.add(f"q_e=0.{i}", f"zero.{i}", Player.REACHER),
            )
    no = b.add("no", "no", Player.REACHER)
    bot = b.add("bot", "bot", Player.REACHER)
    for i, e in enumerate(system.edges):
        if i not in gadgets:
            b.edge(e.src, e.label, e.dst)
            continue
        qe, pos, zero = gadgets[i]
        b.edge(e.src, (0,), qe)
        b.edge(qe, (0,), pos)
        b.edge(qe, (0,), zero)
        b.edge(zero, (0,), e.dst)
        b.edge(pos, (-1,), e.dst)
        b.edge(pos, (0,), bot)
        b.edge(zero, (-1,), no if variant == FIGURE else bot)
    b.edge(no, (-1,), no)
    b.edge(no, (0,), bot)
    b.edge(target.location, (-1,), bot)
    b.edge(bot, (0,), bot)
    notes = []
    if variant == FIGURE:
        notes.append("false zero-claims are punished through the no location")
    else:
        notes.append("false zero-claims are punished by a direct decrement into bot")
    return _finish(game, b, Semantics.VASS, SingleConfig(Configuration(bot, (0,))), _identity, notes)


def vass_zero_to_nbvass_one(game: GameInstance) -> ReductionOutput:
    """Simulate VASS edge-disabling in a non-blocking VASS.

    Each edge with label v < 0 is split through ``split.e``, owned by the
    adversary of the mover, who may leave with label v+1 to a "no" location
    that wins for them exactly when the counter was below -v.
    """
    target = _one_dim(game, Semantics.VASS, "vass_zero_to_nbvass_one")
    _require(target.counters == (0,), "vass_zero_to_nbvass_one needs objective value 0")
    system = game.system
    b = _Builder(1, system.locations)
    splits = {}
    for i, e in enumerate(system.edges):
        if e.label[0] < 0:
            splits[i] = b.add(f"q_e.{i}", f"split.{i}", system.owner(e.src).adversary)
    owners = {system.owner(system.edges[i].src) for i in splits}
    no_r = b.add("no_R", "no.R", Player.REACHER) if Player.REACHER in owners else None
    no_o = b.add("no_O", "no.O", Player.OPPONENT) if Player.OPPONENT in owners else None
    bot = b.add("bot", "bot", Player.REACHER)
    for i, e in enumerate(system.edges):
        if i not in splits:
            b.edge(e.src, e.label, e.dst)
            continue
        v = e.label[0]
        qe = splits[i]
        b.edge(e.src, (0,), qe)
        b.edge(qe, (v,), e.dst)
        b.edge(qe, (v + 1,), no_r if system.owner(e.src) is Player.REACHER else no_o)
    if no_r is not None:
        b.edge(no_r, (-1,), no_r)
        b.edge(no_r, (0,), bot)
    if no_o is not None:
        b.edge(no_o, (1,), bot)
    b.edge(target.location, (1,), bot)
    b.edge(bot, (0,), bot)
    return _finish(game, b, Semantics.NONBLOCKING_VASS, SingleConfig(Configuration(bot, (1,))), _identity)


REDUCTIONS: Dict[str, Callable[..., ReductionOutput]] = {
    "normalize_reacher_objective": normalize_reacher_objective,
    "shift_objective_to_zero": shift_objective_to_zero,
    "split_to_short_range": split_to_short_range,
    "vass_to_z": vass_to_z,
    "axis_zero_to_single": axis_zero_to_single,
    "z_to_vass": z_to_vass,
    "nbvass_one_to_vass_zero": nbvass_one_to_vass_zero,
    "vass_zero_to_nbvass_one": vass_zero_to_nbvass_one,
}

WITH_VARIANT = frozenset({"vass_to_z", "nbvass_one_to_vass_zero"})


def apply_reduction(name: str, game: GameInstance, variant: str = FIGURE) -> ReductionOutput:
    try:
        fn = REDUCTIONS[name]
    except KeyError:
        raise ContractError(f"unknown reduction {name!r}") from None
    if name in WITH_VARIANT:
        return fn(game, variant)
    return fn(game)
