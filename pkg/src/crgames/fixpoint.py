"""Zero-reachability on one-dimensional non-blocking VASS.

Winning configurations for the objective ``(q_f, 0)`` are downward closed in
the counter value, so the winning region is described by one threshold per
location: ``(q, x)`` is winning iff ``x <= M[q]``.  The thresholds are the
least fixpoint of a backward update over the edges, computed here by Kleene
iteration with a cap so the loop always terminates.  A capped run can only
under-estimate thresholds; a second run that promotes over-cap values to
``top`` over-estimates them, and a verdict is returned only when one of the
two runs certifies it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import AbstractSet, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .core import (
    Configuration,
    ContractError,
    CounterSystem,
    Edge,
    GameInstance,
    Location,
    LocationsAtZero,
    Player,
    Semantics,
    SingleConfig,
    check_instance,
)
from .oracle import Verdict

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Value:
    """Threshold value: bottom < 0 < 1 < ... < top.

    ``bottom`` means no counter value wins, ``top`` means every value wins.
    """

    kind: int
    n: int = 0

    def __str__(self) -> str:
        if self.kind == 0:
            return "bottom"
        if self.kind == 2:
            return "top"
        return str(self.n)

    @property
    def is_finite(self) -> bool:
        return self.kind == 1

    def admits(self, x: int) -> bool:
        """Whether counter value ``x`` is at or below this threshold."""
        return self.kind == 2 or (self.kind == 1 and x <= self.n)

    @classmethod
    def parse(cls, text: str) -> "Value":
        if text == "bottom":
            return BOTTOM
        if text == "top":
            return TOP
        return finite(int(text))


BOTTOM = Value(0)
TOP = Value(2)


def finite(n: int) -> Value:
    if n < 0:
        raise ValueError(f"finite threshold must be nonnegative, got {n}")
    return Value(1, n)


def transfer(m: Value, v: int) -> Value:
    """Threshold at the source of an edge labelled ``v`` whose target has
    threshold ``m``: ``x + v`` clamped at zero is at most ``m`` iff ``x <= m - v``."""
    if not m.is_finite:
        return m
    t = m.n - v
    return Value(1, t) if t >= 0 else BOTTOM


class FixpointStatus(Enum):
    EXACT_FIXPOINT = "exact-fixpoint"
    EARLY_YES = "early-yes"
    CAP_SATURATED = "cap-saturated"


@dataclass(frozen=True)
class FixpointParams:
    cap: int
    max_rounds: int
    escalation: int = 3


def default_params(system: CounterSystem, x0: int = 0) -> FixpointParams:
    n = system.num_locations
    cap = x0 + n * (1 + system.max_label())
    return FixpointParams(cap=cap, max_rounds=n * (cap + 2), escalation=3)


def _escalated(params: FixpointParams) -> FixpointParams:
    cap = max(params.cap * 2, 1)
    return replace(params, cap=cap, max_rounds=max(params.max_rounds * 2, 1))


ValueTable = Dict[int, Value]


@dataclass(frozen=True)
class FixpointResult:
    table: ValueTable
    status: FixpointStatus
    rounds: int
    clampings: int = 0


def _require_dim1(system: CounterSystem) -> None:
    if system.dimension != 1:
        raise ContractError(f"the threshold fixpoint needs dimension 1, got {system.dimension}")


def _sweep(system: CounterSystem, table: Sequence[Value]) -> List[Optional[Value]]:
    """Best threshold each location can guarantee from the previous table.

    ``None`` marks a stuck Reacher location, which contributes nothing.
    """
    out: List[Optional[Value]] = []
    edges = system.edges
    for q in range(system.num_locations):
        succ = system.outgoing(q)
        reacher = system.owner(q) is Player.REACHER
        if not succ:
            out.append(None if reacher else TOP)
            continue
        vals = [transfer(table[edges[e].dst], edges[e].label[0]) for e in succ]
        out.append(max(vals) if reacher else min(vals))
    return out


def _initial_table(system: CounterSystem, objective_set: AbstractSet[int]) -> List[Value]:
    for q in objective_set:
        if not 0 <= q < system.num_locations:
            raise ContractError(f"objective location {q} does not exist")
    return [finite(0) if q in objective_set else BOTTOM for q in range(system.num_locations)]


def nb_fixpoint(
    system: CounterSystem,
    objective_set: AbstractSet[int],
    query: Configuration,
    params: Optional[FixpointParams] = None,
) -> FixpointResult:
    """Kleene iteration of the threshold table.

    Each round is one Jacobi sweep: every location reads the previous round's
    table.  Values above ``params.cap`` are clamped to the cap and counted in
    ``clampings``.  Stops as soon as the query configuration is certified
    winning, when a round changes nothing, or after ``params.max_rounds``.
    """
    _require_dim1(system)
    x0 = query[1][0]
    params = params or default_params(system, x0)
    if params.cap < x0:
        raise ContractError(f"cap {params.cap} is below the queried value {x0}")
    q0 = query[0]
    table = _initial_table(system, objective_set)
    if table[q0].admits(x0):
        return FixpointResult(dict(enumerate(table)), FixpointStatus.EARLY_YES, 0)
    capped = finite(params.cap)
    clampings = 0
    for rnd in range(1, params.max_rounds + 1):
        new = list(table)
        for q, cand in enumerate(_sweep(system, table)):
            if cand is None:
                continue
            if cand.is_finite and cand.n > params.cap:
                clampings += 1
                cand = capped
            if cand > new[q]:
                new[q] = cand
        changed = new != table
        table = new
        if table[q0].admits(x0):
            return FixpointResult(dict(enumerate(table)), FixpointStatus.EARLY_YES, rnd, clampings)
        if not changed:
            status = FixpointStatus.EXACT_FIXPOINT if clampings == 0 else FixpointStatus.CAP_SATURATED
            return FixpointResult(dict(enumerate(table)), status, rnd, clampings)
    logger.debug("threshold iteration hit max_rounds=%d", params.max_rounds)
    return FixpointResult(dict(enumerate(table)), FixpointStatus.CAP_SATURATED, params.max_rounds, clampings)


def nb_upper_bound(system: CounterSystem, objective_set: AbstractSet[int], cap: int) -> ValueTable:
    """Over-approximate thresholds: values above ``cap`` jump to ``top``.

    Every update is at least the exact one, so the result dominates the true
    least fixpoint; with at most ``cap + 3`` values per location it terminates.
    """
    _require_dim1(system)
    table = _initial_table(system, objective_set)
    while True:
        new = list(table)
        for q, cand in enumerate(_sweep(system, table)):
            if cand is None:
                continue
            if cand.is_finite and cand.n > cap:
                cand = TOP
            if cand > new[q]:
                new[q] = cand
        if new == table:
            return dict(enumerate(table))
        table = new


def one_round(system: CounterSystem, table: ValueTable) -> ValueTable:
    """Apply one unclamped sweep; a least fixpoint is left unchanged."""
    cur = [table[q] for q in range(system.num_locations)]
    new = list(cur)
    for q, cand in enumerate(_sweep(system, cur)):
        if cand is not None and cand > new[q]:
            new[q] = cand
    return dict(enumerate(new))


def dump_table(system: CounterSystem, table: ValueTable) -> str:
    return "".join(f"value {system.name(q)} {table[q]}\n" for q in range(system.num_locations))


# -- Q_Z and the decision pipeline ----------------------------------------------


@dataclass(frozen=True)
class QzResult:
    members: FrozenSet[int]
    unknown: FrozenSet[int] = frozenset()
    # fixpoint rounds spent on each location's query
    rounds: Mapping[int, int] = field(default_factory=dict)

    @property
    def upper(self) -> FrozenSet[int]:
        return self.members | self.unknown


def compute_qz(
    system: CounterSystem, q_f: int, params: Optional[FixpointParams] = None
) -> QzResult:
    """Locations from which Reacher forces ``(q_f, 0)`` starting at counter 0.

    Locations that neither a capped run nor the over-approximation can settle
    are returned in ``unknown``.
    """
    _require_dim1(system)
    members, unknown = set(), set()
    rounds: Dict[int, int] = {}
    for q in range(system.num_locations):
        p = params or default_params(system, 0)
        rounds[q] = 0
        for attempt in range(p.escalation + 1):
            res = nb_fixpoint(system, {q_f}, Configuration(q, (0,)), p)
            rounds[q] += res.rounds
            if res.status is not FixpointStatus.CAP_SATURATED:
                break
            p = _escalated(p)
        if res.status is FixpointStatus.EARLY_YES:
            members.add(q)
        elif res.status is FixpointStatus.CAP_SATURATED:
            if nb_upper_bound(system, {q_f}, p.cap)[q] != BOTTOM:
                unknown.add(q)
    return QzResult(frozenset(members), frozenset(unknown), rounds)


@lru_cache(maxsize=64)
def _cached_qz(system: CounterSystem, q_f: int) -> QzResult:
    return compute_qz(system, q_f)


def build_qz_vass(
    system: CounterSystem, qz: AbstractSet[int], initial: Optional[Configuration] = None
) -> GameInstance:
    """VASS restricted to ``qz`` where every edge leaving ``qz`` becomes a
    ``+1`` edge into a sink ``bot``; objective: any kept location at zero."""
    _require_dim1(system)
    if not qz or any(not 0 <= q < system.num_locations for q in qz):
        raise ContractError("Q_Z must be a nonempty set of existing locations")
    keep = [q for q in range(system.num_locations) if q in qz]
    index = {q: i for i, q in enumerate(keep)}
    locs = [system.locations[q] for q in keep]
    names = {loc.name for loc in locs}
    bot_name, k = "bot", 0
    while bot_name in names:
        k += 1
        bot_name = f"bot.{k}"
    bot = len(locs)
    locs.append(Location(bot_name, Player.REACHER))
    edges = []
    for e in system.edges:
        if e.src not in index:
            continue
        if e.dst in index:
            edges.append(Edge(index[e.src], e.label, index[e.dst]))
        else:
            edges.append(Edge(index[e.src], (1,), bot))
    edges.append(Edge(bot, (0,), bot))
    if initial is None:
        start = Configuration(0, (0,))
    else:
        start = Configuration(index[initial[0]], tuple(initial[1]))
    objective = LocationsAtZero(frozenset(range(len(locs))))
    return GameInstance(CounterSystem(1, tuple(locs), tuple(edges)), Semantics.VASS, objective, start)


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    diagnostics: Tuple[str, ...] = ()
    qz: Optional[QzResult] = None
    result: Optional[FixpointResult] = None
    certificate: str = ""
    initial_location: Optional[int] = None

    @property
    def rounds(self) -> int:
        """Fixpoint rounds behind the verdict: the Q_Z query at the initial
        location plus the final threshold run."""
        total = self.result.rounds if self.result is not None else 0
        if self.qz is not None and self.initial_location is not None:
            total += self.qz.rounds.get(self.initial_location, 0)
        return total


def decide_nbvass_zero(game: GameInstance, params: Optional[FixpointParams] = None) -> Decision:
    """Decide ``(q_0, x_0)`` for the objective ``(q_f, 0)`` in two stages.

    First the set Q_Z of locations winning from counter 0 is computed.  The
    answer is then whether Reacher can force some ``(q, 0)`` with ``q`` in
    Q_Z: such a visit can be extended to a win, and every winning play ends
    in ``(q_f, 0)`` with ``q_f`` in Q_Z.  Downward closure makes the second
    question a threshold fixpoint again.
    """
    check_instance(game)
    system = game.system
    _require_dim1(system)
    if game.semantics is not Semantics.NONBLOCKING_VASS:
        raise ContractError("decide_nbvass_zero needs non-blocking VASS semantics")
    obj = game.objective
    if not isinstance(obj, SingleConfig) or obj.config.counters != (0,):
        raise ContractError("decide_nbvass_zero needs a single objective with counter 0")
    q0, (x0,) = game.initial
    diags: List[str] = []
    qz = _cached_qz(system, obj.config.location)
    if qz.unknown:
        diags.append(f"Q_Z undecided at {sorted(system.name(q) for q in qz.unknown)}")
    p = params or default_params(system, x0)
    res = None
    for attempt in range(p.escalation + 1):
        res = nb_fixpoint(system, qz.members, game.initial, p)
        if res.status is FixpointStatus.EARLY_YES:
            return Decision(Verdict.WIN, tuple(diags), qz, res, "early-yes", q0)
        if res.status is FixpointStatus.EXACT_FIXPOINT and not qz.unknown:
            return Decision(Verdict.LOSE, tuple(diags), qz, res, "exact-fixpoint", q0)
        if res.status is FixpointStatus.EXACT_FIXPOINT:
            break
        diags.append(f"cap {p.cap} saturated after {res.rounds} rounds")
        p = _escalated(p)
    upper = nb_upper_bound(system, qz.upper, p.cap)
    if not upper[q0].admits(x0):
        return Decision(Verdict.LOSE, tuple(diags), qz, res, "upper-bound", q0)
    return Decision(Verdict.UNKNOWN, tuple(diags), qz, res, "", q0)


__all__ = [
    "BOTTOM",
    "TOP",
    "Decision",
    "FixpointParams",
    "FixpointResult",
    "FixpointStatus",
    "QzResult",
    "Value",
    "ValueTable",
    "build_qz_vass",
    "compute_qz",
    "decide_nbvass_zero",
    "default_params",
    "dump_table",
    "finite",
    "nb_fixpoint",
    "nb_upper_bound",
    "one_round",
    "transfer",
]
