"""Exact solving of counter reachability games on a bounded counter window.

The counters are confined to a box.  Moves that leave the box are resolved
by a :class:`BoundaryPolicy`; running the attractor once with each policy
brackets the true winning region, and :func:`certain_region` keeps only the
verdicts both runs agree can be trusted.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import (
    Configuration,
    ContractError,
    GameInstance,
    Player,
    Semantics,
    SingleConfig,
    Vector,
    check_instance,
    objective_vectors,
)

logger = logging.getLogger(__name__)

# successor markers for moves that leave the window
OUT_OBJECTIVE = -1
OUT_OTHER = -2


class Verdict(Enum):
    WIN = "win"
    LOSE = "lose"
    UNKNOWN = "unknown"


class BoundaryPolicy(Enum):
    PESSIMISTIC = "pessimistic"
    OPTIMISTIC = "optimistic"


@dataclass(frozen=True)
class Window:
    bounds: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        bounds = tuple((int(lo), int(hi)) for lo, hi in self.bounds)
        for lo, hi in bounds:
            if lo > hi:
                raise ContractError(f"empty window range {lo}:{hi}")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def box(cls, lo: int, hi: int, dimension: int) -> "Window":
        return cls(((lo, hi),) * dimension)

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse ``lo:hi[,lo:hi...]``."""
        bounds = []
        for part in text.split(","):
            lo, sep, hi = part.strip().rpartition(":")
            if not sep:
                raise ValueError(f"bad window range {part!r}, expected lo:hi")
            bounds.append((int(lo), int(hi)))
        return cls(tuple(bounds))

    def __str__(self) -> str:
        return ",".join(f"{lo}:{hi}" for lo, hi in self.bounds)

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    def contains(self, vec: Sequence[int]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(vec, self.bounds))

    def vectors(self) -> Iterator[Vector]:
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds))

    @property
    def volume(self) -> int:
        v = 1
        for lo, hi in self.bounds:
            v *= hi - lo + 1
        return v

    def clipped(self, semantics: Semantics) -> "Window":
        if not semantics.nonnegative:
            return self
        return Window(tuple((max(lo, 0), max(hi, 0)) for lo, hi in self.bounds))

    def widened(self, vectors: Sequence[Vector]) -> "Window":
        bounds = list(self.bounds)
        for vec in vectors:
            bounds = [(min(lo, x), max(hi, x)) for (lo, hi), x in zip(bounds, vec)]
        return Window(tuple(bounds))


def default_window(game: GameInstance) -> Window:
    d = game.dimension
    nonneg = game.semantics.nonnegative
    if d == 1:
        w = Window.box(0, 32, 1) if nonneg else Window.box(-16, 16, 1)
    elif d == 2:
        w = Window.box(0, 12, 2)
    else:
        w = Window.box(0, 6, d) if nonneg else Window.box(-3, 3, d)
    return w.widened(objective_vectors(game))


def _check_window(game: GameInstance, window: Window) -> Window:
    if window.dimension != game.dimension:
        raise ContractError(f"window has dimension {window.dimension}, game has {game.dimension}")
    window = window.clipped(game.semantics)
    for vec in objective_vectors(game):
        if not window.contains(vec):
            raise ContractError(f"window {window} does not contain {vec}")
    return window


class _Arena:
    """The finite game graph induced by a window.

    Configurations are numbered ``location * volume + vector offset``.
    ``succ[i]`` lists ``(edge index, target)`` for every enabled edge, where
    the target is a configuration number or one of the OUT_* markers.
    """

    def __init__(self, game: GameInstance, window: Window) -> None:
        self.game = game
        self.window = window
        system = game.system
        bounds = window.bounds
        strides = []
        s = 1
        for lo, hi in reversed(bounds):
            strides.append(s)
            s *= hi - lo + 1
        self.strides = tuple(reversed(strides))
        self.volume = s
        self.vectors: List[Vector] = list(window.vectors())
        n = system.num_locations * self.volume
        self.size = n
        self.reacher = [False] * n
        self.objective = [False] * n
        self.succ: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
        sem = game.semantics
        edges = system.edges
        is_obj = game.objective.contains
        for q in range(system.num_locations):
            owner_r = system.owner(q) is Player.REACHER
            out = system.outgoing(q)
            base = q * self.volume
            for k, vec in enumerate(self.vectors):
                i = base + k
                self.reacher[i] = owner_r
                self.objective[i] = is_obj(Configuration(q, vec))
                lst = self.succ[i]
                for e in out:
                    edge = edges[e]
                    nxt = tuple(a + b for a, b in zip(vec, edge.label))
                    if sem is Semantics.VASS:
                        if any(c < 0 for c in nxt):
                            continue
                    elif sem is Semantics.NONBLOCKING_VASS:
                        nxt = tuple(c if c > 0 else 0 for c in nxt)
                    j = self.index_of(edge.dst, nxt)
                    if j is None:
                        j = OUT_OBJECTIVE if is_obj(Configuration(edge.dst, nxt)) else OUT_OTHER
                    lst.append((e, j))
        self.preds: List[List[int]] = [[] for _ in range(n)]
        for i, lst in enumerate(self.succ):
            for _, j in lst:
                if j >= 0:
                    self.preds[j].append(i)

    def index_of(self, q: int, vec: Sequence[int]) -> Optional[int]:
        off = 0
        for x, (lo, hi), st in zip(vec, self.window.bounds, self.strides):
            if x < lo or x > hi:
                return None
            off += (x - lo) * st
        return q * self.volume + off

    def config(self, i: int) -> Configuration:
        q, k = divmod(i, self.volume)
        return Configuration(q, self.vectors[k])


@lru_cache(maxsize=16)
def _arena(game: GameInstance, window: Window) -> _Arena:
    return _Arena(game, window)


def _attractor(arena: _Arena, policy: BoundaryPolicy) -> List[int]:
    """Attractor ranks (-1 for configurations outside the attractor).

    Objective configurations and stuck Opponent configurations have rank 0.
    The queue is processed in rank order, so a Reacher configuration gets
    1 + the smallest rank among its winning successors and an Opponent
    configuration 1 + the largest.
    """
    optimistic = policy is BoundaryPolicy.OPTIMISTIC
    n = arena.size
    rank = [-1] * n
    pending = [0] * n
    rank0: List[int] = []
    rank1: List[int] = []
    for i in range(n):
        succ = arena.succ[i]
        if arena.objective[i] or (not succ and not arena.reacher[i]):
            rank[i] = 0
            rank0.append(i)
            continue
        if not succ:
            continue
        if arena.reacher[i]:
            if any(j == OUT_OBJECTIVE or (optimistic and j == OUT_OTHER) for _, j in succ):
                rank[i] = 1
                rank1.append(i)
        else:
            if not optimistic and any(j == OUT_OTHER for _, j in succ):
                pending[i] = n + len(succ) + 1  # never satisfied
                continue
            inside = sum(1 for _, j in succ if j >= 0)
            if inside == 0:
                rank[i] = 1
                rank1.append(i)
            pending[i] = inside
    queue = deque(rank0)
    queue.extend(rank1)
    reacher = arena.reacher
    preds = arena.preds
    while queue:
        j = queue.popleft()
        r = rank[j] + 1
        for i in preds[j]:
            if rank[i] >= 0:
                continue
            if reacher[i]:
                rank[i] = r
                queue.append(i)
            else:
                pending[i] -= 1
                if pending[i] == 0:
                    rank[i] = r
                    queue.append(i)
    return rank


def _attractor_round(arena: _Arena, win: Sequence[bool], policy: BoundaryPolicy) -> List[bool]:
    """One controllable-predecessor step applied to ``win``."""
    optimistic = policy is BoundaryPolicy.OPTIMISTIC

    def good(j: int) -> bool:
        if j >= 0:
            return win[j]
        return j == OUT_OBJECTIVE or optimistic

    out = []
    for i in range(arena.size):
        succ = arena.succ[i]
        if win[i] or arena.objective[i]:
            out.append(True)
        elif arena.reacher[i]:
            out.append(any(good(j) for _, j in succ))
        else:
            out.append(all(good(j) for _, j in succ))
    return out


@dataclass(frozen=True)
class RegionResult:
    """Verdict for every in-window configuration, plus attractor ranks of
    the winning ones."""

    game: GameInstance
    window: Window
    verdicts: Mapping[Configuration, Verdict]
    ranks: Mapping[Configuration, int] = field(default_factory=dict)

    def __getitem__(self, config: Configuration) -> Verdict:
        return self.verdicts[Configuration(config[0], tuple(config[1]))]

    def count(self, verdict: Verdict) -> int:
        return sum(1 for v in self.verdicts.values() if v is verdict)

    def configs(self, verdict: Verdict) -> List[Configuration]:
        return [c for c, v in self.verdicts.items() if v is verdict]

    def at_initial(self) -> Verdict:
        return self[self.game.initial]


def _region(arena: _Arena, verdicts: Sequence[Verdict], rank: Sequence[int]) -> RegionResult:
    cfg = arena.config
    return RegionResult(
        arena.game,
        arena.window,
        {cfg(i): v for i, v in enumerate(verdicts)},
        {cfg(i): r for i, r in enumerate(rank) if r >= 0},
    )


def solve_bounded(
    game: GameInstance,
    window: Optional[Window] = None,
    policy: BoundaryPolicy = BoundaryPolicy.PESSIMISTIC,
) -> RegionResult:
    check_instance(game)
    window = _check_window(game, window or default_window(game))
    arena = _arena(game, window)
    rank = _attractor(arena, policy)
    verdicts = [Verdict.WIN if r >= 0 else Verdict.LOSE for r in rank]
    return _region(arena, verdicts, rank)


def certain_region(game: GameInstance, window: Optional[Window] = None) -> RegionResult:
    check_instance(game)
    window = _check_window(game, window or default_window(game))
    arena = _arena(game, window)
    low = _attractor(arena, BoundaryPolicy.PESSIMISTIC)
    high = _attractor(arena, BoundaryPolicy.OPTIMISTIC)
    verdicts = []
    for lo, hi in zip(low, high):
        if lo >= 0:
            verdicts.append(Verdict.WIN)
        elif hi < 0:
            verdicts.append(Verdict.LOSE)
        else:
            verdicts.append(Verdict.UNKNOWN)
    return _region(arena, verdicts, low)


def attractor_round(region: RegionResult, policy: BoundaryPolicy) -> RegionResult:
    """Apply one attractor step to the Win set of a two-valued region."""
    arena = _arena(region.game, region.window)
    win = [region.verdicts[arena.config(i)] is Verdict.WIN for i in range(arena.size)]
    nxt = _attractor_round(arena, win, policy)
    verdicts = {arena.config(i): Verdict.WIN if w else Verdict.LOSE for i, w in enumerate(nxt)}
    return RegionResult(region.game, region.window, verdicts, region.ranks)


def certain_verdict(game: GameInstance, window: Optional[Window] = None) -> Verdict:
    return certain_region(game, window).at_initial()


# -- strategies and plays ----------------------------------------------------


@dataclass(frozen=True)
class PositionalStrategy:
    player: Player
    moves: Mapping[Configuration, int]

    def get(self, config: Configuration) -> Optional[int]:
        return self.moves.get(config)

    def __len__(self) -> int:
        return len(self.moves)


def extract_strategy(game: GameInstance, region: RegionResult, player: Player) -> PositionalStrategy:
    arena = _arena(game, region.window)
    verdicts = region.verdicts
    moves: Dict[Configuration, int] = {}
    for i in range(arena.size):
        if arena.reacher[i] != (player is Player.REACHER):
            continue
        c = arena.config(i)
        v = verdicts[c]
        if player is Player.REACHER:
            if v is not Verdict.WIN or arena.objective[i]:
                continue
            own = region.ranks[c]
            best: Optional[Tuple[int, int]] = None
            for e, j in arena.succ[i]:
                if j == OUT_OBJECTIVE:
                    r = 0
                elif j >= 0 and verdicts[arena.config(j)] is Verdict.WIN:
                    r = region.ranks[arena.config(j)]
                else:
                    continue
                if r < own and (best is None or r < best[0]):
                    best = (r, e)
            if best is not None:
                moves[c] = best[1]
        else:
            if v is not Verdict.LOSE:
                continue
            for e, j in arena.succ[i]:
                if j >= 0 and verdicts[arena.config(j)] is Verdict.LOSE:
                    moves[c] = e
                    break
    return PositionalStrategy(player, moves)


class PlayStatus(Enum):
    REACHED_OBJECTIVE = "reached-objective"
    DEADLOCK = "deadlock"
    STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class Play:
    configs: Tuple[Configuration, ...]
    status: PlayStatus
    loser: Optional[Player] = None

    def __len__(self) -> int:
        return len(self.configs)


def simulate(
    game: GameInstance,
    reacher: Optional[PositionalStrategy],
    opponent: Optional[PositionalStrategy],
    start: Configuration,
    max_steps: int,
    seed: int = 0,
) -> Play:
    """Play the game from ``start``.

    A missing strategy, or a configuration outside its domain, falls back to a
    seeded uniform choice among the enabled edges.
    """
    rng = random.Random(seed)
    config = Configuration(start[0], tuple(start[1]))
    trace = [config]
    for _ in range(max_steps + 1):
        if game.is_objective(config):
            return Play(tuple(trace), PlayStatus.REACHED_OBJECTIVE)
        if len(trace) > max_steps:
            break
        enabled = game.enabled(config)
        mover = game.system.owner(config.location)
        if not enabled:
            return Play(tuple(trace), PlayStatus.DEADLOCK, mover)
        strategy = reacher if mover is Player.REACHER else opponent
        choice = strategy.get(config) if strategy is not None else None
        if choice is None or choice not in enabled:
            choice = rng.choice(enabled)
        config = game.step(config, choice)
        trace.append(config)
    return Play(tuple(trace), PlayStatus.STEP_LIMIT)


def simulate_batch(
    game: GameInstance,
    region: RegionResult,
    strategy: PositionalStrategy,
    starts: Sequence[Configuration],
    plays: int,
    max_steps: int,
    seed: int = 0,
) -> np.ndarray:
    """Run ``plays`` games from each start with Reacher following ``strategy``
    and Opponent choosing uniformly at random; return per-start win counts.

    Plays that leave the window without reaching the objective count as
    failures, as do plays that exhaust ``max_steps``.
    """
    arena = _arena(game, region.window)
    n = arena.size
    deg = np.array([len(s) for s in arena.succ], dtype=np.int64)
    width = max(1, int(deg.max(initial=0)))
    succ = np.full((n, width), OUT_OTHER, dtype=np.int64)
    for i, s in enumerate(arena.succ):
        for k, (_, j) in enumerate(s):
            succ[i, k] = j
    reacher = np.array(arena.reacher, dtype=bool)
    objective = np.array(arena.objective, dtype=bool)
    forced = np.full(n, -3, dtype=np.int64)  # -3: no strategy move
    for c, e in strategy.moves.items():
        i = arena.index_of(c.location, c.counters)
        for ee, j in arena.succ[i]:
            if ee == e:
                forced[i] = j
                break
    idx = np.array([arena.index_of(c.location, c.counters) for c in starts], dtype=np.int64)
    state = np.repeat(idx, plays)
    owner = np.repeat(np.arange(len(starts)), plays)
    won = np.zeros(state.shape, dtype=bool)
    alive = np.ones(state.shape, dtype=bool)
    rng = np.random.default_rng(seed)
    for _ in range(max_steps + 1):
        live = np.flatnonzero(alive)
        if live.size == 0:
            break
        s = state[live]
        hit = objective[s] | ((deg[s] == 0) & ~reacher[s])
        won[live[hit]] = True
        alive[live[hit]] = False
        stuck = (deg[s] == 0) & reacher[s]
        alive[live[stuck]] = False
        keep = ~(hit | stuck)
        live, s = live[keep], s[keep]
        pick = rng.integers(0, np.maximum(deg[s], 1))
        nxt = succ[s, pick]
        use = reacher[s] & (forced[s] != -3)
        nxt = np.where(use, forced[s], nxt)
        out_obj = nxt == OUT_OBJECTIVE
        won[live[out_obj]] = True
        alive[live[nxt < 0]] = False
        inside = nxt >= 0
        state[live[inside]] = nxt[inside]
    return np.bincount(owner[won], minlength=len(starts))


def check_downward_closure(
    game: GameInstance, region: RegionResult
) -> List[Tuple[Configuration, Configuration]]:
    """Pairs (winning (q,x), losing (q,x')) with x' < x among certain verdicts."""
    obj = game.objective
    if (
        game.semantics is not Semantics.NONBLOCKING_VASS
        or game.dimension != 1
        or not isinstance(obj, SingleConfig)
        or obj.config.counters != (0,)
    ):
        raise ContractError("downward closure applies to 1-d non-blocking VASS with a zero objective")
    wins: Dict[int, List[int]] = {}
    loses: Dict[int, List[int]] = {}
    for c, v in region.verdicts.items():
        if v is Verdict.WIN:
            wins.setdefault(c.location, []).append(c.counters[0])
        elif v is Verdict.LOSE:
            loses.setdefault(c.location, []).append(c.counters[0])
    violations = []
    for q in sorted(wins):
        for x in sorted(wins[q]):
            for y in sorted(loses.get(q, ())):
                if y < x:
                    violations.append((Configuration(q, (x,)), Configuration(q, (y,))))
    return violations


__all__ = [
    "BoundaryPolicy",
    "Play",
    "PlayStatus",
    "PositionalStrategy",
    "RegionResult",
    "Verdict",
    "Window",
    "attractor_round",
    "certain_region",
    "certain_verdict",
    "check_downward_closure",
    "default_window",
    "extract_strategy",
    "simulate",
    "simulate_batch",
    "solve_bounded",
]
