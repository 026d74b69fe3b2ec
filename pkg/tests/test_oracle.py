import pytest

from brute import brute_win
from conftest import NB, VASS, Z
from crgames.core import Configuration, ContractError, Player, Semantics
from crgames.io import GenParams, generate
from crgames.oracle import (
    BoundaryPolicy,
    PlayStatus,
    RegionResult,
    Verdict,
    Window,
    attractor_round,
    certain_region,
    check_downward_closure,
    extract_strategy,
    simulate,
    simulate_batch,
    solve_bounded,
)

C = Configuration
WIN, LOSE, UNKNOWN = Verdict.WIN, Verdict.LOSE, Verdict.UNKNOWN
PESS, OPT = BoundaryPolicy.PESSIMISTIC, BoundaryPolicy.OPTIMISTIC


@pytest.fixture
def decrement_game(build):
    return build(1, [("r", "R"), ("f", "R")], [("r", (-1,), "f"), ("f", (0,), "f")], Z, ("f", (0,)), ("r", (1,)))


class TestSolveBounded:
    def test_static_value(self, build):
        g = build(1, [("f", "R")], [("f", (0,), "f")], Z, ("f", (0,)), ("f", (0,)))
        region = solve_bounded(g, Window.box(-2, 2, 1))
        assert region[C(0, (0,))] is WIN
        assert region[C(0, (1,))] is LOSE

    def test_decrement(self, decrement_game):
        region = solve_bounded(decrement_game, Window.box(-4, 4, 1))
        assert region[C(0, (1,))] is WIN
        assert region[C(0, (0,))] is LOSE

    def test_opponent_escapes(self, build):
        g = build(1, [("o", "O"), ("f", "R")], [("o", (-1,), "f"), ("o", (1,), "f"), ("f", (0,), "f")],
                  Z, ("f", (0,)), ("o", (1,)))
        assert solve_bounded(g, Window.box(-4, 4, 1))[C(0, (1,))] is LOSE

    def test_deadlock_convention(self, build):
        # VASS: Reacher stuck at (r,0) loses; Opponent stuck at (o,0) loses.
        g = build(1, [("r", "R"), ("o", "O"), ("f", "R")],
                  [("r", (-1,), "f"), ("o", (-1,), "r"), ("f", (0,), "f")], VASS, ("f", (5,)), ("r", (0,)))
        region = solve_bounded(g, Window.box(0, 6, 1))
        assert region[C(0, (0,))] is LOSE
        assert region[C(1, (0,))] is WIN

    def test_two_valued(self, decrement_game):
        for policy in BoundaryPolicy:
            region = solve_bounded(decrement_game, Window.box(-3, 3, 1), policy)
            assert region.count(UNKNOWN) == 0
            assert len(region.verdicts) == 2 * 7

    def test_window_must_contain_objective(self, decrement_game):
        with pytest.raises(ContractError):
            solve_bounded(decrement_game, Window.box(2, 5, 1))

    def test_vass_window_clipped(self, build):
        g = build(1, [("f", "R")], [("f", (0,), "f")], VASS, ("f", (0,)), ("f", (0,)))
        assert solve_bounded(g, Window.box(-3, 3, 1)).window == Window.box(0, 3, 1)


class TestCertainRegion:
    def test_static_game_has_no_unknown(self, build):
        g = build(2, [("a", "R"), ("b", "O")], [("a", (0, 0), "b"), ("b", (0, 0), "a")], Z,
                  ("b", (1, 1)), ("a", (0, 0)))
        assert certain_region(g, Window.box(-2, 2, 2)).count(UNKNOWN) == 0

    def test_boundary_unknown(self, build):
        g = build(1, [("o", "O"), ("f", "R")], [("o", (1,), "o"), ("f", (0,), "f")], Z, ("f", (0,)), ("o", (0,)))
        region = certain_region(g, Window.box(-3, 3, 1))
        assert region[C(0, (3,))] is UNKNOWN
        assert region[C(0, (2,))] is UNKNOWN
        assert solve_bounded(g, Window.box(-3, 3, 1), PESS)[C(0, (3,))] is LOSE
        assert solve_bounded(g, Window.box(-3, 3, 1), OPT)[C(0, (3,))] is WIN

    def test_exit_into_objective_is_exact(self, build):
        g = build(1, [("a", "R"), ("f", "R")], [("a", (5,), "f"), ("f", (0,), "f")], Z, ("f", (5,)), ("a", (0,)))
        assert certain_region(g, Window.box(0, 5, 1))[C(0, (0,))] is WIN


def random_games(count, semantics, seed0=0, **kw):
    for seed in range(seed0, seed0 + count):
        params = GenParams(num_locations=1 + seed % 4, semantics=semantics, edges_per_location=(1, 3), **kw)
        yield generate(params, seed)


@pytest.mark.parametrize("semantics", list(Semantics))
def test_bracketing_and_fixpoint(semantics):
    w = Window.box(-6, 6, 1)
    for g in random_games(40, semantics):
        low = solve_bounded(g, w, PESS)
        high = solve_bounded(g, w, OPT)
        for c, v in low.verdicts.items():
            assert v is not WIN or high[c] is WIN
        for region, policy in ((low, PESS), (high, OPT)):
            assert attractor_round(region, policy).verdicts == region.verdicts


@pytest.mark.parametrize("semantics", list(Semantics))
def test_pessimistic_matches_brute_force(semantics):
    for g in random_games(30, semantics, seed0=100):
        ref = brute_win(g, -5, 5)
        region = solve_bounded(g, Window.box(-5, 5, 1), PESS)
        assert {c: v is WIN for c, v in region.verdicts.items()} == ref


@pytest.mark.parametrize("semantics", list(Semantics))
def test_window_monotonicity(semantics):
    for g in random_games(30, semantics, seed0=200):
        small = certain_region(g, Window.box(-4, 4, 1))
        large = certain_region(g, Window.box(-9, 9, 1))
        for c, v in small.verdicts.items():
            if v is not UNKNOWN:
                assert large[c] is v


class TestStrategies:
    def test_unique_edge(self, decrement_game):
        region = certain_region(decrement_game, Window.box(-3, 3, 1))
        strat = extract_strategy(decrement_game, region, Player.REACHER)
        assert strat.get(C(0, (1,))) == 0

    @pytest.mark.parametrize("semantics", list(Semantics))
    def test_ranks_decrease_and_plays_win(self, semantics):
        w = Window.box(-6, 6, 1)
        for g in random_games(20, semantics, seed0=300):
            region = certain_region(g, w)
            strat = extract_strategy(g, region, Player.REACHER)
            wins = region.configs(WIN)
            for c in wins:
                if g.is_objective(c) or g.system.owner(c.location) is Player.OPPONENT:
                    continue
                e = strat.get(c)
                if e is None:  # stuck Opponent successor is never needed by a Reacher move
                    continue
                nxt = g.step(c, e)
                assert g.is_objective(nxt) or region.ranks[nxt] < region.ranks[c]
            if wins:
                counts = simulate_batch(g, region, strat, wins, 20, len(region.verdicts), seed=1)
                assert counts.tolist() == [20] * len(wins)

    def test_opponent_strategy_stays_losing(self, build):
        g = build(1, [("o", "O"), ("f", "R")], [("o", (-1,), "f"), ("o", (1,), "f"), ("f", (0,), "f")],
                  Z, ("f", (0,)), ("o", (1,)))
        region = certain_region(g, Window.box(-4, 4, 1))
        strat = extract_strategy(g, region, Player.OPPONENT)
        nxt = g.step(C(0, (1,)), strat.get(C(0, (1,))))
        assert nxt == C(1, (2,)) and region[nxt] is LOSE


class TestSimulate:
    def test_deterministic(self, decrement_game):
        region = certain_region(decrement_game, Window.box(-3, 3, 1))
        strat = extract_strategy(decrement_game, region, Player.REACHER)
        a = simulate(decrement_game, strat, None, C(0, (3,)), 10, seed=4)
        b = simulate(decrement_game, strat, None, C(0, (3,)), 10, seed=4)
        assert a == b

    def test_start_at_objective(self, decrement_game):
        play = simulate(decrement_game, None, None, C(1, (0,)), 10)
        assert len(play) == 1 and play.status is PlayStatus.REACHED_OBJECTIVE

    def test_deadlock(self, build):
        g = build(1, [("r", "R"), ("f", "R")], [("r", (-1,), "f"), ("f", (0,), "f")], VASS, ("f", (3,)), ("r", (0,)))
        play = simulate(g, None, None, g.initial, 10)
        assert play.status is PlayStatus.DEADLOCK and play.loser is Player.REACHER

    def test_step_limit(self, build):
        g = build(1, [("r", "R"), ("f", "R")], [("r", (1,), "r"), ("f", (0,), "f")], Z, ("f", (0,)), ("r", (0,)))
        play = simulate(g, None, None, g.initial, 5)
        assert play.status is PlayStatus.STEP_LIMIT and len(play) == 6

    def test_consecutive_configs_are_steps(self):
        for g in random_games(10, VASS, seed0=400):
            play = simulate(g, None, None, g.initial, 30, seed=2)
            for a, b in zip(play.configs, play.configs[1:]):
                assert any(g.step(a, e) == b for e in g.enabled(a))


class TestDownwardClosure:
    def nb_games(self, count):
        return random_games(count, NB, seed0=500, objective_value=(0,))

    def test_random_instances(self):
        for g in self.nb_games(30):
            assert check_downward_closure(g, certain_region(g, Window.box(0, 16, 1))) == []

    def test_all_unknown_is_vacuous(self):
        g = next(iter(self.nb_games(1)))
        region = certain_region(g, Window.box(0, 4, 1))
        blank = RegionResult(g, region.window, {c: UNKNOWN for c in region.verdicts})
        assert check_downward_closure(g, blank) == []

    def test_corrupted_region(self, build):
        g = build(1, [("f", "R")], [("f", (-1,), "f")], NB, ("f", (0,)), ("f", (0,)))
        region = certain_region(g, Window.box(0, 4, 1))
        assert region.count(WIN) == 5
        verdicts = dict(region.verdicts)
        verdicts[C(0, (3,))] = LOSE
        bad = RegionResult(g, region.window, verdicts)
        assert check_downward_closure(g, bad) == [(C(0, (4,)), C(0, (3,)))]

    def test_precondition(self, decrement_game):
        with pytest.raises(ContractError):
            check_downward_closure(decrement_game, certain_region(decrement_game, Window.box(-2, 2, 1)))
