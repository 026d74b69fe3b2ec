"""Acceptance criteria, one test each.  Every test records a single
pass/fail line that is repeated in the terminal summary."""

import time
from dataclasses import replace

from conftest import NB, VASS, Z, record
from crgames.core import Configuration, GameInstance, Player, SingleConfig, is_short_range, make_system
from crgames.fixpoint import decide_nbvass_zero
from crgames.harness import PROFILES, sample_source, transform, trial_seed, verify_reduction
from crgames.io import GenParams, generate, parse, serialize
from crgames.oracle import (
    BoundaryPolicy,
    Verdict,
    Window,
    attractor_round,
    certain_region,
    check_downward_closure,
    extract_strategy,
    simulate_batch,
    solve_bounded,
)
from crgames.reductions import ALIGN

C = Configuration
WIN, LOSE, UNKNOWN = Verdict.WIN, Verdict.LOSE, Verdict.UNKNOWN


def oracle_instances(semantics, count=200):
    for seed in range(count):
        params = GenParams(num_locations=1 + seed % 5, semantics=semantics, label_bound=1, edges_per_location=(1, 3))
        yield generate(params, seed)


def test_criterion_1_oracle_integrity():
    start = time.perf_counter()
    bracket = fixpoint = strat_fail = instances = starts = 0
    for semantics in (Z, VASS, NB):
        window = Window.box(-16, 16, 1) if semantics is Z else Window.box(0, 32, 1)
        for g in oracle_instances(semantics):
            instances += 1
            low = solve_bounded(g, window, BoundaryPolicy.PESSIMISTIC)
            high = solve_bounded(g, window, BoundaryPolicy.OPTIMISTIC)
            bracket += sum(1 for c, v in low.verdicts.items() if v is WIN and high[c] is not WIN)
            for region, policy in ((low, BoundaryPolicy.PESSIMISTIC), (high, BoundaryPolicy.OPTIMISTIC)):
                fixpoint += attractor_round(region, policy).verdicts != region.verdicts
            region = certain_region(g, window)
            wins = region.configs(WIN)
            if not wins:
                continue
            strategy = extract_strategy(g, region, Player.REACHER)
            counts = simulate_batch(g, region, strategy, wins, 100, len(region.verdicts), seed=instances)
            starts += len(wins)
            strat_fail += int((counts != 100).sum())
    elapsed = time.perf_counter() - start
    ok = bracket == 0 and fixpoint == 0 and strat_fail == 0 and elapsed < 60
    record(1, ok, f"{instances} instances, {starts} certain-Win starts x 100 plays; bracketing violations "
                  f"{bracket}, non-fixpoints {fixpoint}, losing starts {strat_fail}; {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_2_vass_to_z():
    start = time.perf_counter()
    base = PROFILES["vass_to_z"].params
    details, ok = [], True
    for d in (1, 2):
        report = verify_reduction("vass_to_z", replace(base, dimension=d), trials=100, seed=d, max_locations=4)
        bound_violations = [v for _, v in report.violations if "exceeds" in v]
        ok &= report.disagreements == 0 and not bound_violations and report.trials == 100
        details.append(f"d={d}: {report.agreements} agree, {report.disagreements} disagree, "
                       f"{report.skipped_unknown} skipped, {len(bound_violations)} bound violations")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 180
    record(2, ok, "; ".join(details) + f"; {elapsed:.1f}s (< 180s)")
    assert ok


def _sources(name, params, trials, seed, max_locations=4):
    return [sample_source(name, params, max_locations, trial_seed(seed, i)) for i in range(trials)]


def test_criterion_3_axis_zero():
    name = "axis_zero_to_single"
    report = verify_reduction(name, trials=100, seed=3)
    params = PROFILES[name].params
    short = all(
        is_short_range(transform(name, g).game.system) for g in _sources(name, params, 100, 3) if is_short_range(g.system)
    )
    ok = report.disagreements == 0 and short and report.trials == 100
    record(3, ok, f"{report.agreements} agree, {report.disagreements} disagree, {report.skipped_unknown} skipped; "
                  f"short-range preserved: {short}")
    assert ok


def test_criterion_4_z_to_vass():
    name = "z_to_vass"
    report = verify_reduction(name, trials=100, seed=4)
    outs = [transform(name, g).game for g in _sources(name, PROFILES[name].params, 100, 4)]
    short = all(is_short_range(t.system) for t in outs)
    nonneg = all(min(t.initial.counters) >= 0 and t.semantics is VASS for t in outs)
    ok = report.disagreements == 0 and short and nonneg and not report.violations
    record(4, ok, f"{report.agreements} agree, {report.disagreements} disagree, {report.skipped_unknown} skipped; "
                  f"short-range {short}, nonnegative initial {nonneg}")
    assert ok


def crafted_value_two():
    system = make_system(1, [("s", "R"), ("p", "R"), ("f", "R")], [("s", (1,), "p"), ("p", (-1,), "f"), ("f", (0,), "f")])
    return GameInstance(system, NB, SingleConfig(C(2, (1,))), C(0, (1,)))


def test_criterion_5_nonblocking_gadgets():
    hard = verify_reduction("nbvass_one_to_vass_zero", trials=100, seed=5)
    member = verify_reduction("vass_zero_to_nbvass_one", trials=100, seed=5)
    crafted = verify_reduction("nbvass_one_to_vass_zero", trials=0, variant=ALIGN, instances=[crafted_value_two()])
    documented = "#   source instance:" in crafted.render()
    ok = hard.disagreements == 0 and member.disagreements == 0 and crafted.disagreements >= 1 and documented
    record(5, ok, f"hardness gadget {hard.agreements}/{hard.disagreements}/{hard.skipped_unknown}, "
                  f"membership gadget {member.agreements}/{member.disagreements}/{member.skipped_unknown} "
                  f"(agree/disagree/skip); align variant on crafted instance: {crafted.disagreements} disagreement(s)")
    assert ok


def nb_zero_instances(count, seed0=0):
    for seed in range(seed0, seed0 + count):
        params = GenParams(num_locations=1 + seed % 5, semantics=NB, label_bound=1 + seed % 2,
                           objective_value=(0,), edges_per_location=(1, 3), init_bound=8)
        yield generate(params, seed)


def test_criterion_6_downward_closure():
    violations = certain = 0
    for g in nb_zero_instances(200, seed0=6000):
        region = certain_region(g, Window.box(0, 32, 1))
        certain += len(region.verdicts) - region.count(UNKNOWN)
        violations += len(check_downward_closure(g, region))
    ok = violations == 0
    record(6, ok, f"200 instances, {certain} certain configurations, {violations} violations")
    assert ok


def test_criterion_7_fixpoint_vs_oracle():
    start = time.perf_counter()
    agree = both = unsound = mismatch = undecided = 0
    for g in nb_zero_instances(300, seed0=7000):
        region = certain_region(g, Window.box(0, 8 + 16, 1))
        for q in range(g.system.num_locations):
            for x in range(9):
                decision = decide_nbvass_zero(g.with_initial(C(q, (x,))))
                o = region[C(q, (x,))]
                if decision.verdict is UNKNOWN:
                    undecided += 1
                if decision.verdict is UNKNOWN or o is UNKNOWN:
                    continue
                both += 1
                if decision.verdict is o:
                    agree += 1
                    continue
                mismatch += 1
                if decision.certificate in ("early-yes", "exact-fixpoint"):
                    unsound += 1
    elapsed = time.perf_counter() - start
    ok = mismatch == 0 and unsound == 0
    record(7, ok, f"{both} queries certain on both sides, {agree} agree, {mismatch} disagree, "
                  f"{unsound} unsound; fixpoint Unknown on {undecided}; {elapsed:.1f}s")
    assert ok


def test_criterion_8_exponential_example():
    start = time.perf_counter()
    rows, ok = [], True
    for n in (3, 4, 5, 6):
        system = make_system(1, [("q0", "R"), ("qf", "R")], [("q0", (2**n,), "qf"), ("qf", (-1,), "qf")])
        game = GameInstance(system, NB, SingleConfig(C(1, (0,))), C(0, (0,)))
        decision = decide_nbvass_zero(game)
        r = decision.rounds
        ok &= decision.verdict is WIN and 2**n <= r <= 2**n + 2
        rows.append(f"n={n}: {decision.verdict.value}, rounds {r}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 5
    record(8, ok, "; ".join(rows) + f"; {elapsed:.2f}s (< 5s)")
    assert ok


def test_criterion_9_determinism_and_roundtrip():
    from crgames.cli import region_lines

    params = [GenParams(num_locations=1 + s % 5, dimension=1 + s % 2, label_bound=s % 3,
                        semantics=(Z, VASS, NB)[s % 3]) for s in range(12)]
    files = all(serialize(generate(params[s % 12], s)) == serialize(generate(params[s % 12], s)) for s in range(200))
    dumps = True
    for s in range(20):
        g = generate(params[s % 12], s)
        w = Window.box(-4, 4, g.dimension)
        dumps &= region_lines(certain_region(g, w)) == region_lines(certain_region(g, w))
    reports = all(
        verify_reduction(name, trials=5, seed=9).render() == verify_reduction(name, trials=5, seed=9).render()
        for name in ("vass_to_z", "z_to_vass", "vass_zero_to_nbvass_one")
    )
    roundtrip = 0
    for s in range(1000):
        g = generate(params[s % 12], s)
        roundtrip += parse(serialize(g)) == g
    ok = files and dumps and reports and roundtrip == 1000
    record(9, ok, f"byte-identical files {files}, region dumps {dumps}, reports {reports}; "
                  f"parse(serialize(g)) == g on {roundtrip}/1000")
    assert ok
