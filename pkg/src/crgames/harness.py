"""Randomised equivalence checks for the reductions.

Each trial generates a source instance, transforms it, and compares the
certain oracle verdicts at the source initial configuration and at its image.
Trials where either side is Unknown are skipped, never counted as agreement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .core import (
    Configuration,
    GameInstance,
    Player,
    Semantics,
    SingleConfig,
    is_short_range,
    objective_vectors,
)
from .io import GenParams, generate, serialize
from .oracle import Verdict, Window, certain_verdict
from .reductions import (
    FIGURE,
    REDUCTIONS,
    ReductionOutput,
    apply_reduction,
    normalize_reacher_objective,
)

DEADLOCK_NOTE = "deadlock convention: a player with no enabled edge loses"


@dataclass(frozen=True)
class Profile:
    """Default source distribution and windows for one reduction."""

    params: GenParams
    max_locations: int
    source_window: Callable[[GameInstance], Window]
    target_window: Callable[[GameInstance, ReductionOutput], Window]
    checks: Tuple[Callable[[GameInstance, ReductionOutput], Optional[str]], ...] = ()
    needs_reacher_objective: bool = False


def _box(lo: int, hi: int) -> Callable[..., Window]:
    return lambda game, *_: Window.box(lo, hi, game.dimension)


def _shifted_target(source: GameInstance, out: ReductionOutput) -> Window:
    xf = source.objective.config.counters
    return Window(tuple((-16 - x, 16 - x) for x in xf))


def _vass_to_z_target(source: GameInstance, out: ReductionOutput) -> Window:
    b = max(1, source.system.max_label())
    return Window.box(-b - 1, 8 + b + 1, source.dimension)


def _bounds(source: GameInstance, out: ReductionOutput) -> Optional[str]:
    source = out.source or source
    d = source.dimension
    nq, ne = source.system.num_locations, len(source.system.edges)
    nq2, ne2 = out.game.system.num_locations, len(out.game.system.edges)
    if nq2 > d + 2 + nq + ne:
        return f"|Q'|={nq2} exceeds d+2+|Q|+|E|={d + 2 + nq + ne}"
    if ne2 > (d + 2) * ne + 2 * d * (d + 1) + 2:
        return f"|E'|={ne2} exceeds (d+2)|E|+2d(d+1)+2={(d + 2) * ne + 2 * d * (d + 1) + 2}"
    return None


def _short_range_kept(source: GameInstance, out: ReductionOutput) -> Optional[str]:
    if is_short_range(source.system) and not is_short_range(out.game.system):
        obj = source.objective
        if isinstance(obj, SingleConfig) and any(abs(x) > 1 for x in obj.config.counters):
            return None
        return "short-range property lost"
    return None


def _target_short(source: GameInstance, out: ReductionOutput) -> Optional[str]:
    return None if is_short_range(out.game.system) else "target is not short-ranged"


def _target_nonnegative(source: GameInstance, out: ReductionOutput) -> Optional[str]:
    g = out.game
    if g.semantics.nonnegative and min(g.initial.counters) < 0:
        return "target initial configuration has a negative counter"
    return None


PROFILES: Dict[str, Profile] = {
    "normalize_reacher_objective": Profile(
        GenParams(semantics=Semantics.VASS, label_bound=1, objective_bound=2, init_bound=4),
        4,
        _box(0, 10),
        _box(0, 10),
    ),
    "shift_objective_to_zero": Profile(
        GenParams(semantics=Semantics.Z, label_bound=1, objective_bound=3, init_bound=4),
        4,
        _box(-16, 16),
        _shifted_target,
    ),
    "split_to_short_range": Profile(
        GenParams(semantics=Semantics.VASS, label_bound=3, objective_bound=3, init_bound=4),
        4,
        _box(0, 16),
        _box(0, 16),
        (_target_short,),
    ),
    "vass_to_z": Profile(
        GenParams(semantics=Semantics.VASS, label_bound=1, objective_bound=1, init_bound=4),
        4,
        lambda g, *_: Window.box(0, 8, g.dimension),
        _vass_to_z_target,
        (_bounds, _short_range_kept),
        True,
    ),
    "axis_zero_to_single": Profile(
        GenParams(
            dimension=2,
            semantics=Semantics.VASS,
            label_bound=1,
            objective_kind="axiszero",
            init_bound=4,
        ),
        4,
        _box(0, 6),
        _box(0, 6),
        (_short_range_kept,),
    ),
    "z_to_vass": Profile(
        GenParams(semantics=Semantics.Z, label_bound=1, objective_value=(0,), init_bound=4),
        4,
        _box(-16, 16),
        _box(0, 16),
        (_target_short, _target_nonnegative),
        True,
    ),
    "nbvass_one_to_vass_zero": Profile(
        GenParams(
            semantics=Semantics.NONBLOCKING_VASS, label_bound=1, objective_value=(1,), init_bound=4
        ),
        4,
        _box(0, 16),
        _box(0, 16),
        (_target_short,),
        True,
    ),
    "vass_zero_to_nbvass_one": Profile(
        GenParams(semantics=Semantics.VASS, label_bound=3, objective_value=(0,), init_bound=5),
        4,
        _box(0, 16),
        _box(0, 20),
        (_short_range_kept,),
        True,
    ),
}


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: Optional[int]
    source_verdict: Verdict
    target_verdict: Verdict
    source_window: Window
    target_window: Window
    outcome: str  # agree | disagree | skip
    violations: Tuple[str, ...] = ()
    source_text: str = ""
    target_text: str = ""


@dataclass
class VerificationReport:
    reduction: str
    variant: str = FIGURE
    seed: int = 0
    trials: int = 0
    agreements: int = 0
    disagreements: int = 0
    skipped_unknown: int = 0
    records: List[TrialRecord] = field(default_factory=list)

    @property
    def violations(self) -> List[Tuple[int, str]]:
        return [(r.index, v) for r in self.records for v in r.violations]

    @property
    def passed(self) -> bool:
        return self.disagreements == 0 and not self.violations

    def render(self) -> str:
        lines = [
            f"# verify {self.reduction} variant={self.variant} seed={self.seed}",
            f"# {DEADLOCK_NOTE}",
            f"# trials {self.trials}: {self.agreements} agree, {self.disagreements} disagree, "
            f"{self.skipped_unknown} skipped (unknown)",
        ]
        for r in self.records:
            if r.outcome == "disagree" or r.violations:
                lines.append(f"# trial {r.index} (seed {r.seed}): {r.outcome}")
                lines.extend(f"#   violation: {v}" for v in r.violations)
                for label, text in (("source", r.source_text), ("target", r.target_text)):
                    lines.append(f"#   {label} instance:")
                    lines.extend(f"#     {t}" for t in text.splitlines())
        lines.append(f":: reduction {self.reduction}")
        lines.append(f":: variant {self.variant}")
        lines.append(f":: trials {self.trials}")
        lines.append(f":: agreements {self.agreements}")
        lines.append(f":: disagreements {self.disagreements}")
        lines.append(f":: skipped_unknown {self.skipped_unknown}")
        lines.append(f":: violations {len(self.violations)}")
        for r in self.records:
            lines.append(
                f":: trial {r.index} seed {r.seed if r.seed is not None else '-'} "
                f"source {r.source_verdict.value} target {r.target_verdict.value} "
                f"windows {r.source_window} {r.target_window} {r.outcome}"
            )
        lines.append(f":: result {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"


def _compose(first: ReductionOutput, second: ReductionOutput) -> ReductionOutput:
    def cmap(c: Configuration) -> Configuration:
        return second.config_map(first.config_map(c))

    return replace(second, config_map=cmap, notes=first.notes + second.notes)


def transform(name: str, game: GameInstance, variant: str = FIGURE) -> ReductionOutput:
    """Apply a reduction, first normalising the objective owner when the
    reduction requires a Reacher objective location."""
    profile = PROFILES.get(name)
    if (
        profile is not None
        and profile.needs_reacher_objective
        and isinstance(game.objective, SingleConfig)
        and game.system.owner(game.objective.config.location) is Player.OPPONENT
    ):
        first = normalize_reacher_objective(game)
        return _compose(first, apply_reduction(name, first.game, variant))
    return apply_reduction(name, game, variant)


def trial_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def sample_source(name: str, params: GenParams, max_locations: int, seed: int) -> GameInstance:
    n = random.Random(seed).randint(1, max_locations)
    return generate(replace(params, num_locations=n), seed)


def run_trial(
    name: str,
    source: GameInstance,
    index: int,
    seed: Optional[int],
    variant: str = FIGURE,
    windows: Optional[Tuple[Window, Window]] = None,
) -> TrialRecord:
    profile = PROFILES[name]
    out = transform(name, source, variant)
    if windows is not None:
        sw, tw = windows
    else:
        sw, tw = profile.source_window(source), profile.target_window(source, out)
    sw = sw.widened(objective_vectors(source))
    tw = tw.widened(objective_vectors(out.game))
    sv = certain_verdict(source, sw)
    tv = certain_verdict(out.game, tw)
    violations = tuple(v for check in profile.checks if (v := check(source, out)) is not None)
    if sv is Verdict.UNKNOWN or tv is Verdict.UNKNOWN:
        outcome = "skip"
    elif sv is tv:
        outcome = "agree"
    else:
        outcome = "disagree"
    keep_text = outcome == "disagree" or bool(violations)
    return TrialRecord(
        index,
        seed,
        sv,
        tv,
        sw.clipped(source.semantics),
        tw.clipped(out.game.semantics),
        outcome,
        violations,
        serialize(source) if keep_text else "",
        serialize(out.game, out.notes) if keep_text else "",
    )


def verify_reduction(
    name: str,
    gen_params: Optional[GenParams] = None,
    trials: int = 100,
    windows: Optional[Tuple[Window, Window]] = None,
    seed: int = 0,
    variant: str = FIGURE,
    instances: Sequence[GameInstance] = (),
    max_locations: Optional[int] = None,
) -> VerificationReport:
    """Run ``trials`` random trials (plus one per explicit instance)."""
    if name not in REDUCTIONS:
        raise KeyError(f"unknown reduction {name!r}")
    profile = PROFILES[name]
    params = gen_params or profile.params
    if max_locations is None:
        max_locations = profile.max_locations if gen_params is None else params.num_locations
    report = VerificationReport(name, variant, seed)
    jobs: List[Tuple[Optional[int], GameInstance]] = [(None, g) for g in instances]
    for i in range(trials):
        s = trial_seed(seed, i)
        jobs.append((s, sample_source(name, params, max_locations, s)))
    for index, (s, source) in enumerate(jobs):
        rec = run_trial(name, source, index, s, variant, windows)
        report.records.append(rec)
        report.trials += 1
        if rec.outcome == "agree":
            report.agreements += 1
        elif rec.outcome == "disagree":
            report.disagreements += 1
        else:
            report.skipped_unknown += 1
    return report


__all__ = [
    "DEADLOCK_NOTE",
    "PROFILES",
    "Profile",
    "TrialRecord",
    "VerificationReport",
    "run_trial",
    "sample_source",
    "transform",
    "verify_reduction",
]
