"""Combining loops until every winding coordinate is nonzero.

Given loops t^(1), ..., t^(r) where the k-th has nonzero k-th winding entry,
repeated concatenation gamma_{k+1} = t^(k+1) * ... * t^(k+1) * gamma_k (the
injected loop repeated l times, then the current loop) with
l > max(|s_1|, ..., |s_{k+1}|) makes the first k+1 winding entries nonzero
without disturbing what has been fixed.  The new entries are l*t_i + s_i;
where t_i = 0 the entry stays s_i != 0, and where t_i != 0 the bound gives
|l*t_i| >= l > |s_i|, so the sum cannot vanish.
"""

from dataclasses import dataclass
from typing import Sequence

from .lifting import PLLoop, WindingLike, WindingVector, as_winding


class ZeroInjection(ValueError):
    """The injected loop does not wind in the coordinate being fixed."""


class PreconditionViolated(ValueError):
    """A combination step's arithmetic preconditions are not met."""


class BadInputFamily(ValueError):
    """The loop family does not have nonzero diagonal winding entries."""


def repetition_count(before: WindingLike, stage: int, injected_target: int) -> int:
    """Least repetition count l with l strictly above every tracked |entry|:
    l = max(|s_1|, ..., |s_{stage+1}|) + 1 (0-based entries 0..stage).

    `injected_target` is the injected loop's winding in the coordinate being
    fixed; it only gates validity (must be nonzero), not the value of l."""
    w = as_winding(before)
    if not 0 <= stage < w.r:
        raise ValueError(f"stage {stage} out of range for dimension {w.r}")
    if injected_target == 0:
        raise ZeroInjection("injected loop must wind in the coordinate being fixed")
    return max(abs(w[i]) for i in range(stage + 1)) + 1


def combine(
    before: WindingLike, injected: WindingLike, stage: int, repetitions: int
) -> WindingVector:
    """Winding after concatenating `injected` `repetitions` times in front of
    the current loop: componentwise repetitions * injected + before."""
    b, t = as_winding(before), as_winding(injected)
    if b.r != t.r:
        raise PreconditionViolated("winding dimensions differ")
    if not 0 <= stage < b.r:
        raise PreconditionViolated(f"stage {stage} out of range")
    if t[stage] == 0:
        raise ZeroInjection("injected loop must wind in the coordinate being fixed")
    for i in range(stage):
        if b[i] == 0:
            raise PreconditionViolated(
                f"entry {i} must already be nonzero before stage {stage}"
            )
    bound = max(abs(b[i]) for i in range(stage + 1))
    if repetitions <= bound:
        raise PreconditionViolated(
            f"repetitions {repetitions} not above the tracked bound {bound}"
        )
    after = WindingVector(
        tuple(repetitions * ti + bi for ti, bi in zip(t, b))
    )
    for i in range(stage + 1):
        if after[i] == 0:
            raise PreconditionViolated(
                f"combination unexpectedly zeroed entry {i}"
            )
    return after


@dataclass(frozen=True)
class CombineStep:
    """One combination step: after = repetitions * injected + before."""

    stage: int
    repetitions: int
    before: WindingVector
    injected: WindingVector
    after: WindingVector

    def __post_init__(self):
        expect = tuple(
            self.repetitions * t + b for t, b in zip(self.injected, self.before)
        )
        if self.after.entries != expect:
            raise PreconditionViolated("inconsistent combination step record")


@dataclass(frozen=True)
class NonvanishingDesign:
    """Result of the full design: final = sum_i coefficients[i] * family[i],
    all final entries nonzero, and `loop` the literal concatenation realizing
    it with straight-line representatives."""

    coefficients: tuple[int, ...]
    final: WindingVector
    loop: PLLoop
    steps: tuple[CombineStep, ...]


def design_all_nonzero(family: Sequence[WindingLike]) -> NonvanishingDesign:
    """Run the combination scheme over a family of r windings, the i-th with
    nonzero i-th entry, producing an all-nonzero winding and its loop."""
    loops = [as_winding(s) for s in family]
    if not loops:
        raise BadInputFamily("empty family")
    r = loops[0].r
    if len(loops) != r:
        raise BadInputFamily(f"need exactly r = {r} loops, got {len(loops)}")
    for i, w in enumerate(loops):
        if w.r != r:
            raise BadInputFamily("windings of mixed dimension")
        if w[i] == 0:
            raise BadInputFamily(f"family loop {i} has zero entry {i}")
    current = loops[0]
    pl = PLLoop.straight(current)
    coefficients = [1]
    steps: list[CombineStep] = []
    for stage in range(1, r):
        injected = loops[stage]
        l = repetition_count(current, stage, injected[stage])
        after = combine(current, injected, stage, l)
        steps.append(
            CombineStep(
                stage=stage,
                repetitions=l,
                before=current,
                injected=injected,
                after=after,
            )
        )
        pl = PLLoop.straight(injected).repeat(l).concat(pl)
        coefficients.append(l)
        current = after
    assert current.admissible
    assert pl.winding() == current
    return NonvanishingDesign(
        coefficients=tuple(coefficients),
        final=current,
        loop=pl,
        steps=tuple(steps),
    )
