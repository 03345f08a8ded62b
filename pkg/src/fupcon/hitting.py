"""Certificates that the standard lift hits every preimage of the base point.

For a winding s and moduli M, the stage-(n+1) standard lift hits all
prod(m_i) preimages of the base point exactly when gcd(s_i, m_i^(n+1))
divides m_i^n for every i.  Two constructions of explicit integer-time
witnesses are provided: the valuation recipe k = u * x built from the
splittings s_i = m_i^alpha_i * q_i (when they exist), and a direct
congruence solve that works unconditionally.  Both reduce to one CRT call.

The geometric consequences — the preimage of the stage-n image equals the
stage-(n+1) image, and that preimage is connected — are checked exactly on
canonical segment sets.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Union

from fractions import Fraction

from .exact_arith import (
    MAdicDecomposition,
    Moduli,
    NoDecomposition,
    crt_solve,
    frac_mod1,
    gcd_certificate_condition,
    madic_decomposition,
)
from .lifting import (
    NonadmissibleWinding,
    PLLoop,
    WindingLike,
    WindingVector,
    as_winding,
    image_period,
    image_set,
)
from .torus import SegmentSet, TorusPoint, components, preimage_set

DEFAULT_SIZE_GUARD = 10**6


class ConditionFails(ValueError):
    """The divisibility condition fails at the requested stage."""


class NotFoundWithin(ValueError):
    """No stage within the search bound satisfies the condition."""


class SizeGuardExceeded(RuntimeError):
    """The requested computation exceeds the configured size bound."""

    def __init__(self, needed: int, guard: int):
        super().__init__(f"size {needed} exceeds guard {guard}")
        self.needed = needed
        self.guard = guard


def _require_dims(s, moduli: Moduli):
    if s.r != moduli.r:
        raise ValueError("winding and moduli dimension differ")


def _require_admissible(s):
    if not s.admissible:
        raise NonadmissibleWinding("winding has a zero entry")


def level_condition(s: WindingLike, moduli: Moduli, n: int) -> bool:
    """All-coordinates divisibility condition at stage n."""
    w = as_winding(s)
    _require_dims(w, moduli)
    _require_admissible(w)
    return all(gcd_certificate_condition(e, m, n) for e, m in zip(w, moduli))


def valuation_level(s: WindingLike, moduli: Moduli) -> int:
    """The conservative stage bound (prod m_i)^alpha, alpha = max_i alpha_i,
    built from the splittings s_i = m_i^alpha_i * q_i.  Raises NoDecomposition
    when some coordinate admits no such splitting (possible for non-squarefree
    moduli, e.g. m = 4, s = 2)."""
    w = as_winding(s)
    _require_dims(w, moduli)
    _require_admissible(w)
    alpha = max(madic_decomposition(e, m).alpha for e, m in zip(w, moduli))
    return moduli.product() ** alpha


def minimal_level(s: WindingLike, moduli: Moduli, n_max: int = 64) -> int:
    """Least stage n at which the divisibility condition holds.  Always exists;
    NotFoundWithin signals only that n_max was too small."""
    w = as_winding(s)
    _require_dims(w, moduli)
    _require_admissible(w)
    for n in range(n_max + 1):
        if level_condition(w, moduli, n):
            return n
    raise NotFoundWithin(f"no stage within 0..{n_max} satisfies the condition")


@dataclass(frozen=True)
class WitnessRecipe:
    """Bookkeeping for the valuation-based witness construction at stage n:
    s_i = m_i^alphas[i] * units[i], betas[i] = n - alphas[i],
    cofactor u = prod m_i^betas[i], cofactor_parts[i] = u / m_i^betas[i].
    The witness for target (j_1, ..., j_r) is k = u * x where
    cofactor_parts[i] * units[i] * x = j_i (mod m_i) for all i."""

    alphas: tuple[int, ...]
    units: tuple[int, ...]
    betas: tuple[int, ...]
    cofactor: int
    cofactor_parts: tuple[int, ...]


def witness_recipe(s: WindingLike, moduli: Moduli, n: int) -> WitnessRecipe | None:
    """The valuation recipe at stage n, or None when it does not apply
    (some splitting missing, or n below some alpha_i)."""
    w = as_winding(s)
    _require_dims(w, moduli)
    _require_admissible(w)
    try:
        decs = [madic_decomposition(e, m) for e, m in zip(w, moduli)]
    except NoDecomposition:
        return None
    alphas = tuple(d.alpha for d in decs)
    if any(n - a < 0 for a in alphas):
        return None
    betas = tuple(n - a for a in alphas)
    cofactor = math.prod(m**b for m, b in zip(moduli, betas))
    parts = tuple(cofactor // m**b for m, b in zip(moduli, betas))
    return WitnessRecipe(
        alphas=alphas,
        units=tuple(d.q for d in decs),
        betas=betas,
        cofactor=cofactor,
        cofactor_parts=parts,
    )


def _standard_point(s, moduli: Moduli, n: int, k: int) -> TorusPoint:
    return TorusPoint(
        tuple(Fraction(e * k, m ** n) for e, m in zip(s, moduli))
    )


def crt_witness(
    s: WindingLike, moduli: Moduli, n: int, target: tuple[int, ...]
) -> int:
    """Integer time k >= 0 with the stage-(n+1) standard lift at time k equal
    to the preimage point (target_1/m_1, ..., target_r/m_r).

    Uses the valuation recipe when it applies, otherwise solves
    s_i * k = target_i * m_i^n (mod m_i^(n+1)) directly; either way one CRT
    call produces the canonical least witness for its construction."""
    w = as_winding(s)
    _require_dims(w, moduli)
    if len(target) != moduli.r:
        raise ValueError("target and moduli dimension differ")
    for j, m in zip(target, moduli):
        if not 0 <= j < m:
            raise ValueError(f"target entry {j} outside 0..{m - 1}")
    if not level_condition(w, moduli, n):
        raise ConditionFails(f"divisibility condition fails at stage {n}")
    recipe = witness_recipe(w, moduli, n)
    if recipe is not None:
        residues = []
        for j, m, part, q in zip(
            target, moduli, recipe.cofactor_parts, recipe.units
        ):
            inv = pow(part * q % m, -1, m)
            residues.append(j * inv % m)
        k = recipe.cofactor * crt_solve(residues, tuple(moduli))
    else:
        residues, mods = [], []
        for e, m, j in zip(w, moduli, target):
            big = m ** (n + 1)
            g = math.gcd(abs(e), big)
            mod = big // g
            rhs = j * m**n // g
            inv = pow((e // g) % mod, -1, mod) if mod > 1 else 0
            residues.append(rhs * inv % mod if mod > 1 else 0)
            mods.append(mod)
        k = crt_solve(residues, mods)
    expected = TorusPoint(tuple(Fraction(j, m) for j, m in zip(target, moduli)))
    if _standard_point(w, moduli, n + 1, k) != expected:
        raise AssertionError("witness construction produced a non-witness")
    return k


def hitting_check(
    s: WindingLike,
    moduli: Moduli,
    n: int,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> bool:
    """Brute-force ground truth: does the stage-(n+1) standard lift pass
    through every preimage of the base point within one full period?"""
    w = as_winding(s)
    _require_dims(w, moduli)
    _require_admissible(w)
    if n < 0:
        raise ValueError("stage n must be >= 0")
    total = math.prod(m ** (n + 1) for m in moduli)
    if total > size_guard:
        raise SizeGuardExceeded(total, size_guard)
    period = image_period(w, n + 1, moduli)
    powers = [m ** (n + 1) for m in moduli]
    stage = [m**n for m in moduli]
    wanted = moduli.product()
    seen: set[tuple[int, ...]] = set()
    for k in range(period):
        js = []
        for e, big, mn in zip(w, powers, stage):
            rem = (e * k) % big
            if rem % mn:
                break
            js.append(rem // mn)
        else:
            seen.add(tuple(js))
            if len(seen) == wanted:
                return True
    return len(seen) == wanted


LoopOrWinding = Union[PLLoop, WindingVector, tuple, list]


def _as_loop(loop_or_s: LoopOrWinding) -> PLLoop:
    if isinstance(loop_or_s, PLLoop):
        return loop_or_s
    return PLLoop.straight(as_winding(loop_or_s))


def _guard_geometry(moduli: Moduli, n: int, size_guard: int):
    needed = math.prod(m ** (n + 2) for m in moduli)
    if needed > size_guard:
        raise SizeGuardExceeded(needed, size_guard)


def preimage_equality_check(
    loop_or_s: LoopOrWinding,
    moduli: Moduli,
    n: int,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> bool:
    """Does the full preimage of the stage-n image equal the stage-(n+1)
    image, as exact point sets?"""
    loop = _as_loop(loop_or_s)
    _require_admissible(loop.winding())
    _guard_geometry(moduli, n, size_guard)
    stage_n = image_set(loop, n, moduli)
    return preimage_set(stage_n, moduli) == image_set(loop, n + 1, moduli)


def preimage_connected_check(
    loop_or_s: LoopOrWinding,
    moduli: Moduli,
    n: int,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> tuple[bool, int]:
    """(connected?, component count) of the preimage of the stage-n image."""
    loop = _as_loop(loop_or_s)
    _require_admissible(loop.winding())
    _guard_geometry(moduli, n, size_guard)
    comps = components(preimage_set(image_set(loop, n, moduli), moduli))
    return len(comps) == 1, len(comps)


@dataclass(frozen=True)
class HittingCertificate:
    """Witnesses for every preimage of the base point at stage n, with the
    valuation bookkeeping when that construction applied."""

    winding: WindingVector
    moduli: Moduli
    stage: int
    witnesses: tuple[tuple[tuple[int, ...], int], ...]
    recipe: WitnessRecipe | None

    def verify(self) -> bool:
        """Re-check every witness by direct evaluation of the standard lift,
        and that all preimage targets are present exactly once."""
        targets = set(
            itertools.product(*(range(m) for m in self.moduli))
        )
        seen = set()
        for target, k in self.witnesses:
            if k < 0:
                return False
            expected = TorusPoint(
                tuple(Fraction(j, m) for j, m in zip(target, self.moduli))
            )
            if _standard_point(self.winding, self.moduli, self.stage + 1, k) != expected:
                return False
            seen.add(target)
        return seen == targets


def build_certificate(
    s: WindingLike,
    moduli: Moduli,
    n: int,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> HittingCertificate:
    """Assemble the full witness table at stage n (deterministic order)."""
    w = as_winding(s)
    _require_dims(w, moduli)
    total = moduli.product()
    if total > size_guard:
        raise SizeGuardExceeded(total, size_guard)
    if not level_condition(w, moduli, n):
        raise ConditionFails(f"divisibility condition fails at stage {n}")
    witnesses = []
    for target in itertools.product(*(range(m) for m in moduli)):
        witnesses.append((target, crt_witness(w, moduli, n, target)))
    return HittingCertificate(
        winding=w,
        moduli=moduli,
        stage=n,
        witnesses=tuple(sorted(witnesses)),
        recipe=witness_recipe(w, moduli, n),
    )
