"""Exact integer and rational arithmetic.

Reduced fractions, extended-Euclid CRT solving, and m-adic decompositions
s = m^alpha * q with gcd(q, m) = 1.  Everything downstream routes its number
theory through here; no floats anywhere.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

# The rational type of the whole package.  Fraction already guarantees the
# invariants we need: always reduced, denominator > 0, arbitrary precision.
Rational = Fraction


class ModuliNotCoprime(ValueError):
    """Two moduli share a nontrivial common factor."""


class NoDecomposition(ValueError):
    """s admits no factorization s = m^alpha * q with gcd(q, m) = 1."""


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' (or a bare integer 'p') into an exact rational."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(x) -> str:
    """Canonical 'p/q' form; denominator always explicit so parsing is uniform."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def frac_mod1(x) -> Fraction:
    """Representative of x in [0, 1)."""
    f = Fraction(x)
    return f - math.floor(f)


@dataclass(frozen=True)
class Moduli:
    """Pairwise coprime moduli m_1, ..., m_r, each >= 2."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("need at least one modulus")
        for m in vals:
            if m < 2:
                raise ValueError(f"modulus {m} must be >= 2")
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                if math.gcd(vals[i], vals[j]) != 1:
                    raise ModuliNotCoprime(
                        f"moduli {vals[i]} and {vals[j]} are not coprime"
                    )

    @classmethod
    def of(cls, *values: int) -> "Moduli":
        return cls(tuple(values))

    @property
    def r(self) -> int:
        return len(self.values)

    def product(self) -> int:
        return math.prod(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class MAdicDecomposition:
    """s = m^alpha * q with gcd(q, m) = 1."""

    alpha: int
    q: int


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    return old_r, old_x, old_y


def crt_solve(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Least non-negative x with x = residues[i] (mod moduli[i]) for all i.

    Moduli must be pairwise coprime positive integers (1 is allowed); the
    solution is unique mod their product.
    """
    residues = [int(a) for a in residues]
    mods = [int(m) for m in moduli]
    if not mods or len(residues) != len(mods):
        raise ValueError("residues and moduli must be equal-length and non-empty")
    for m in mods:
        if m < 1:
            raise ValueError(f"modulus {m} must be >= 1")
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if math.gcd(mods[i], mods[j]) != 1:
                raise ModuliNotCoprime(
                    f"moduli {mods[i]} and {mods[j]} are not coprime"
                )
    x, n = residues[0] % mods[0], mods[0]
    for a, m in zip(residues[1:], mods[1:]):
        if m == 1:
            continue
        g, inv, _ = _extended_gcd(n % m, m)
        assert g == 1
        t = ((a - x) * inv) % m
        x += n * t
        n *= m
    return x % n


def madic_decomposition(s: int, m: int) -> MAdicDecomposition:
    """Split s = m^alpha * q with gcd(q, m) = 1, when such a split exists.

    Always exists for prime (or squarefree) m; can fail otherwise, e.g.
    s = 2, m = 4.  Raises NoDecomposition in that case.
    """
    s, m = int(s), int(m)
    if s == 0:
        raise ValueError("s must be nonzero")
    if m < 2:
        raise ValueError(f"modulus {m} must be >= 2")
    alpha, q = 0, s
    while q % m == 0:
        q //= m
        alpha += 1
    if math.gcd(abs(q), m) != 1:
        raise NoDecomposition(f"{s} is not m^alpha * (unit mod m) for m = {m}")
    return MAdicDecomposition(alpha=alpha, q=q)


def gcd_certificate_condition(s: int, m: int, n: int) -> bool:
    """Whether gcd(s, m^(n+1)) divides m^n.

    This is the single-coordinate criterion for the standard lift at stage n+1
    to hit every m-division point; it is monotone in n and never needs the
    decomposition above to exist.
    """
    if n < 0:
        raise ValueError("stage n must be >= 0")
    g = math.gcd(abs(int(s)), int(m) ** (n + 1))
    return int(m) ** n % g == 0
