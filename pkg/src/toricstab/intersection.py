"""Intersection numbers of invariant divisors on smooth complete toric
varieties, all in exact integer/rational arithmetic.

A divisor is a plain coefficient sequence over the fan's rays.  Cycles are
formal sums of orbit closures, keyed by the (sorted) ray-index tuples of the
cones; the fundamental class is the empty cone.  `multiply` pushes a divisor
against a cycle by first subtracting principal divisors until the coefficients
vanish on each cone's rays, then reading off the adjacent cones — on a smooth
fan every multiplicity is one, so the result stays integral for integral
input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fan import Fan, Wall, _cone_sets, cone_dual_basis, walls
from .linalg import pairing, solve

Number = int | Fraction
Divisor = Sequence[Number]


def _norm(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass
class ChowCycle:
    """Formal sum of orbit closures of a fixed codimension."""

    fan: Fan
    codim: int
    terms: dict[tuple[int, ...], Number]

    def total(self) -> Number:
        return _norm(sum(self.terms.values(), Fraction(0)))


def fundamental_cycle(fan: Fan) -> ChowCycle:
    return ChowCycle(fan, 0, {(): 1})


def _check_divisor(fan: Fan, divisor: Divisor) -> list[Number]:
    if len(divisor) != fan.n_rays:
        raise ValueError(
            f"divisor has {len(divisor)} coefficients for {fan.n_rays} rays")
    return list(divisor)


def multiply(divisor: Divisor, cycle: ChowCycle) -> ChowCycle:
    """The cycle `divisor . cycle`, one codimension deeper."""
    fan = cycle.fan
    base = _check_divisor(fan, divisor)
    if cycle.codim >= fan.dim:
        raise ValueError("cycle already has maximal codimension")
    cone_sets = _cone_sets(fan)
    out: dict[tuple[int, ...], Number] = {}
    for tau, weight in cycle.terms.items():
        a = list(base)
        if tau:
            tau_set = frozenset(tau)
            sigma_index = next(k for k, c in enumerate(cone_sets) if tau_set <= c)
            sigma = fan.max_cones[sigma_index]
            dual = cone_dual_basis(fan, sigma_index)
            for pos, ray in enumerate(sigma):
                if ray in tau_set and a[ray] != 0:
                    m = dual[pos]
                    coeff = a[ray]
                    for i, v in enumerate(fan.rays):
                        a[i] -= coeff * pairing(m, v)
        for ray, coeff in enumerate(a):
            if coeff == 0 or ray in tau:
                continue
            upsilon = tuple(sorted(tau + (ray,)))
            if any(set(upsilon) <= c for c in cone_sets):
                out[upsilon] = out.get(upsilon, 0) + weight * coeff
    out = {k: _norm(v) for k, v in out.items() if v != 0}
    return ChowCycle(fan, cycle.codim + 1, out)


def intersection_number(fan: Fan, divisors: Sequence[Divisor]) -> Number:
    """Product of `dim` divisors against the fundamental class."""
    if len(divisors) != fan.dim:
        raise ValueError(f"need exactly {fan.dim} divisors, got {len(divisors)}")
    cycle = fundamental_cycle(fan)
    for d in divisors:
        cycle = multiply(d, cycle)
    return cycle.total()


@lru_cache(maxsize=None)
def _polarization_curve(fan: Fan, polarization: tuple) -> ChowCycle:
    cycle = fundamental_cycle(fan)
    for _ in range(fan.dim - 1):
        cycle = multiply(polarization, cycle)
    return cycle


def degree(fan: Fan, divisor: Divisor, polarization: Divisor) -> Number:
    """divisor . polarization^(dim-1)."""
    curve = _polarization_curve(fan, tuple(polarization))
    return multiply(divisor, curve).total()


def wall_value(fan: Fan, divisor: Divisor, wall: Wall) -> Number:
    """Pairing of the divisor with the invariant curve of the wall."""
    a = _check_divisor(fan, divisor)
    total = a[wall.opposite[0]] + a[wall.opposite[1]]
    for ray, coeff in zip(wall.rays, wall.coeffs):
        total += coeff * a[ray]
    return _norm(Fraction(total))


def is_nef(fan: Fan, divisor: Divisor) -> bool:
    return all(wall_value(fan, divisor, w) >= 0 for w in walls(fan))


def is_ample(fan: Fan, divisor: Divisor) -> bool:
    return all(wall_value(fan, divisor, w) > 0 for w in walls(fan))


def anticanonical(fan: Fan) -> tuple[int, ...]:
    return (1,) * fan.n_rays


def is_fano(fan: Fan) -> bool:
    return is_ample(fan, anticanonical(fan))


def picard_rank(fan: Fan) -> int:
    return fan.n_rays - fan.dim


def basis_divisor(fan: Fan, ray_index: int) -> tuple[int, ...]:
    if not 0 <= ray_index < fan.n_rays:
        raise ValueError(f"no ray #{ray_index}")
    return tuple(int(i == ray_index) for i in range(fan.n_rays))


def principal_divisor(fan: Fan, m: Sequence[Number]) -> tuple[Number, ...]:
    """Divisor of the character with exponent `m`: coefficient <m, v> per ray."""
    if len(m) != fan.dim:
        raise ValueError("character exponent must have lattice rank entries")
    return tuple(_norm(pairing(m, v)) for v in fan.rays)


def linearly_equivalent(fan: Fan, one: Divisor, other: Divisor) -> bool:
    """True when the difference is the divisor of a character."""
    a = _check_divisor(fan, one)
    b = _check_divisor(fan, other)
    rhs = [x - y for x, y in zip(a, b)]
    return solve(list(fan.rays), rhs) is not None
