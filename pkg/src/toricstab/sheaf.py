"""Equivariant reflexive sheaves as per-ray filtrations.

A sheaf of rank r on a fan is stored as one increasing filtration of Q^r per
ray: a sorted tuple of (jump, subspace) pairs meaning the filtration equals
that subspace from the jump on, is zero before the first jump, and must reach
the full space at the last one.  Line bundles, the (co)tangent sheaf, duals,
sums and tensor products all stay in this picture, as do first Chern classes
and slopes.

Local freeness and complete decomposability are decided through the lattice
the filtration subspaces generate under intersection and sum: the sheaf is
(locally) a direct sum of rank-one pieces exactly when that lattice is
distributive.  The closure is capped; hitting the cap returns the
`INCONCLUSIVE` sentinel rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fan import Fan
from .intersection import degree
from .linalg import Subspace, full_subspace, intersect, span, zero_subspace

LATTICE_CAP = 4096


class SheafError(ValueError):
    """Filtration data does not describe a reflexive sheaf."""


class _Inconclusive:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Inconclusive"

    def __bool__(self) -> bool:
        raise TypeError("inconclusive result has no truth value; compare with 'is'")


INCONCLUSIVE = _Inconclusive()

Filtration = tuple[tuple[int, Subspace], ...]


@dataclass(frozen=True)
class ReflexiveSheaf:
    fan: Fan
    rank: int
    filtrations: tuple[Filtration, ...]

    def __repr__(self) -> str:
        return f"ReflexiveSheaf(rank={self.rank}, rays={len(self.filtrations)})"

    def value(self, ray_index: int, i: int) -> Subspace:
        """Filtration of the given ray evaluated at integer i."""
        current = zero_subspace(self.rank)
        for jump, space in self.filtrations[ray_index]:
            if jump <= i:
                current = space
            else:
                break
        return current


def _normalize_filtration(rank: int, pairs: Sequence[tuple[int, Subspace]]) -> Filtration:
    items = sorted(pairs, key=lambda p: p[0])
    jumps = [j for j, _ in items]
    if len(set(jumps)) != len(jumps):
        raise SheafError(f"repeated jump value in filtration: {jumps}")
    previous = zero_subspace(rank)
    cleaned = []
    for jump, space in items:
        if not isinstance(jump, int):
            raise SheafError(f"jump {jump!r} is not an integer")
        if space.ambient_dim != rank:
            raise SheafError(
                f"subspace lives in Q^{space.ambient_dim}, sheaf has rank {rank}")
        if space == previous:
            continue
        if not space.contains_subspace(previous):
            raise SheafError("filtration values must increase")
        cleaned.append((jump, space))
        previous = space
    if not cleaned or not previous.is_full():
        raise SheafError("filtration must end at the full space")
    return tuple(cleaned)


def reflexive_sheaf(fan: Fan, rank: int,
                    filtrations: Sequence[Sequence[tuple[int, Subspace]]]) -> ReflexiveSheaf:
    if rank < 1:
        raise SheafError(f"rank must be positive, got {rank}")
    if len(filtrations) != fan.n_rays:
        raise SheafError(
            f"{len(filtrations)} filtrations for {fan.n_rays} rays")
    normalized = tuple(_normalize_filtration(rank, f) for f in filtrations)
    return ReflexiveSheaf(fan, rank, normalized)


def line_bundle(fan: Fan, divisor: Sequence[int]) -> ReflexiveSheaf:
    """O(D): the rank-one sheaf jumping to full level at -a_rho on each ray."""
    if len(divisor) != fan.n_rays:
        raise SheafError("divisor length does not match ray count")
    full = full_subspace(1)
    filts = [[(-int(a), full)] for a in divisor]
    return reflexive_sheaf(fan, 1, filts)


def tangent(fan: Fan) -> ReflexiveSheaf:
    """Tangent sheaf: each ray direction enters one step early."""
    n = fan.dim
    full = full_subspace(n)
    filts = [[(-1, span([v], n)), (0, full)] for v in fan.rays]
    return reflexive_sheaf(fan, n, filts)


def cotangent(fan: Fan) -> ReflexiveSheaf:
    n = fan.dim
    full = full_subspace(n)
    filts = [[(0, span([v], n).perp()), (1, full)] for v in fan.rays]
    return reflexive_sheaf(fan, n, filts)


def dual(sheaf: ReflexiveSheaf) -> ReflexiveSheaf:
    """Reflexive dual: value at i is the annihilator of the value at -i-1."""
    filts = []
    for pairs in sheaf.filtrations:
        prev = [zero_subspace(sheaf.rank)] + [space for _, space in pairs[:-1]]
        filts.append([(-jump, below.perp())
                      for (jump, _), below in zip(pairs, prev)])
    return reflexive_sheaf(sheaf.fan, sheaf.rank, filts)


def direct_sum(*sheaves: ReflexiveSheaf) -> ReflexiveSheaf:
    if not sheaves:
        raise SheafError("direct sum of no sheaves")
    fan = sheaves[0].fan
    if any(s.fan != fan for s in sheaves):
        raise SheafError("summands live on different fans")
    rank = sum(s.rank for s in sheaves)
    offsets = []
    pos = 0
    for s in sheaves:
        offsets.append(pos)
        pos += s.rank
    filts = []
    for ridx in range(fan.n_rays):
        jumps = sorted({j for s in sheaves for j, _ in s.filtrations[ridx]})
        pairs = []
        for i in jumps:
            rows = []
            for s, off in zip(sheaves, offsets):
                for row in s.value(ridx, i).basis:
                    rows.append((0,) * off + row + (0,) * (rank - off - s.rank))
            pairs.append((i, span(rows, rank)))
        filts.append(pairs)
    return reflexive_sheaf(fan, rank, filts)


def _kron(u: Sequence, w: Sequence) -> tuple:
    return tuple(a * b for a in u for b in w)


def tensor(one: ReflexiveSheaf, other: ReflexiveSheaf) -> ReflexiveSheaf:
    if one.fan != other.fan:
        raise SheafError("factors live on different fans")
    rank = one.rank * other.rank
    filts = []
    for ridx in range(one.fan.n_rays):
        jumps_a = [j for j, _ in one.filtrations[ridx]]
        jumps_b = [j for j, _ in other.filtrations[ridx]]
        candidates = sorted({a + b for a in jumps_a for b in jumps_b})
        pairs = []
        for i in candidates:
            rows = []
            for s in jumps_a:
                left = one.value(ridx, s)
                right = other.value(ridx, i - s)
                for u in left.basis:
                    for w in right.basis:
                        rows.append(_kron(u, w))
            pairs.append((i, span(rows, rank)))
        filts.append(pairs)
    return reflexive_sheaf(one.fan, rank, filts)


def c1(sheaf: ReflexiveSheaf) -> tuple[int, ...]:
    """First Chern class as an invariant divisor."""
    coeffs = []
    for pairs in sheaf.filtrations:
        total = 0
        prev_dim = 0
        for jump, space in pairs:
            total -= jump * (space.dim - prev_dim)
            prev_dim = space.dim
        coeffs.append(total)
    return tuple(coeffs)


def slope(sheaf: ReflexiveSheaf, polarization: Sequence) -> Fraction:
    return Fraction(degree(sheaf.fan, c1(sheaf), polarization)) / sheaf.rank


def _coords_in(ambient: Subspace, space: Subspace) -> list[tuple]:
    """Rewrite `space`'s basis in coordinates of `ambient`'s basis rows."""
    from .linalg import solve
    cols = list(zip(*ambient.basis))  # transpose: each row of B^T is a coordinate
    out = []
    for vec in space.basis:
        sol = solve(cols, vec)
        assert sol is not None, "subspace not contained in ambient"
        out.append(tuple(sol))
    return out


def induced_subsheaf(sheaf: ReflexiveSheaf, subspace: Subspace) -> ReflexiveSheaf:
    """Saturated subsheaf cut out by a subspace of the generic fiber: the
    filtration on each ray is intersected with it, rewritten in its own
    coordinates."""
    if subspace.ambient_dim != sheaf.rank:
        raise SheafError("subspace does not live in the generic fiber")
    k = subspace.dim
    if k == 0:
        raise SheafError("zero subspace does not induce a sheaf")
    filts = []
    for ridx in range(sheaf.fan.n_rays):
        pairs = []
        for jump, space in sheaf.filtrations[ridx]:
            cut = intersect(space, subspace)
            pairs.append((jump, span(_coords_in(subspace, cut), k)))
        if not pairs or pairs[-1][1].dim != k:
            # the last filtration value is the full space, so the cut is all
            # of the subspace; this is unreachable but keeps the invariant loud
            raise SheafError("induced filtration does not exhaust the subspace")
        filts.append(pairs)
    return reflexive_sheaf(sheaf.fan, k, filts)


def _proper_spaces(spaces) -> set[Subspace]:
    return {s for s in spaces if 0 < s.dim < s.ambient_dim}


def _lattice_closure(generators: set[Subspace], cap: int):
    """Close under pairwise sum and intersection, keeping proper subspaces
    only (zero and full can never break distributivity).  None when `cap` is
    exceeded."""
    closure = set(generators)
    frontier = list(generators)
    while frontier:
        fresh = []
        for new in frontier:
            for old in list(closure):
                for combined in (new + old, intersect(new, old)):
                    if 0 < combined.dim < combined.ambient_dim and combined not in closure:
                        closure.add(combined)
                        fresh.append(combined)
                        if len(closure) > cap:
                            return None
        frontier = fresh
    return closure


def _is_distributive(spaces: set[Subspace]) -> bool:
    items = sorted(spaces, key=lambda s: (s.dim, s.basis))
    for a in items:
        for b in items:
            for c in items:
                if intersect(a, b + c) != intersect(a, b) + intersect(a, c):
                    return False
    return True


def is_locally_free(sheaf: ReflexiveSheaf):
    """True / False / INCONCLUSIVE.

    On each maximal cone the filtrations must admit a simultaneous splitting
    into rank-one pieces, which happens exactly when the subspaces they take
    generate a distributive lattice.
    """
    hit_cap = False
    for cone in sheaf.fan.max_cones:
        gens = _proper_spaces(space for ridx in cone
                              for _, space in sheaf.filtrations[ridx])
        closure = _lattice_closure(gens, LATTICE_CAP)
        if closure is None:
            hit_cap = True
            continue
        if not _is_distributive(closure):
            return False
    return INCONCLUSIVE if hit_cap else True


def is_decomposable(sheaf: ReflexiveSheaf):
    """Whether the sheaf splits into a direct sum of rank-one subsheaves:
    True / False / INCONCLUSIVE.  The criterion is distributivity of the
    lattice generated by every filtration subspace across all rays."""
    if sheaf.rank == 1:
        return True
    gens = _proper_spaces(space for pairs in sheaf.filtrations
                          for _, space in pairs)
    closure = _lattice_closure(gens, LATTICE_CAP)
    if closure is None:
        return INCONCLUSIVE
    return _is_distributive(closure)
