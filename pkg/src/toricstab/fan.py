"""Fans of smooth complete toric varieties.

A `Fan` is a set of primitive integer rays together with the full-dimensional
cones, each given as a tuple of ray indices.  `new_fan` is the only public
constructor; it certifies that the data really is a smooth complete fan
(primitive distinct rays, unimodular full-dimensional cones, pairwise
intersections along common faces, every facet shared by exactly two cones,
connected adjacency) and raises `FanError` with the full list of violations
otherwise.

Cone order in `max_cones` is preserved from the input: downstream code that
rewrites cycles picks the first cone containing a face, so constructors can
steer which representative gets used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .linalg import is_primitive, matrix_inverse, pairing, span

Ray = tuple[int, ...]


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class FanError(ValueError):
    """Fan data failed the smooth complete fan checks."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Fan:
    """Validated smooth complete fan.  Build through `new_fan`."""

    dim: int
    rays: tuple[Ray, ...]
    max_cones: tuple[tuple[int, ...], ...]
    ray_names: tuple[str, ...]
    # set by `product`: (ray_start, ray_stop, coord_start, coord_stop) per factor
    factor_blocks: tuple[tuple[int, int, int, int], ...] | None = field(default=None)

    def __repr__(self) -> str:
        return (f"Fan(dim={self.dim}, rays={len(self.rays)}, "
                f"max_cones={len(self.max_cones)})")

    def ray_named(self, name: str) -> int:
        try:
            return self.ray_names.index(name)
        except ValueError:
            raise KeyError(f"no ray named {name!r}") from None

    @property
    def n_rays(self) -> int:
        return len(self.rays)


@dataclass(frozen=True)
class Wall:
    """Codimension-one cone: `rays` are its ray indices (sorted), `cones` the
    two adjacent maximal cones, `opposite[k]` the ray completing it inside
    `cones[k]`.  The relation

        v[opposite[0]] + sum(coeffs[i] * v[rays[i]]) + v[opposite[1]] == 0

    holds with integer coefficients."""

    rays: tuple[int, ...]
    cones: tuple[int, int]
    opposite: tuple[int, int]
    coeffs: tuple[int, ...]


def dual_basis(ray_vectors: Sequence[Ray]) -> list[Ray]:
    """Integer vectors m_i with <m_i, v_j> = delta_ij for a unimodular basis."""
    inv = matrix_inverse(ray_vectors)
    n = len(ray_vectors)
    out = []
    for i in range(n):
        col = [inv[j][i] for j in range(n)]
        if any(x.denominator != 1 for x in col):
            raise ValueError("dual basis requires a unimodular ray basis")
        out.append(tuple(int(x) for x in col))
    return out


def _det_int(rows: Sequence[Ray]) -> int:
    """Integer determinant by cofactor-free elimination over exact fractions."""
    from .linalg import det
    d = det(rows)
    assert d.denominator == 1
    return int(d)


def _dedupe_names(names: Sequence[str]) -> tuple[str, ...]:
    used: set[str] = set()
    out = []
    for nm in names:
        cand = nm
        while cand in used:
            cand += "'"
        out.append(cand)
        used.add(cand)
    return tuple(out)


def _pair_intersects_properly(dim: int, rays: Sequence[Ray],
                              cone_a: tuple[int, ...], cone_b: tuple[int, ...],
                              dual_a: list[Ray], dual_b: list[Ray]) -> bool:
    """True when Cone(cone_a) ∩ Cone(cone_b) equals the cone on their common
    rays (hence is a common face; both cones are unimodular and simplicial).

    Fast path: a separating functional built from the dual basis.  Summing the
    dual vectors of the rays of `cone_a` missing from `cone_b` gives m0 >= 0 on
    cone_a, vanishing exactly on the common-ray face; if m0 <= 0 on all of
    cone_b's rays, the intersection is pinched into that face.  The criterion
    is sufficient but not necessary, so on failure (either side) fall back to
    exact extreme-ray enumeration of the intersection cone.
    """
    common = set(cone_a) & set(cone_b)
    for cone, other, dual in ((cone_a, cone_b, dual_a), (cone_b, cone_a, dual_b)):
        m0 = [0] * dim
        for pos, ridx in enumerate(cone):
            if ridx not in common:
                row = dual[pos]
                for c in range(dim):
                    m0[c] += row[c]
        if all(sum(m0[c] * rays[r][c] for c in range(dim)) <= 0 for r in other):
            return True

    # Exact fallback.  The intersection K = {x : <m,x> >= 0 for all stacked
    # dual rows} is pointed (it sits inside a unimodular cone), so K is the
    # hull of its extreme rays, each cut out by dim-1 independent active rows.
    stacked = list(dual_a) + list(dual_b)
    seen: set[tuple] = set()
    for subset in itertools.combinations(range(2 * dim), dim - 1):
        kernel = span([stacked[i] for i in subset], dim).perp()
        if kernel.dim != 1:
            continue
        z = kernel.basis[0]
        if z in seen:
            continue
        seen.add(z)
        vals_a = [pairing(m, z) for m in dual_a]
        vals_b = [pairing(m, z) for m in dual_b]
        if all(v <= 0 for v in vals_a) and all(v <= 0 for v in vals_b):
            vals_a = [-v for v in vals_a]
            vals_b = [-v for v in vals_b]
        elif not (all(v >= 0 for v in vals_a) and all(v >= 0 for v in vals_b)):
            continue
        # z lies in K; its cone_a-coordinates are vals_a, so membership in the
        # common face means support only on shared rays.
        for pos, ridx in enumerate(cone_a):
            if vals_a[pos] > 0 and ridx not in common:
                return False
    return True


def new_fan(rays: Sequence[Sequence[int]],
            max_cones: Sequence[Sequence[int]],
            ray_names: Sequence[str] | None = None,
            *,
            dim: int | None = None,
            factor_blocks: tuple[tuple[int, int, int, int], ...] | None = None) -> Fan:
    """Validate and build a smooth complete fan; raise `FanError` otherwise."""
    violations: list[Violation] = []

    ray_tuples = tuple(tuple(int(x) for x in v) for v in rays)
    if not ray_tuples:
        raise FanError([Violation("no_rays", "a fan needs at least one ray")])
    n = dim if dim is not None else len(ray_tuples[0])
    if n < 1:
        raise FanError([Violation("bad_dimension", f"lattice rank {n} < 1")])

    for i, v in enumerate(ray_tuples):
        if len(v) != n:
            violations.append(Violation(
                "bad_ray_length", f"ray #{i} has {len(v)} coordinates, expected {n}"))
        elif all(x == 0 for x in v):
            violations.append(Violation("zero_ray", f"ray #{i} is zero"))
        elif not is_primitive(v):
            violations.append(Violation("non_primitive_ray", f"ray #{i} = {v}"))
    for i, j in itertools.combinations(range(len(ray_tuples)), 2):
        if ray_tuples[i] == ray_tuples[j]:
            violations.append(Violation("duplicate_ray", f"rays #{i} and #{j} coincide"))

    if ray_names is None:
        names = tuple(f"r{i}" for i in range(len(ray_tuples)))
    else:
        names = tuple(str(s) for s in ray_names)
        if len(names) != len(ray_tuples):
            violations.append(Violation(
                "bad_ray_names", f"{len(names)} names for {len(ray_tuples)} rays"))
        elif len(set(names)) != len(names):
            violations.append(Violation("bad_ray_names", "ray names are not unique"))

    cone_tuples = []
    for k, cone in enumerate(max_cones):
        idx = tuple(int(i) for i in cone)
        if any(i < 0 or i >= len(ray_tuples) for i in idx):
            violations.append(Violation("bad_ray_index", f"cone #{k} = {idx}"))
            continue
        if len(set(idx)) != len(idx):
            violations.append(Violation("repeated_ray_in_cone", f"cone #{k} = {idx}"))
            continue
        cone_tuples.append(tuple(sorted(idx)))
    if not cone_tuples:
        violations.append(Violation("no_cones", "a complete fan needs maximal cones"))
    for k, l in itertools.combinations(range(len(cone_tuples)), 2):
        if cone_tuples[k] == cone_tuples[l]:
            violations.append(Violation("duplicate_cone", f"cones #{k} and #{l} coincide"))
    if violations:
        raise FanError(violations)

    for k, cone in enumerate(cone_tuples):
        if len(cone) != n:
            violations.append(Violation(
                "bad_cone_size", f"cone #{k} has {len(cone)} rays in rank {n}"))
    if violations:
        raise FanError(violations)

    duals = []
    for k, cone in enumerate(cone_tuples):
        mat = [ray_tuples[i] for i in cone]
        d = _det_int(mat)
        if abs(d) != 1:
            violations.append(Violation(
                "non_unimodular_cone",
                f"cone #{k} spans index |det| = {abs(d)}"))
            duals.append(None)
        else:
            duals.append(dual_basis(mat))
    if violations:
        raise FanError(violations)

    used = {i for cone in cone_tuples for i in cone}
    for i in range(len(ray_tuples)):
        if i not in used:
            violations.append(Violation("unused_ray", f"ray #{i} appears in no cone"))

    for a, b in itertools.combinations(range(len(cone_tuples)), 2):
        if not _pair_intersects_properly(n, ray_tuples, cone_tuples[a],
                                         cone_tuples[b], duals[a], duals[b]):
            violations.append(Violation(
                "overlapping_cones",
                f"cones #{a} and #{b} do not meet along a common face"))

    facets: dict[frozenset, list[int]] = {}
    for k, cone in enumerate(cone_tuples):
        for i in cone:
            facets.setdefault(frozenset(cone) - {i}, []).append(k)
    adjacency: dict[int, set[int]] = {k: set() for k in range(len(cone_tuples))}
    for facet, owners in sorted(facets.items(), key=lambda kv: sorted(kv[0])):
        if len(owners) != 2:
            violations.append(Violation(
                "open_facet",
                f"facet {tuple(sorted(facet))} lies in {len(owners)} cone(s), expected 2"))
        else:
            adjacency[owners[0]].add(owners[1])
            adjacency[owners[1]].add(owners[0])
    reached = {0}
    frontier = [0]
    while frontier:
        k = frontier.pop()
        for m in adjacency[k]:
            if m not in reached:
                reached.add(m)
                frontier.append(m)
    if len(reached) != len(cone_tuples):
        violations.append(Violation(
            "disconnected_fan",
            f"only {len(reached)} of {len(cone_tuples)} cones reachable through facets"))

    if violations:
        raise FanError(violations)
    return Fan(n, ray_tuples, tuple(cone_tuples), names, factor_blocks)


@lru_cache(maxsize=None)
def _cone_sets(fan: Fan) -> tuple[frozenset, ...]:
    return tuple(frozenset(c) for c in fan.max_cones)


def contains_cone(fan: Fan, ray_indices: Sequence[int]) -> bool:
    """True when the given rays span a face of some maximal cone."""
    s = frozenset(ray_indices)
    return any(s <= c for c in _cone_sets(fan))


@lru_cache(maxsize=None)
def cone_dual_basis(fan: Fan, cone_index: int) -> tuple[Ray, ...]:
    cone = fan.max_cones[cone_index]
    return tuple(dual_basis([fan.rays[i] for i in cone]))


@lru_cache(maxsize=None)
def walls(fan: Fan) -> tuple[Wall, ...]:
    """All codimension-one cones with their two neighbours and the integer
    relation tying the opposite rays across the wall."""
    table: dict[frozenset, list[tuple[int, int]]] = {}
    for k, cone in enumerate(fan.max_cones):
        for i in cone:
            table.setdefault(frozenset(cone) - {i}, []).append((k, i))
    out = []
    for facet in sorted(table, key=lambda f: tuple(sorted(f))):
        (c0, r0), (c1, r1) = sorted(table[facet])
        tau = tuple(sorted(facet))
        cone0 = fan.max_cones[c0]
        dual = cone_dual_basis(fan, c0)
        coords = {ray: pairing(m, fan.rays[r1]) for ray, m in zip(cone0, dual)}
        assert coords[r0] == -1, "wall neighbours must sit on opposite sides"
        coeffs = []
        for ray in tau:
            c = -coords[ray]
            assert c.denominator == 1
            coeffs.append(int(c))
        out.append(Wall(tau, (c0, c1), (r0, r1), tuple(coeffs)))
    return tuple(out)


def product(*fans: Fan) -> Fan:
    """Product fan; records per-factor ray/coordinate blocks for pullbacks."""
    if not fans:
        raise ValueError("product of no fans")
    dim = sum(f.dim for f in fans)
    rays: list[Ray] = []
    names: list[str] = []
    blocks = []
    coord_off = 0
    ray_off = 0
    for f in fans:
        for v in f.rays:
            rays.append((0,) * coord_off + v + (0,) * (dim - coord_off - f.dim))
        names.extend(f.ray_names)
        blocks.append((ray_off, ray_off + f.n_rays, coord_off, coord_off + f.dim))
        ray_off += f.n_rays
        coord_off += f.dim
    cones = []
    for combo in itertools.product(*[f.max_cones for f in fans]):
        cone: list[int] = []
        for block, c in zip(blocks, combo):
            cone.extend(block[0] + i for i in c)
        cones.append(tuple(cone))
    return new_fan(rays, cones, _dedupe_names(names), factor_blocks=tuple(blocks))


def projectivize(base: Fan, profiles: Sequence[Sequence[int]]) -> Fan:
    """Fan of P(O(D_0) ⊕ ... ⊕ O(D_r)) over `base`.

    Each profile is a divisor on the base as a coefficient tuple over its
    rays.  Base ray v with coefficients a^(j) lifts to (v, t_1..t_r) with
    t_j = a^(j) - a^(0); the fiber directions contribute the projective-space
    rays t_1..t_r and t_0 = -(t_1+...+t_r).  Twisting all profiles by a common
    divisor leaves the fan unchanged.
    """
    profs = [tuple(int(a) for a in d) for d in profiles]
    r = len(profs) - 1
    if r < 1:
        raise ValueError("projectivize needs at least two summands")
    for d in profs:
        if len(d) != base.n_rays:
            raise ValueError("profile length does not match ray count")
    dim = base.dim + r
    rays: list[Ray] = []
    for i, v in enumerate(base.rays):
        t = tuple(profs[j][i] - profs[0][i] for j in range(1, r + 1))
        rays.append(v + t)
    fiber_first = len(rays)
    rays.append((0,) * base.dim + (-1,) * r)
    for j in range(r):
        e = [0] * r
        e[j] = 1
        rays.append((0,) * base.dim + tuple(e))
    names = list(base.ray_names) + [f"t{j}" for j in range(r + 1)]
    cones = []
    for sigma in base.max_cones:
        for omit in range(r + 1):
            fiber = [fiber_first + j for j in range(r + 1) if j != omit]
            cones.append(tuple(sigma) + tuple(fiber))
    return new_fan(rays, cones, _dedupe_names(names))


def star_subdivide(fan: Fan, tau: Sequence[int], *, name: str = "u_tau") -> Fan:
    """Star subdivision along the face spanned by ray indices `tau`: adds the
    ray-sum as a new ray and fans out every maximal cone containing the face."""
    tau = tuple(int(i) for i in tau)
    if len(set(tau)) != len(tau) or len(tau) < 2:
        raise ValueError("subdivision face needs at least two distinct rays")
    if not contains_cone(fan, tau):
        raise ValueError("rays do not span a cone of the fan")
    u = tuple(sum(fan.rays[i][c] for i in tau) for c in range(fan.dim))
    new_index = fan.n_rays
    rays = list(fan.rays) + [u]
    names = _dedupe_names(list(fan.ray_names) + [name])
    tau_set = set(tau)
    cones = []
    for cone in fan.max_cones:
        if not tau_set <= set(cone):
            cones.append(cone)
            continue
        for drop in tau:
            cones.append(tuple(i for i in cone if i != drop) + (new_index,))
    return new_fan(rays, cones, names)
