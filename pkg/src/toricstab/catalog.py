"""Named fan and bundle builders.

Everything here is deterministic: fixed ray orders, fixed cone orders, fixed
names, so that emitted files and reports are byte-stable.  The fixed table of
labelled four-folds (``catalog_labels``/``catalog_entry``) carries the
expected anticanonical verdict for each entry; the family builders
(`kleinschmidt`, `bott_tower`, `del_pezzo`, ...) produce the fans those
entries and the rank-two bundle constructions live on.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .fan import Fan, new_fan, product, star_subdivide
from .intersection import anticanonical, is_fano
from .linalg import Subspace, full_subspace, span
from .sheaf import ReflexiveSheaf, reflexive_sheaf
from .stability import SEMISTABLE, STABLE, UNSTABLE


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    fan: Fan
    default_polarization: tuple[int, ...] | None  # -K when Fano, else None
    expected_verdict: str | None


# ---------------------------------------------------------------------------
# Picard-rank-one and -two families


def projective_space(n: int) -> Fan:
    """P^n with rays e_1..e_n, e_0 = -(e_1+...+e_n) and all n-subsets as
    maximal cones."""
    if n < 1:
        raise ValueError("projective space needs positive dimension")
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append((-1,) * n)
    names = [f"e{i}" for i in range(1, n + 1)] + ["e0"]
    cones = list(itertools.combinations(range(n + 1), n))
    return new_fan(rays, cones, names)


def kleinschmidt(s: int, a_list: Sequence[int]) -> Fan:
    """Fan of P(O + O(a_1) + ... + O(a_r)) over P^s.

    Rays in order v_0..v_s, e_0..e_r where v_i are the base directions with
    v_0 = -(v_1+...+v_s) + a_1 e_1 + ... + a_r e_r, and e_0 = -(e_1+...+e_r).
    Maximal cones drop one v and one e each.
    """
    a_list = tuple(int(a) for a in a_list)
    r = len(a_list)
    if s < 1 or r < 1:
        raise ValueError("need base and fiber dimensions at least one")
    if any(a < 0 for a in a_list) or list(a_list) != sorted(a_list):
        raise ValueError("twists must be sorted non-negative integers")
    dim = s + r
    v = [tuple(int(i == j) for j in range(dim)) for i in range(s)]
    e = [tuple(int(s + i == j) for j in range(dim)) for i in range(r)]
    v0 = tuple(-1 if j < s else a_list[j - s] for j in range(dim))
    e0 = tuple(0 if j < s else -1 for j in range(dim))
    rays = [v0] + v + [e0] + e
    names = [f"v{i}" for i in range(s + 1)] + [f"e{i}" for i in range(r + 1)]
    cones = []
    for j in range(s + 1):
        base = [x for x in range(s + 1) if x != j]
        for i in range(r + 1):
            fiber = [s + 1 + x for x in range(r + 1) if x != i]
            cones.append(tuple(base + fiber))
    return new_fan(rays, cones, names)


def hirzebruch(a: int) -> Fan:
    """The Hirzebruch surface P(O + O(a)) over P^1."""
    return kleinschmidt(1, [a])


# ---------------------------------------------------------------------------
# Bott towers


def _check_bott_numbers(k: int, c: Mapping[tuple[int, int], int]) -> dict:
    out = {}
    for key, value in c.items():
        i, j = key
        if not (1 <= i < j <= k):
            raise ValueError(f"Bott number index {key} out of range")
        if int(value) < 0:
            raise ValueError(f"Bott number c[{i},{j}] = {value} is negative")
        out[(i, j)] = int(value)
    return out


def bott_tower(k: int, c: Mapping[tuple[int, int], int]) -> Fan:
    """Iterated P^1-bundle tower of height k with Bott numbers c[i,j] >= 0.

    Rays v_1..v_k are the standard basis; v_{k+i} = -e_i + sum_{j>i} c[i,j] e_j
    for i < k and v_{2k} = -e_k.  The 2^k maximal cones pick, for each i,
    either v_i or v_{k+i}.
    """
    if k < 1:
        raise ValueError("tower height must be positive")
    c = _check_bott_numbers(k, c)
    rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    for i in range(1, k + 1):
        vec = [0] * k
        vec[i - 1] = -1
        for j in range(i + 1, k + 1):
            vec[j - 1] = c.get((i, j), 0)
        rays.append(tuple(vec))
    names = [f"v{i}" for i in range(1, 2 * k + 1)]
    cones = []
    for mask in range(2 ** k):
        cone = [(k + i if mask >> i & 1 else i) for i in range(k)]
        cones.append(tuple(cone))
    return new_fan(rays, cones, names)


# ---------------------------------------------------------------------------
# (Pseudo) Del Pezzo varieties and pseudo-symmetric products


def del_pezzo(n: int) -> Fan:
    """Even-dimensional Del Pezzo variety V^n = V^{2r}.

    Rays v_0, w_0, ..., v_n, w_n with v_1..v_n the standard basis,
    v_0 = -(v_1+...+v_n) and w_i = -v_i; maximal cones take r of the v's and
    r of the w's with disjoint index sets.
    """
    if n < 2 or n % 2:
        raise ValueError("Del Pezzo varieties have even dimension >= 2")
    r = n // 2
    v = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    v.insert(0, (-1,) * n)
    rays = []
    names = []
    for i in range(n + 1):
        rays.append(v[i])
        rays.append(tuple(-x for x in v[i]))
        names.extend([f"v{i}", f"w{i}"])
    cones = []
    for i_set in itertools.combinations(range(n + 1), r):
        rest = [j for j in range(n + 1) if j not in i_set]
        for j_set in itertools.combinations(rest, r):
            cones.append(tuple(sorted([2 * i for i in i_set]
                                      + [2 * j + 1 for j in j_set])))
    return new_fan(rays, cones, names)


def pseudo_del_pezzo(n: int) -> Fan:
    """Even-dimensional pseudo Del Pezzo variety: the Del Pezzo ray set
    without w_0, with the two matching cone families."""
    if n < 2 or n % 2:
        raise ValueError("pseudo Del Pezzo varieties have even dimension >= 2")
    r = n // 2
    v = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    v.insert(0, (-1,) * n)
    rays = [v[0]]
    names = ["v0"]
    for i in range(1, n + 1):
        rays.append(v[i])
        rays.append(tuple(-x for x in v[i]))
        names.extend([f"v{i}", f"w{i}"])
    v_idx = lambda i: 0 if i == 0 else 2 * i - 1
    w_idx = lambda i: 2 * i
    cones = []
    # cones through v_0: r-1 more v's and r w's, disjoint within 1..n
    for i_set in itertools.combinations(range(1, n + 1), r - 1):
        rest = [j for j in range(1, n + 1) if j not in i_set]
        for j_set in itertools.combinations(rest, r):
            cones.append(tuple(sorted([0] + [v_idx(i) for i in i_set]
                                      + [w_idx(j) for j in j_set])))
    # cones avoiding v_0: a partition of 1..n with at least r v's
    for size in range(r, n + 1):
        for i_set in itertools.combinations(range(1, n + 1), size):
            j_set = [j for j in range(1, n + 1) if j not in i_set]
            cones.append(tuple(sorted([v_idx(i) for i in i_set]
                                      + [w_idx(j) for j in j_set])))
    return new_fan(rays, cones, names)


def pseudo_symmetric(s: int, k_list: Sequence[int], l_list: Sequence[int]) -> Fan:
    """Product (P^1)^s x V^{2k_1} x ... x tilde-V^{2l_1} x ... with the factor
    blocks recorded for pullbacks."""
    if s < 0 or any(k < 1 for k in k_list) or any(l < 1 for l in l_list):
        raise ValueError("need s >= 0 and positive factor parameters")
    factors = [projective_space(1) for _ in range(s)]
    factors += [del_pezzo(2 * k) for k in k_list]
    factors += [pseudo_del_pezzo(2 * l) for l in l_list]
    if not factors:
        raise ValueError("empty product")
    return product(*factors)


# ---------------------------------------------------------------------------
# Rank-two bundles with three designated lines

# any three pairwise distinct lines give the same bundle; these are the
# fixed representatives
CANONICAL_LINES: tuple[Subspace, ...] = (
    span([(1, 0)], 2), span([(0, 1)], 2), span([(1, 1)], 2))


def _three_line_bundle(fan: Fan, designated: Sequence[int],
                       lines: Sequence[Subspace] | None) -> ReflexiveSheaf:
    if lines is None:
        lines = CANONICAL_LINES
    lines = tuple(lines)
    if len(lines) != 3 or any(l.dim != 1 or l.ambient_dim != 2 for l in lines):
        raise ValueError("need three lines in the rank-two fiber")
    if len({lines[0], lines[1], lines[2]}) != 3:
        raise ValueError("designated lines must be pairwise distinct")
    if len(set(designated)) != 3:
        raise ValueError("designated rays clash")
    full = full_subspace(2)
    filts: list[list[tuple[int, Subspace]]] = []
    for i in range(fan.n_rays):
        filts.append([(0, full)])
    for ray, line in zip(designated, lines):
        filts[ray] = [(-1, line), (0, full)]
    return reflexive_sheaf(fan, 2, filts)


def bott_bundle(k: int, c: Mapping[tuple[int, int], int], p: int, q: int,
                lines: Sequence[Subspace] | None = None) -> ReflexiveSheaf:
    """Rank-two bundle on the Bott tower with lines at level -1 on the rays
    v_p, v_{k+p} and v_q.  Locally free because no cone sees all three;
    indecomposable because the three lines are distinct."""
    fan = bott_tower(k, c)
    if not 1 <= p <= k:
        raise ValueError(f"p = {p} must pick one of the first {k} rays")
    if not 1 <= q <= 2 * k or q in (p, k + p):
        raise ValueError(f"q = {q} clashes with the v_{p}/v_{k + p} pair")
    return _three_line_bundle(fan, (p - 1, k + p - 1, q - 1), lines)


def del_pezzo_bundles(n: int, spec: tuple, *, pseudo: bool = False,
                      lines: Sequence[Subspace] | None = None) -> ReflexiveSheaf:
    """Rank-two bundle on V^n (or tilde-V^n) with lines on three designated
    rays.  `spec` is either ({a,b}, a) placing lines on v_a, v_b, w_a, or
    (a, {a,b}) placing them on v_a, w_a, w_b."""
    fan = pseudo_del_pezzo(n) if pseudo else del_pezzo(n)
    first, second = spec
    if isinstance(first, int):
        a, pair = first, frozenset(second)
        if a not in pair or len(pair) != 2:
            raise ValueError("spec pair must contain the repeated index")
        b = next(iter(pair - {a}))
        v_names, w_names = [f"v{a}"], [f"w{a}", f"w{b}"]
    else:
        pair, a = frozenset(first), second
        if a not in pair or len(pair) != 2:
            raise ValueError("spec pair must contain the repeated index")
        b = next(iter(pair - {a}))
        v_names, w_names = [f"v{a}", f"v{b}"], [f"w{a}"]
    designated = [fan.ray_named(nm) for nm in v_names + w_names]
    return _three_line_bundle(fan, designated, lines)


def pullback_along_projection(product_fan: Fan, factor_index: int,
                              sheaf: ReflexiveSheaf) -> ReflexiveSheaf:
    """Pull a sheaf on one factor back along the projection of a product fan:
    the factor's rays keep their filtrations, all other rays get the trivial
    one."""
    blocks = product_fan.factor_blocks
    if blocks is None:
        raise ValueError("fan does not record a product structure")
    if not 0 <= factor_index < len(blocks):
        raise ValueError(f"no factor {factor_index} in a {len(blocks)}-fold product")
    ray_start, ray_stop, coord_start, coord_stop = blocks[factor_index]
    factor = sheaf.fan
    if (factor.n_rays != ray_stop - ray_start
            or factor.dim != coord_stop - coord_start
            or any(product_fan.rays[ray_start + i][coord_start:coord_stop]
                   != factor.rays[i] for i in range(factor.n_rays))):
        raise ValueError("sheaf does not live on that factor")
    trivial = [(0, full_subspace(sheaf.rank))]
    filts = []
    for i in range(product_fan.n_rays):
        if ray_start <= i < ray_stop:
            filts.append(list(sheaf.filtrations[i - ray_start]))
        else:
            filts.append(trivial)
    return reflexive_sheaf(product_fan, sheaf.rank, filts)


# ---------------------------------------------------------------------------
# The labelled four-folds of Picard rank at most three


def _p2_bundle_over_p1p1(alpha: int, beta: int, gamma: int) -> Fan:
    """P(O + O(alpha,0) + O(beta,gamma)) over P^1 x P^1."""
    rays = [(-1, 0, alpha, beta), (1, 0, 0, 0),
            (0, -1, 0, gamma), (0, 1, 0, 0),
            (0, 0, -1, -1), (0, 0, 1, 0), (0, 0, 0, 1)]
    names = ["u0", "u1", "v0", "v1", "e0", "e1", "e2"]
    cones = []
    for i in range(3):
        fiber = [4 + x for x in range(3) if x != i]
        for j in range(2):
            for k in range(2):
                cones.append(tuple([j, 2 + k] + fiber))
    return new_fan(rays, cones, names)


def _p1_bundle_over_p1p2(alpha: int, beta: int) -> Fan:
    """P(O + O(alpha,beta)) over P^1 x P^2."""
    rays = [(-1, 0, 0, alpha), (1, 0, 0, 0),
            (0, -1, -1, beta), (0, 1, 0, 0), (0, 0, 1, 0),
            (0, 0, 0, -1), (0, 0, 0, 1)]
    names = ["w0", "w1", "z0", "z1", "z2", "e0", "e1"]
    cones = []
    for i in range(2):
        for j in range(3):
            zs = [2 + x for x in range(3) if x != j]
            for k in range(2):
                cones.append(tuple([i] + zs + [5 + k]))
    return new_fan(rays, cones, names)


def _p1_bundle_over_plane_bundle(a1: int, alpha: int, beta: int) -> Fan:
    """P(O + O(alpha,beta)) over P(O + O(a1)) over P^2; ep* are the rays of
    the inner fiber."""
    rays = [(-1, -1, a1, alpha), (1, 0, 0, 0), (0, 1, 0, 0),
            (0, 0, -1, beta), (0, 0, 1, 0),
            (0, 0, 0, 1), (0, 0, 0, -1)]
    names = ["v0", "v1", "v2", "ep0", "ep1", "e1", "e0"]
    cones = []
    for j in range(3):
        vs = [x for x in range(3) if x != j]
        for p in range(2):
            for q in range(2):
                cones.append(tuple(vs + [3 + p, 6 - q]))
    return new_fan(rays, cones, names)


def _p2_bundle_over_h1(alpha: int, beta: int) -> Fan:
    """P(O + O + O(alpha,beta)) over the first Hirzebruch surface."""
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (-1, 1, 0, alpha), (0, -1, 0, beta),
            (0, 0, -1, -1), (0, 0, 1, 0), (0, 0, 0, 1)]
    names = ["v1", "v2", "v3", "v4", "e0", "e1", "e2"]
    base_walls = [(0, 1), (1, 2), (2, 3), (3, 0)]
    cones = []
    for j in range(3):
        fiber = [4 + x for x in range(3) if x != j]
        for wall in base_walls:
            cones.append(tuple(list(wall) + fiber))
    return new_fan(rays, cones, names)


def _p1_bundle_over_b5_threefold(alpha: int, beta: int) -> Fan:
    """P(O + O(alpha,beta)) over P(O + O + O(1)) over P^1."""
    rays = [(-1, 0, 1, alpha), (1, 0, 0, 0),
            (0, 1, 0, 0), (0, 0, 1, 0), (0, -1, -1, beta),
            (0, 0, 0, 1), (0, 0, 0, -1)]
    names = ["v0", "v1", "ep1", "ep2", "ep0", "e1", "e0"]
    inner = {0: 4, 1: 2, 2: 3}  # ep_j -> ray index
    cones = []
    for i in range(2):
        for j in range(3):
            eps = [inner[x] for x in range(3) if x != j]
            for k in range(2):
                cones.append(tuple([i] + eps + [6 - k]))
    return new_fan(rays, cones, names)


def _g1_fan() -> Fan:
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (1, -1, -1, 0), (0, 0, 1, 0),
            (0, 0, 0, 1), (2, 0, -1, -1), (-1, 0, 0, 0)]
    names = [f"v{i}" for i in range(1, 8)]
    forbidden = [{0, 6}, {1, 2, 3}, {3, 4, 5}, {4, 5, 6}, {0, 1, 2}]
    cones = [c for c in itertools.combinations(range(7), 4)
             if not any(f <= set(c) for f in forbidden)]
    return new_fan(rays, cones, names)


def _blown_up_kleinschmidt(s: int, a_list: Sequence[int],
                           tau_names: Sequence[str]) -> Fan:
    base = kleinschmidt(s, a_list)
    return star_subdivide(base, [base.ray_named(nm) for nm in tau_names])


_TABLE1: tuple[tuple[str, str], ...] = (
    ("P4", STABLE),
    ("B1", UNSTABLE), ("B2", UNSTABLE), ("B3", UNSTABLE),
    ("B4", SEMISTABLE), ("B5", SEMISTABLE),
    ("C1", UNSTABLE), ("C2", UNSTABLE), ("C3", UNSTABLE), ("C4", SEMISTABLE),
    ("D1", UNSTABLE), ("D2", UNSTABLE), ("D3", UNSTABLE), ("D4", UNSTABLE),
    ("D5", UNSTABLE), ("D6", UNSTABLE), ("D7", UNSTABLE), ("D8", UNSTABLE),
    ("D9", UNSTABLE), ("D10", UNSTABLE), ("D11", UNSTABLE), ("D12", UNSTABLE),
    ("D13", SEMISTABLE), ("D14", SEMISTABLE), ("D15", SEMISTABLE),
    ("D16", UNSTABLE), ("D17", STABLE), ("D18", UNSTABLE), ("D19", STABLE),
    ("E1", UNSTABLE), ("E2", UNSTABLE), ("E3", STABLE),
    ("G1", UNSTABLE), ("G2", UNSTABLE), ("G3", UNSTABLE),
    ("G4", STABLE), ("G5", STABLE), ("G6", STABLE),
)

_VERDICTS = dict(_TABLE1)


def _labelled_fan(label: str) -> Fan:
    if label == "P4":
        return projective_space(4)
    if label == "B1":
        return kleinschmidt(3, [3])
    if label == "B2":
        return kleinschmidt(3, [2])
    if label == "B3":
        return kleinschmidt(3, [1])
    if label == "B4":
        return product(projective_space(1), projective_space(3))
    if label == "B5":
        return kleinschmidt(1, [0, 0, 1])
    if label == "C1":
        return kleinschmidt(2, [0, 2])
    if label == "C2":
        return kleinschmidt(2, [0, 1])
    if label == "C3":
        return kleinschmidt(2, [1, 1])
    if label == "C4":
        return product(projective_space(2), projective_space(2))
    if label == "D1":
        return _p1_bundle_over_p1p2(1, 2)
    if label == "D2":
        return _p1_bundle_over_plane_bundle(2, 0, 1)
    if label == "D3":
        return _p1_bundle_over_plane_bundle(1, 1, 1)
    if label == "D4":
        return _p1_bundle_over_b5_threefold(0, 2)
    if label == "D5":
        return _p1_bundle_over_plane_bundle(2, 0, 0)
    if label == "D6":
        return _p1_bundle_over_p1p2(1, 1)
    if label == "D7":
        return _p2_bundle_over_p1p1(0, 1, 1)
    if label == "D8":
        return _p1_bundle_over_plane_bundle(1, 0, 1)
    if label == "D9":
        return _p1_bundle_over_plane_bundle(1, 1, 0)
    if label == "D10":
        return _p1_bundle_over_b5_threefold(0, 1)
    if label == "D11":
        return _p2_bundle_over_h1(0, 1)
    if label == "D12":
        return _p1_bundle_over_plane_bundle(1, 0, 0)
    if label == "D13":
        return product(projective_space(1), projective_space(1),
                       projective_space(2))
    if label == "D14":
        return product(projective_space(1), kleinschmidt(1, [0, 1]))
    if label == "D15":
        return product(hirzebruch(1), projective_space(2))
    if label == "D16":
        return _p1_bundle_over_plane_bundle(1, -1, 1)
    if label == "D17":
        return _p2_bundle_over_p1p1(1, 0, 1)
    if label == "D18":
        return _p1_bundle_over_p1p2(-1, 2)
    if label == "D19":
        return _p1_bundle_over_p1p2(-1, 1)
    if label in ("E1", "E2", "E3"):
        a1 = {"E1": 2, "E2": 1, "E3": 0}[label]
        return _blown_up_kleinschmidt(3, [a1], ["v0", "e1"])
    if label == "G1":
        return _g1_fan()
    if label == "G2":
        return _blown_up_kleinschmidt(2, [0, 1], ["v0", "e2"])
    if label == "G3":
        return _blown_up_kleinschmidt(2, [1, 1], ["v1", "v2", "e0"])
    if label == "G4":
        return _blown_up_kleinschmidt(2, [0, 1], ["v0", "e0"])
    if label == "G5":
        return _blown_up_kleinschmidt(2, [1, 1], ["v0", "e0"])
    if label == "G6":
        return _blown_up_kleinschmidt(2, [0, 0], ["v0", "e0"])
    raise KeyError(f"unknown catalog label {label!r}")


def catalog_labels() -> tuple[str, ...]:
    """The labelled four-folds, in report order."""
    return tuple(label for label, _ in _TABLE1)


def batyrev_picard3(label: str) -> CatalogEntry:
    """The Picard-rank-three entries (D1..D19, E1..E3, G1..G6)."""
    if not re.fullmatch(r"[DEG]\d+", label) or label not in _VERDICTS:
        raise KeyError(f"unknown Picard-rank-three label {label!r}")
    return catalog_entry(label)


_FAMILY_RE = re.compile(r"(V|tildeV)(\d+)|bott\((\d+);([0-9,\s]*)\)")


@lru_cache(maxsize=None)
def catalog_entry(label: str) -> CatalogEntry:
    """Build a labelled entry: a Table-1 four-fold, V{n}/tildeV{n}, or
    bott(k;c12,c13,...,c23,...).  Family entries carry no expected verdict."""
    if label in _VERDICTS:
        fan = _labelled_fan(label)
        return CatalogEntry(label, fan, anticanonical(fan), _VERDICTS[label])
    m = _FAMILY_RE.fullmatch(label)
    if m is None:
        raise KeyError(f"unknown catalog label {label!r}")
    if m.group(1):
        n = int(m.group(2))
        if n < 2 or n % 2:
            raise KeyError(f"unknown catalog label {label!r}")
        fan = del_pezzo(n) if m.group(1) == "V" else pseudo_del_pezzo(n)
    else:
        k = int(m.group(3))
        values = [int(x) for x in m.group(4).split(",") if x.strip()]
        keys = [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
        if len(values) != len(keys):
            raise KeyError(
                f"bott({k};...) needs {len(keys)} numbers, got {len(values)}")
        fan = bott_tower(k, dict(zip(keys, values)))
    pol = anticanonical(fan) if is_fano(fan) else None
    return CatalogEntry(label, fan, pol, None)
