"""Exact rational linear algebra over Q^n.

Everything here works with `fractions.Fraction`; no floats anywhere.  The
central type is `Subspace`, stored in reduced row echelon form so that two
subspaces are equal (and hash equal) exactly when they agree as sets of
vectors.  Lattice vectors are plain tuples of ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]


def _as_fractions(v: Sequence) -> Vector:
    return tuple(Fraction(x) for x in v)


def rref(rows: Iterable[Sequence]) -> list[list[Fraction]]:
    """Reduced row echelon form with unit pivots, zero rows dropped.

    Rows come back sorted by pivot column, which makes the output canonical
    for the row space.
    """
    mat = [list(_as_fractions(r)) for r in rows]
    if not mat:
        return []
    ncols = len(mat[0])
    pivot_rows: list[list[Fraction]] = []
    pivot_cols: list[int] = []
    for col in range(ncols):
        src = None
        for row in mat:
            if row[col] != 0 and all(row[c] == 0 for c in range(col)):
                src = row
                break
        if src is None:
            continue
        mat.remove(src)
        inv = src[col]
        src = [x / inv for x in src]
        for other in pivot_rows + mat:
            f = other[col]
            if f != 0:
                for c in range(ncols):
                    other[c] -= f * src[c]
        pivot_rows.append(src)
        pivot_cols.append(col)
    order = sorted(range(len(pivot_rows)), key=lambda i: pivot_cols[i])
    return [pivot_rows[i] for i in order]


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^ambient_dim with a canonical RREF basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def contains(self, vector: Sequence) -> bool:
        v = list(_as_fractions(vector))
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        for row in self.basis:
            piv = next(c for c in range(self.ambient_dim) if row[c] != 0)
            f = v[piv]
            if f != 0:
                for c in range(self.ambient_dim):
                    v[c] -= f * row[c]
        return all(x == 0 for x in v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimensions differ")
        return span(list(self.basis) + list(other.basis), self.ambient_dim)

    def perp(self) -> "Subspace":
        """Orthogonal complement w.r.t. the standard dot product."""
        n = self.ambient_dim
        rows = rref(self.basis)
        pivots = [next(c for c in range(n) if row[c] != 0) for row in rows]
        free = [c for c in range(n) if c not in pivots]
        gens = []
        for fc in free:
            v = [Fraction(0)] * n
            v[fc] = Fraction(1)
            for row, pc in zip(rows, pivots):
                v[pc] = -row[fc]
            gens.append(v)
        return span(gens, n)


def span(vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
    """Subspace spanned by `vectors` inside Q^ambient_dim.

    An empty collection gives the zero subspace; ambient dimension is always
    explicit so that zero subspaces of different spaces stay distinct.
    """
    vecs = [_as_fractions(v) for v in vectors]
    for v in vecs:
        if len(v) != ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
    basis = tuple(tuple(row) for row in rref(vecs))
    return Subspace(ambient_dim, basis)


def zero_subspace(ambient_dim: int) -> Subspace:
    return span([], ambient_dim)


def full_subspace(ambient_dim: int) -> Subspace:
    eye = [[Fraction(int(i == j)) for j in range(ambient_dim)] for i in range(ambient_dim)]
    return span(eye, ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B, computed as (A^perp + B^perp)^perp."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return (a.perp() + b.perp()).perp()


def quotient_dim(a: Subspace, b: Subspace) -> int:
    """dim(B/A) for A ⊆ B; raises if A is not contained in B."""
    if not b.contains_subspace(a):
        raise ValueError("first subspace is not contained in the second")
    return b.dim - a.dim


def pairing(m: Sequence, v: Sequence) -> Fraction:
    """Standard pairing <m, v> = sum m_i v_i."""
    if len(m) != len(v):
        raise ValueError("length mismatch in pairing")
    return sum((Fraction(x) * Fraction(y) for x, y in zip(m, v)), Fraction(0))


def is_primitive(vector: Sequence[int]) -> bool:
    """True for an integer vector whose coordinates have gcd 1."""
    g = 0
    for x in vector:
        if x != int(x):
            return False
        g = gcd(g, int(x))
    return g == 1


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination (exact)."""
    n = len(matrix)
    mat = [list(_as_fractions(row)) for row in matrix]
    if any(len(row) != n for row in mat):
        raise ValueError("matrix is not square")
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            result = -result
        result *= mat[col][col]
        inv = mat[col][col]
        for r in range(col + 1, n):
            f = mat[r][col] / inv
            if f != 0:
                for c in range(col, n):
                    mat[r][c] -= f * mat[col][c]
    return result


def is_lattice_basis(vectors: Sequence[Sequence[int]]) -> bool:
    """True when the vectors form a Z-basis of Z^n (square, det = ±1)."""
    n = len(vectors)
    if n == 0 or any(len(v) != n for v in vectors):
        return False
    return abs(det(vectors)) == 1


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve M x = rhs exactly; None if inconsistent or underdetermined.

    `matrix` is given row-wise and may be rectangular; a unique solution is
    required.
    """
    if len(matrix) != len(rhs):
        raise ValueError("row/rhs count mismatch")
    rows = [list(_as_fractions(r)) + [Fraction(x)] for r, x in zip(matrix, _as_fractions(rhs))]
    ncols = len(rows[0]) - 1
    red = rref(rows)
    sol: list[Fraction | None] = [None] * ncols
    for row in red:
        piv = next(c for c in range(ncols + 1) if row[c] != 0)
        if piv == ncols:
            return None  # row (0 ... 0 | 1): inconsistent
        if any(row[c] != 0 for c in range(piv + 1, ncols)):
            return None  # free variable: not unique
        sol[piv] = row[ncols]
    if any(s is None for s in sol):
        return None
    return [s for s in sol if s is not None]


def matrix_inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse of a square matrix; raises on singular input."""
    n = len(matrix)
    aug = [list(_as_fractions(row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    red = rref(aug)
    if len(red) != n or any(red[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]
