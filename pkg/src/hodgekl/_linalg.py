"""Exact linear algebra helpers: rational Gaussian elimination, GF(2) row
reduction, and integer lattice membership via Smith-style elimination.

Everything here works on small dense matrices (rank at most a few dozen) with
Fraction or int entries; no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple


class LinearSolveError(Exception):
    """Raised when a linear system is inconsistent or not uniquely solvable."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # "inconsistent" or "underdetermined"


def solve_unique(
    rows: Sequence[Dict[int, Fraction]],
    rhs: Sequence[Fraction],
    n_unknowns: int,
) -> List[Fraction]:
    """Solve a sparse linear system requiring a unique solution.

    rows[i] maps unknown index -> coefficient of equation i.  Raises
    LinearSolveError("inconsistent") if no solution exists and
    LinearSolveError("underdetermined") if the solution is not unique.
    """
    eqs = [(dict(r), Fraction(b)) for r, b in zip(rows, rhs)]
    pivot_of: Dict[int, Tuple[Dict[int, Fraction], Fraction]] = {}
    for row, b in eqs:
        row = dict(row)
        # reduce against existing pivots
        for col in sorted(set(row) & set(pivot_of)):
            coeff = row.get(col)
            if not coeff:
                continue
            prow, pb = pivot_of[col]
            for k, v in prow.items():
                nv = row.get(k, Fraction(0)) - coeff * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            b = b - coeff * pb
        row = {k: v for k, v in row.items() if v}
        if not row:
            if b != 0:
                raise LinearSolveError("inconsistent", "inconsistent linear system")
            continue
        col = min(row)
        inv = Fraction(1) / row[col]
        row = {k: v * inv for k, v in row.items()}
        b = b * inv
        # normalize previous pivots against the new one
        for pc, (prow, pb) in list(pivot_of.items()):
            c = prow.get(col)
            if c:
                for k, v in row.items():
                    nv = prow.get(k, Fraction(0)) - c * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
                pivot_of[pc] = (prow, pb - c * b)
        pivot_of[col] = (row, b)
    if len(pivot_of) < n_unknowns:
        raise LinearSolveError(
            "underdetermined",
            f"system has {n_unknowns - len(pivot_of)} free unknowns",
        )
    out = [Fraction(0)] * n_unknowns
    for col, (row, b) in pivot_of.items():
        # after full reduction each pivot row is a singleton
        extra = {k: v for k, v in row.items() if k != col}
        if extra:
            raise LinearSolveError("underdetermined", "coupled free unknowns remain")
        out[col] = b
    return out


def gf2_row_reduce(vectors: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Reduced row-echelon basis of the GF(2) span of the input bit vectors."""
    basis: List[List[int]] = []
    for vec in vectors:
        v = [b & 1 for b in vec]
        for row in basis:
            pivot = next(i for i, b in enumerate(row) if b)
            if v[pivot]:
                v = [a ^ b for a, b in zip(v, row)]
        if any(v):
            basis.append(v)
    basis.sort(key=lambda row: next(i for i, b in enumerate(row) if b))
    # back-eliminate to reduced form
    for i, row in enumerate(basis):
        pivot = next(k for k, b in enumerate(row) if b)
        for j, other in enumerate(basis):
            if i != j and other[pivot]:
                basis[j] = [a ^ b for a, b in zip(other, row)]
    basis.sort(key=lambda row: next(i for i, b in enumerate(row) if b))
    return [tuple(row) for row in basis]


def gf2_reduce_vector(vec: Sequence[int], basis: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Canonical representative of vec modulo the GF(2) span of basis rows."""
    v = [b & 1 for b in vec]
    for row in basis:
        pivot = next(i for i, b in enumerate(row) if b)
        if v[pivot]:
            v = [a ^ b for a, b in zip(v, row)]
    return tuple(v)


def gf2_kernel(matrix: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Basis of the right kernel of a GF(2) matrix (rows x cols)."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [list(r) for r in matrix]
    pivots: Dict[int, List[int]] = {}
    for r in rows:
        v = [b & 1 for b in r]
        for col, prow in pivots.items():
            if v[col]:
                v = [a ^ b for a, b in zip(v, prow)]
        if any(v):
            pivots[next(i for i, b in enumerate(v) if b)] = v
    free_cols = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for fc in free_cols:
        v = [0] * ncols
        v[fc] = 1
        # back-substitute pivot coordinates
        for col in sorted(pivots, reverse=True):
            prow = pivots[col]
            s = sum(prow[k] * v[k] for k in range(col + 1, ncols)) & 1
            v[col] = s
        kernel.append(tuple(v))
    return kernel


def gf2_solve(matrix: Sequence[Sequence[int]], rhs: Sequence[int]):
    """One solution of M x = rhs over GF(2), or None if inconsistent."""
    if not matrix:
        return None if any(b & 1 for b in rhs) else ()
    ncols = len(matrix[0])
    aug = [[b & 1 for b in row] + [r & 1] for row, r in zip(matrix, rhs)]
    pivots: Dict[int, List[int]] = {}
    for row in aug:
        v = list(row)
        for col, prow in pivots.items():
            if v[col]:
                v = [a ^ b for a, b in zip(v, prow)]
        nz = [i for i in range(ncols) if v[i]]
        if not nz:
            if v[ncols]:
                return None
            continue
        pivots[nz[0]] = v
    x = [0] * ncols
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        s = prow[ncols] ^ (sum(prow[k] * x[k] for k in range(col + 1, ncols)) & 1)
        x[col] = s
    return tuple(x)


def integer_kernel(matrix: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Basis of the integer kernel {v : M v = 0} of an integer matrix.

    Computed from the rational kernel and cleared to primitive integer
    vectors; valid because the kernel lattice of an integer matrix is the
    saturation of its rational kernel.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    rows = [[Fraction(x) for x in r] for r in matrix]
    pivots: Dict[int, List[Fraction]] = {}
    for r in rows:
        v = list(r)
        for col, prow in pivots.items():
            if v[col]:
                f = v[col]
                v = [a - f * b for a, b in zip(v, prow)]
        nz = [i for i in range(ncols) if v[i]]
        if nz:
            col = nz[0]
            inv = Fraction(1) / v[col]
            pivots[col] = [a * inv for a in v]
    free_cols = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for col in sorted(pivots, reverse=True):
            prow = pivots[col]
            v[col] = -sum(prow[k] * v[k] for k in range(col + 1, ncols))
        denom = 1
        for x in v:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
        ints = [int(x * denom) for x in v]
        g = 0
        for x in ints:
            g = _gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        kernel.append(tuple(ints))
    return kernel


def in_integer_image(matrix: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """Whether target lies in the integer column span of an integer matrix.

    Solved by Hermite-style column elimination on small matrices.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    cols: List[List[int]] = [[matrix[r][c] for r in range(nrows)] for c in range(ncols)]
    t = [int(x) for x in target]
    for r in range(nrows):
        live = [c for c in cols if c[r] != 0]
        if not live:
            continue
        # gcd-reduce the live columns at row r
        while True:
            live = sorted((c for c in cols if c[r] != 0), key=lambda c: abs(c[r]))
            if len(live) <= 1:
                break
            small = live[0]
            for other in live[1:]:
                q = other[r] // small[r]
                for i in range(nrows):
                    other[i] -= q * small[i]
            if all(c[r] == 0 for c in cols if c is not small):
                break
        live = [c for c in cols if c[r] != 0]
        if not live:
            if t[r] != 0:
                return False
            continue
        piv = live[0]
        if t[r] % piv[r] != 0:
            return False
        q = t[r] // piv[r]
        for i in range(nrows):
            t[i] -= q * piv[i]
        cols = [c for c in cols if c is not piv]
    return all(x == 0 for x in t)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1
