"""Classical Kazhdan-Lusztig polynomials of a finite Weyl group.

Self-contained implementation used as an independent cross-check for the
complexified-group blocks: elements are integer matrices acting on the
character lattice, lengths count inversions, the Bruhat order uses the
standard descent recursion, and the polynomials follow the usual recursion
with the mu-correction terms.  Nothing here touches the block machinery.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .rootdata import RootDatum

__all__ = ["WeylGroup", "kl_polynomial", "kl_matrix"]

Mat = Tuple[Tuple[int, ...], ...]
Poly = Dict[int, int]  # exponent -> coefficient, in the variable q


def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _poly_scale(a: Poly, coeff: int, shift: int) -> Poly:
    return {k + shift: coeff * v for k, v in a.items()} if coeff else {}


class WeylGroup:
    """Finite Weyl group of a root datum, with Bruhat order and lengths."""

    def __init__(self, rd: RootDatum):
        self.rd = rd
        self.simples: List[Mat] = [
            tuple(tuple(row) for row in rd.reflection_matrix(i))
            for i in range(rd.n_simple)
        ]
        n = rd.rank
        self.identity: Mat = tuple(
            tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
        )
        self.elements: List[Mat] = self._generate()
        self.length: Dict[Mat, int] = {w: self._length(w) for w in self.elements}
        self._bruhat_cache: Dict[Tuple[Mat, Mat], bool] = {}
        self._kl_cache: Dict[Tuple[Mat, Mat], Poly] = {}

    def _mul(self, a: Mat, b: Mat) -> Mat:
        n = len(a)
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )

    def _generate(self) -> List[Mat]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            new = []
            for w in frontier:
                for s in self.simples:
                    p = self._mul(s, w)
                    if p not in seen:
                        seen.add(p)
                        new.append(p)
            frontier = new
            if len(seen) > 1_000_000:
                raise ValueError("Weyl group generation exceeded bound")
        return sorted(seen)

    def _apply(self, w: Mat, v: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(sum(w[i][j] * v[j] for j in range(len(v))) for i in range(len(w)))

    def _length(self, w: Mat) -> int:
        pos = [r for r, _ in self.rd.positive_roots()]
        pos_set = set(pos)
        return sum(1 for r in pos if self._apply(w, r) not in pos_set)

    def left_mul_simple(self, i: int, w: Mat) -> Mat:
        return self._mul(self.simples[i], w)

    def left_descents(self, w: Mat) -> List[int]:
        lw = self.length[w]
        return [
            i
            for i in range(len(self.simples))
            if self.length[self.left_mul_simple(i, w)] < lw
        ]

    def bruhat_leq(self, x: Mat, w: Mat) -> bool:
        """Standard recursion: strip a left descent of w and branch on x."""
        if x == w:
            return True
        if self.length[x] >= self.length[w]:
            return False
        key = (x, w)
        if key in self._bruhat_cache:
            return self._bruhat_cache[key]
        descents = self.left_descents(w)
        i = descents[0]
        sw = self.left_mul_simple(i, w)
        sx = self.left_mul_simple(i, x)
        if self.length[sx] < self.length[x]:
            result = self.bruhat_leq(sx, sw)
        else:
            result = self.bruhat_leq(x, sw)
        self._bruhat_cache[key] = result
        return result


def kl_polynomial(W: WeylGroup, x: Mat, w: Mat) -> Poly:
    """The polynomial P(x, w) in the variable q, by the descent recursion."""
    if not W.bruhat_leq(x, w):
        return {}
    if x == w:
        return {0: 1}
    key = (x, w)
    if key in W._kl_cache:
        return W._kl_cache[key]
    i = W.left_descents(w)[0]
    v = W.left_mul_simple(i, w)  # sw < w
    sx = W.left_mul_simple(i, x)
    if W.length[sx] < W.length[x]:
        acc = _poly_add(kl_polynomial(W, sx, v),
                        _poly_scale(kl_polynomial(W, x, v), 1, 1))
    else:
        acc = _poly_add(_poly_scale(kl_polynomial(W, sx, v), 1, 1),
                        kl_polynomial(W, x, v))
    # mu-correction over z with sz < z
    for z in W.elements:
        if not (W.bruhat_leq(x, z) and W.bruhat_leq(z, v)):
            continue
        if W.length[W.left_mul_simple(i, z)] >= W.length[z]:
            continue
        pzv = kl_polynomial(W, z, v)
        gap = W.length[v] - W.length[z]
        if gap % 2 == 0:
            continue
        mu = pzv.get((gap - 1) // 2, 0)
        if not mu:
            continue
        shift = (W.length[w] - W.length[z]) // 2
        if 2 * shift != W.length[w] - W.length[z]:
            continue
        acc = _poly_add(acc, _poly_scale(kl_polynomial(W, x, z), -mu, shift))
    W._kl_cache[key] = acc
    return acc


def kl_matrix(rd: RootDatum) -> Tuple[WeylGroup, Dict[Tuple[Mat, Mat], Poly]]:
    """All P(x, w) for the Weyl group of the datum."""
    W = WeylGroup(rd)
    out = {}
    for w in W.elements:
        for x in W.elements:
            p = kl_polynomial(W, x, w)
            if p:
                out[(x, w)] = p
    return W, out
