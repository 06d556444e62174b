"""Dickson matrices of linearized polynomials.

The Dickson matrix of f(x) = sum a_i x^(q^i) has (i,j)-entry a_{(j-i) mod s}
raised to the q^i, where s is the matrix size.  Principal minors indexed by
subsets of Z_s form the minor fingerprint; equality of fingerprints is the
point-set equality criterion for graphs of linearized polynomials in rank 2.

A matrix may have size s < n provided s | n and every coefficient lies in
the intermediate field F_{q^s}; such smaller matrices drive the recursive
step of pair classification entirely inside the big field.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from . import linalg
from .errors import (
    AmbientMismatchError,
    EmptyIndexSetError,
    TooLargeError,
    TooSmallError,
    ZeroPolynomialError,
)
from .gf import FieldTower
from .linpoly import LinearizedPolynomial, _unwrap

FINGERPRINT_BOUND = 12

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash; deterministic across processes and runs."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _as_indices(size: int, index_set: Union[int, Iterable[int]]) -> Tuple[int, ...]:
    """Normalize an index set (bitmask or iterable) to an ascending tuple."""
    if isinstance(index_set, int):
        if not 0 <= index_set < (1 << size):
            raise ValueError(f"mask {index_set} out of range for size {size}")
        return tuple(i for i in range(size) if index_set >> i & 1)
    idx = sorted(set(int(i) for i in index_set))
    if idx and not 0 <= idx[0] <= idx[-1] < size:
        raise ValueError(f"indices {idx} out of range for size {size}")
    return tuple(idx)


class DicksonMatrix:
    """Immutable s x s Dickson matrix over a FieldTower (s | n)."""

    __slots__ = ("tower", "coeffs", "size", "_rows")

    def __init__(self, tower: FieldTower, coeffs: Iterable):
        vals = tuple(_unwrap(tower, c) for c in coeffs)
        size = len(vals)
        if size < 1:
            raise ValueError("need at least one coefficient")
        if tower.n % size != 0:
            raise ValueError(f"matrix size {size} must divide n = {tower.n}")
        if size < tower.n:
            for v in vals:
                if not tower.in_subfield(v, size):
                    raise ValueError(
                        f"size-{size} matrix needs coefficients in F_(q^{size})")
        object.__setattr__(self, "tower", tower)
        object.__setattr__(self, "coeffs", vals)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "_rows", None)

    def __setattr__(self, *a):
        raise AttributeError("DicksonMatrix is immutable")

    @classmethod
    def from_poly(cls, f: LinearizedPolynomial) -> "DicksonMatrix":
        return cls(f.tower, f.coeffs)

    def to_poly(self) -> LinearizedPolynomial:
        if self.size != self.tower.n:
            raise ValueError("only a full-size matrix converts to a polynomial")
        return LinearizedPolynomial(self.tower, self.coeffs)

    # -- entries ---------------------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        s = self.size
        return self.tower.frobenius(self.coeffs[(j - i) % s], i)

    def rows(self) -> List[List[int]]:
        if self._rows is None:
            t, s, cf = self.tower, self.size, self.coeffs
            frob = t.frobenius
            rows = [[frob(cf[(j - i) % s], i) for j in range(s)] for i in range(s)]
            object.__setattr__(self, "_rows", rows)
        return self._rows

    def submatrix(self, row_set: Union[int, Iterable[int]],
                  col_set: Union[int, Iterable[int]]) -> List[List[int]]:
        ri = _as_indices(self.size, row_set)
        ci = _as_indices(self.size, col_set)
        if not ri or not ci:
            raise EmptyIndexSetError("row and column index sets must be non-empty")
        rows = self.rows()
        return [[rows[i][j] for j in ci] for i in ri]

    # -- minors and fingerprint ---------------------------------------------------

    def minor(self, index_set: Union[int, Iterable[int]]) -> int:
        """det A[I|I] (packed); I must be non-empty."""
        sub = self.submatrix(index_set, index_set)
        return linalg.det(self.tower, sub)

    def determinant(self) -> int:
        return linalg.det(self.tower, self.rows())

    def fingerprint(self, bound: int = FINGERPRINT_BOUND) -> Tuple[int, ...]:
        """All 2^s principal minors, indexed by subset bitmask ascending;
        the empty-set entry is fixed to 1."""
        s = self.size
        if s > bound:
            raise TooLargeError(
                f"fingerprint needs 2^{s} minors; raise the bound to allow")
        t = self.tower
        rows = self.rows()
        det = linalg.det
        out = [1] * (1 << s)
        for mask in range(1, 1 << s):
            idx = [i for i in range(s) if mask >> i & 1]
            sub = [[rows[i][j] for j in idx] for i in idx]
            out[mask] = det(t, sub)
        return tuple(out)

    def fingerprint_bytes(self, bound: int = FINGERPRINT_BOUND) -> bytes:
        return fingerprint_to_bytes(self.tower, self.fingerprint(bound))

    def digest(self, bound: int = FINGERPRINT_BOUND) -> int:
        """64-bit mixing digest of the serialized fingerprint (collisions
        must be resolved by comparing full fingerprints)."""
        return fnv1a64(self.fingerprint_bytes(bound))

    # -- characteristic function ---------------------------------------------------

    def _shifted_rows(self, lam0: int) -> List[List[int]]:
        t = self.tower
        rows = [list(r) for r in self.rows()]
        for i in range(self.size):
            rows[i][i] = t.sub(rows[i][i], t.frobenius(lam0, i))
        return rows

    def char_value(self, lam0) -> int:
        """det(A - diag(lam0, lam0^q, ..., lam0^(q^(s-1))))."""
        lv = _unwrap(self.tower, lam0)
        return linalg.det(self.tower, self._shifted_rows(lv))

    def rank_leading(self) -> int:
        """max k with det of the leading k x k principal submatrix nonzero
        (0 when every leading minor vanishes); equals the rank of the
        induced map for genuine Dickson matrices."""
        t = self.tower
        rows = self.rows()
        best = 0
        for k in range(1, self.size + 1):
            sub = [r[:k] for r in rows[:k]]
            if linalg.det(t, sub) != 0:
                best = k
        return best

    def root_multiplicity(self, a) -> int:
        """Multiplicity of a as a root of the characteristic function:
        1 + q + ... + q^(w-1) with w = s - rank_leading(A - diag(a, ...))."""
        av = _unwrap(self.tower, a)
        shifted = DicksonMatrix(
            self.tower,
            (self.tower.sub(self.coeffs[0], av),) + self.coeffs[1:])
        w = self.size - shifted.rank_leading()
        q = self.tower.q
        return (q ** w - 1) // (q - 1)

    # -- structure -------------------------------------------------------------------

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.coeffs) if a)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_reducible(self) -> Optional[int]:
        """Largest d > 1 such that the coefficient support lies in dZ_s
        (equivalently: the partition {dZ_s, rest} has zero off-blocks);
        none when that gcd is 1."""
        if self.is_zero():
            raise ZeroPolynomialError("reducibility needs a nonzero matrix")
        g = self.size
        for i in self.support():
            if i >= 1:
                g = math.gcd(g, i)
        return g if g > 1 else None

    def loewy_partition(self) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """First partition (alpha, beta) of Z_s, among the canonical
        candidates alpha = dZ_s (divisors ascending) then alpha = {0, i},
        whose two off-diagonal blocks both have rank exactly 1."""
        s = self.size
        if s < 4:
            raise TooSmallError("partitions with both sides of size >= 2 need s >= 4")
        t = self.tower
        rows = self.rows()
        candidates: List[Tuple[int, ...]] = []
        for d in range(2, s):
            if s % d == 0 and s // d >= 2 and s - s // d >= 2:
                candidates.append(tuple(range(0, s, d)))
        for i in range(1, s):
            candidates.append((0, i))
        for alpha in candidates:
            aset = set(alpha)
            beta = tuple(j for j in range(s) if j not in aset)
            block_ab = [[rows[i][j] for j in beta] for i in alpha]
            block_ba = [[rows[i][j] for j in alpha] for i in beta]
            if linalg.rank(t, block_ab) == 1 and linalg.rank(t, block_ba) == 1:
                return (alpha, beta)
        return None

    def transpose(self) -> "DicksonMatrix":
        """The transpose, which is again a Dickson matrix (of the adjoint)."""
        t, s = self.tower, self.size
        out = [t.frobenius(self.coeffs[(s - k) % s], k) for k in range(s)]
        return DicksonMatrix(t, out)

    # -- diagonal similarity -----------------------------------------------------------

    def diag_similar(self, other: "DicksonMatrix") -> Optional[int]:
        """Smallest lambda in F_(q^s)^* (packed order) with
        other = D^-1 * self * D for D = diag(lambda, lambda^q, ...), i.e.
        b_i = a_i * lambda^(q^i - 1) for every i; none if no such lambda."""
        t = self.tower
        if not isinstance(other, DicksonMatrix) or other.tower != t:
            raise AmbientMismatchError("matrices from different towers")
        if other.size != self.size:
            raise AmbientMismatchError("matrices of different size")
        a, b = self.coeffs, other.coeffs
        s = self.size
        if self.support() != other.support():
            return None
        pivots = [i for i in self.support() if i >= 1]
        if not pivots:
            # support empty or {0}: the relation forces b_0 = a_0, any lambda;
            # report the canonical lambda = 1
            return 1 if a[0] == b[0] else None
        i = pivots[0]
        target = t.div(b[i], a[i])
        if not t.in_subfield(target, s):
            return None
        candidates = self._root_candidates(i, target)
        verified = [lam for lam in candidates if self._verify_lambda(other, lam)]
        return min(verified) if verified else None

    def _verify_lambda(self, other: "DicksonMatrix", lam: int) -> bool:
        t = self.tower
        for k, (ak, bk) in enumerate(zip(self.coeffs, other.coeffs)):
            factor = t.div(t.frobenius(lam, k), lam)
            if t.mul(ak, factor) != bk:
                return False
        return True

    def _root_candidates(self, i: int, target: int) -> List[int]:
        """All lambda in F_(q^s)^* with lambda^(q^i - 1) = target."""
        t, s = self.tower, self.size
        group = t.q ** s - 1
        if t.has_tables:
            step = t._onum // group  # embeds Z_(q^s-1) into the big cyclic group
            tlog = t._log[target]
            if tlog % step:
                return []
            rhs = tlog // step
            coef = (t.q ** i - 1) % group
            g = math.gcd(coef, group)
            if rhs % g:
                return []
            red = group // g
            t0 = (rhs // g) * pow(coef // g, -1, red) % red if red > 1 else 0
            return [t._exp[((t0 + k * red) % group) * step] for k in range(g)]
        if t.order > 2 ** 20:
            raise TooLargeError("diagonal-similarity search needs log tables")
        return [lam for lam in range(1, t.order)
                if t.in_subfield(lam, s) and t.pow(lam, t.q ** i - 1) == target]

    def diag_similar_scan(self, other: "DicksonMatrix") -> Optional[int]:
        """Reference implementation: full ascending scan of F_(q^s)^*."""
        t = self.tower
        if other.tower != t or other.size != self.size:
            raise AmbientMismatchError("matrices from different towers or sizes")
        if not any(self.coeffs) and not any(other.coeffs):
            return 1
        for lam in t.subfield_elements(self.size):
            if lam and self._verify_lambda(other, lam):
                return lam
        return None

    # -- value semantics -----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, DicksonMatrix) and self.tower == other.tower
                and self.coeffs == other.coeffs)

    def __hash__(self) -> int:
        return hash((self.coeffs, self.tower.order))

    def to_json(self) -> dict:
        return {"coeffs": [list(self.tower.coeffs_of(a)) for a in self.coeffs]}

    def __repr__(self) -> str:
        return f"DicksonMatrix(size={self.size}, coeffs={list(self.coeffs)})"


def fingerprint_to_bytes(tower: FieldTower, fingerprint: Sequence[int]) -> bytes:
    """Canonical serialization: JSON array of coefficient-digit arrays in
    mask order, compact separators."""
    payload = [list(tower.coeffs_of(v)) for v in fingerprint]
    return json.dumps(payload, separators=(",", ":")).encode("ascii")


def fingerprint_digest(tower: FieldTower, fingerprint: Sequence[int]) -> int:
    return fnv1a64(fingerprint_to_bytes(tower, fingerprint))
