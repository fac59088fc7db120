"""Exact arithmetic in cyclotomic fields Q(zeta_N) and matrices over them.

A :class:`CycNum` stores a number as integer numerators on the power basis
``1, z, ..., z^(phi(N)-1)`` of Q(zeta_N) over one positive common denominator,
always reduced modulo the N-th cyclotomic polynomial.  Because the basis is a
genuine Q-basis, two values at the same conductor are equal exactly when their
stored vectors are equal.

A :class:`CycMatrix` stacks the phi(N) integer coefficient matrices vertically
(block ``a`` holds the coefficient of ``z^a``) and shares one denominator.
Coefficients live in a scipy CSR ``int64`` matrix whenever every value fits,
otherwise in a dense numpy ``object`` array of Python integers, so arithmetic
is exact at any size.  The choice of storage depends on the value only, which
keeps the canonical form unique.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
import numpy as np
import scipy.sparse as sp

from .errors import NotInvertible, ShapeMismatch

__all__ = [
    "CycNum",
    "CycMatrix",
    "cyclotomic_poly",
    "totient",
    "make_root",
    "sqrt_int",
    "kron",
    "adjoint",
    "to_complex",
]

# products are carried out in int64 only when this bound is provably respected
_SAFE = 2**62


# ---------------------------------------------------------------------------
# number-theoretic helpers


def _divisors(n):
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _factorize(n):
    """Prime factorization by trial division, as a dict prime -> exponent."""
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mobius(n):
    f = _factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _polydiv_exact(num, den):
    """Quotient of integer polynomials (lowest degree first); ``den`` is monic."""
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            q[i - dn] = c
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    assert not any(num), "inexact cyclotomic division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _polydiv_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


@lru_cache(maxsize=None)
def _phi_tail(n):
    # nonzero (index, coeff) pairs of Phi_n below the leading term
    poly = cyclotomic_poly(n)
    return tuple((i, c) for i, c in enumerate(poly[:-1]) if c)


def _reduce(c, n):
    """Reduce the integer list ``c`` modulo Phi_n in place and return it."""
    phi = len(cyclotomic_poly(n)) - 1
    tail = _phi_tail(n)
    for t in range(len(c) - 1, phi - 1, -1):
        ct = c[t]
        if ct:
            base = t - phi
            for i, p in tail:
                c[base + i] -= ct * p
    del c[phi:]
    return c


@lru_cache(maxsize=None)
def _powers(n):
    """Nonzero terms of z^j mod Phi_n for j = 0..n-1, as tuples of (index, coeff)."""
    phi = totient(n)
    cur = [1] + [0] * (phi - 1) if phi > 0 else []
    rows = []
    for _ in range(n):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        cur = _reduce([0] + cur, n)
    return tuple(rows)


@lru_cache(maxsize=None)
def _powers_array(n):
    phi = totient(n)
    arr = np.zeros((n, phi), dtype=np.int64)
    for j, terms in enumerate(_powers(n)):
        for i, c in terms:
            arr[j, i] = c
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _max_power_coeff(n):
    return max((abs(c) for terms in _powers(n) for _, c in terms), default=1)


@lru_cache(maxsize=None)
def _norm_trace(n):
    # trace of z^k divided by phi(n); invariant under lifting the conductor
    out = []
    for k in range(totient(n)):
        d = n // math.gcd(k, n)
        out.append(Fraction(_mobius(d), totient(d)))
    return tuple(out)


def _lift_num(num, n, target):
    if n == target:
        return num
    step = target // n
    table = _powers(target)
    out = [0] * totient(target)
    for k, c in enumerate(num):
        if c:
            for j, t in table[(k * step) % target]:
                out[j] += c * t
    return tuple(out)


def _galois_num(num, n, t):
    table = _powers(n)
    out = [0] * len(num)
    for k, c in enumerate(num):
        if c:
            for j, s in table[(k * t) % n]:
                out[j] += c * s
    return out


def _polymul(a, b, n):
    phi = len(a)
    out = [0] * (2 * phi - 1)
    nzb = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if x:
            for j, y in nzb:
                out[i + j] += x * y
    return _reduce(out, n)


# ---------------------------------------------------------------------------
# scalars


class CycNum:
    """An exact element of Q(zeta_N).

    ``CycNum(N, coeffs)`` takes ``phi(N)`` rational coordinates on the power
    basis.  Values of different conductors combine in Q(zeta_lcm).
    """

    __slots__ = ("N", "num", "den")

    def __init__(self, N, coeffs=None):
        phi = totient(N)
        if coeffs is None:
            coeffs = [0] * phi
        fracs = [Fraction(c) for c in coeffs]
        if len(fracs) != phi:
            raise ValueError(f"expected {phi} coefficients for conductor {N}")
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        self._set(N, tuple(f.numerator * (den // f.denominator) for f in fracs), den)

    def _set(self, N, num, den):
        if den < 0:
            num, den = tuple(-x for x in num), -den
        g = math.gcd(den, *num)
        if not any(num):
            den = 1
        elif g != 1:
            num, den = tuple(x // g for x in num), den // g
        self.N, self.num, self.den = N, num, den

    @classmethod
    def _make(cls, N, num, den=1):
        obj = object.__new__(cls)
        obj._set(N, tuple(num), den)
        return obj

    @classmethod
    def from_rational(cls, r, N=1):
        r = Fraction(r)
        num = [0] * totient(N)
        num[0] = r.numerator
        return cls._make(N, num, r.denominator)

    @classmethod
    def root(cls, k, N):
        return make_root(k, N)

    # -- views --------------------------------------------------------------

    @property
    def coeffs(self):
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_zero(self):
        return not any(self.num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self):
        return not any(self.num[1:])

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.num[0], self.den)

    def lift(self, N):
        if N % self.N:
            raise ValueError(f"conductor {self.N} does not divide {N}")
        return CycNum._make(N, _lift_num(self.num, self.N, N), self.den)

    # -- arithmetic ---------------------------------------------------------

    def _common(self, other):
        if self.N == other.N:
            return self.N, self.num, other.num
        L = math.lcm(self.N, other.N)
        return L, _lift_num(self.num, self.N, L), _lift_num(other.num, other.N, L)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        N, a, b = self._common(other)
        da, db = self.den, other.den
        return CycNum._make(N, [x * db + y * da for x, y in zip(a, b)], da * db)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._make(self.N, [-x for x in self.num], self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, CycMatrix):
            return NotImplemented
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.N == 1:
            return CycNum._make(self.N, [x * other.num[0] for x in self.num], self.den * other.den)
        if self.N == 1:
            return other * self
        N, a, b = self._common(other)
        return CycNum._make(N, _polymul(a, b, N), self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        """Exact inverse via the product of the nontrivial Galois conjugates."""
        if self.is_zero():
            raise NotInvertible("inverse of zero in a cyclotomic field")
        N, p = self.N, list(self.num)
        if self.is_rational():
            return CycNum.from_rational(Fraction(self.den, p[0]), N)
        prod = [1] + [0] * (len(p) - 1)
        for t in range(2, N):
            if math.gcd(t, N) == 1:
                prod = _polymul(prod, _galois_num(p, N, t), N)
        norm = _polymul(p, prod, N)
        assert not any(norm[1:]), "norm is not rational"
        return CycNum._make(N, [x * self.den for x in prod], norm[0])

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = CycNum.from_rational(1, self.N)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def galois(self, t):
        """Image under the automorphism z -> z^t (t coprime to the conductor)."""
        if math.gcd(t, self.N) != 1:
            raise ValueError(f"{t} is not a unit modulo {self.N}")
        return CycNum._make(self.N, _galois_num(self.num, self.N, t % self.N), self.den)

    def conj(self):
        return CycNum._make(self.N, _galois_num(self.num, self.N, self.N - 1), self.den)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den != other.den:
            return False
        _, a, b = self._common(other)
        return a == b

    def __hash__(self):
        tr = sum((x * w for x, w in zip(self.num, _norm_trace(self.N)) if x), Fraction(0))
        return hash(tr / self.den)

    def root_of_unity(self):
        """Return ``(k, M)`` with self == zeta_M^k and M minimal, or None."""
        M = math.lcm(2, self.N)
        if self * self.conj() != 1 or self**M != 1:
            return None
        order = next(d for d in _divisors(M) if self**d == 1)
        for k in range(order):
            if math.gcd(k, order) == 1 and make_root(k, order) == self:
                return k, order
        raise AssertionError("root of unity not located")

    def __repr__(self):
        if self.is_rational():
            return f"CycNum({self.to_fraction()})"
        terms = []
        for k, x in enumerate(self.num):
            if x:
                c = Fraction(x, self.den)
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.N}^{k}")
        return "CycNum(" + " + ".join(terms) + ")"

    def to_complex(self, digits=15):
        return to_complex(self, digits)

    def to_json(self):
        return {"N": self.N, "coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["N"]), [Fraction(int(n), int(d)) for n, d in obj["coeffs"]])


def _coerce(x):
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return CycNum.from_rational(x)
    return NotImplemented


def as_cycnum(x) -> CycNum:
    out = _coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a cyclotomic number")
    return out


def make_root(k: int, N: int) -> CycNum:
    """zeta_N^k in canonical form; ``k`` is taken modulo N."""
    if N < 1:
        raise ValueError("conductor must be positive")
    num = [0] * totient(N)
    for i, c in _powers(N)[k % N]:
        num[i] = c
    return CycNum._make(N, num, 1)


@lru_cache(maxsize=None)
def _sqrt_prime(p):
    if p == 2:
        return make_root(1, 8) + make_root(7, 8)
    g = sum((make_root(k * k, p) for k in range(p)), CycNum.from_rational(0, p))
    if p % 4 == 1:
        return g
    return g * make_root(3, 4)  # g = i*sqrt(p) when p = 3 mod 4


def sqrt_int(n: int) -> CycNum:
    """The square root of a positive integer with positive real part.

    Odd prime factors use the quadratic Gauss sum; 2 uses zeta_8 + zeta_8^-1.
    """
    if n < 1:
        raise ValueError("sqrt_int needs a positive integer")
    out = CycNum.from_rational(1)
    for p, e in _factorize(n).items():
        out = out * (p ** (e // 2))
        if e % 2:
            out = out * _sqrt_prime(p)
    return out


def to_complex(a, digits=15):
    """Numerical value under z_N -> exp(2 pi i/N), for display only."""
    a = as_cycnum(a)
    with mpmath.workdps(digits + 10):
        total = mpmath.mpc(0)
        for k, x in enumerate(a.num):
            if x:
                total += x * mpmath.expjpi(mpmath.mpf(2 * k) / a.N)
        total /= a.den
        return +total


# ---------------------------------------------------------------------------
# matrices


def _is_obj(x):
    return isinstance(x, np.ndarray)


def _maxabs(x):
    if _is_obj(x):
        return max((abs(v) for v in x.flat), default=0)
    return int(np.abs(x.data).max()) if x.nnz else 0


def _as_obj(x):
    if _is_obj(x):
        return x
    return x.toarray().astype(object)


def _as_kind(x, obj):
    return _as_obj(x) if obj else x


def _zeros_like_kind(shape, obj):
    if obj:
        return np.zeros(shape, dtype=object)
    return sp.csr_matrix(shape, dtype=np.int64)


def _block_rows(x, a, r):
    return x[a * r:(a + 1) * r]


def _vstack(blocks, obj):
    if obj:
        return np.vstack([_as_obj(b) for b in blocks])
    return sp.vstack(blocks, format="csr", dtype=np.int64)


def _kron_any(x, y, obj):
    if obj:
        return np.kron(_as_obj(x), _as_obj(y))
    return sp.kron(x, y, format="csr")


@lru_cache(maxsize=None)
def _mix_matrix(N, b):
    """Matrix of multiplication by z^b on the power basis (phi x phi)."""
    phi = totient(N)
    tab = _powers_array(N)
    idx = (np.arange(phi) + b) % N
    return tab[idx].T.copy()


@lru_cache(maxsize=256)
def _mix_kron(N, b, r):
    return sp.kron(sp.csr_matrix(_mix_matrix(N, b)), sp.identity(r, dtype=np.int64, format="csr"), format="csr")


@lru_cache(maxsize=None)
def _lift_matrix(N, L):
    phi_n, phi_l = totient(N), totient(L)
    out = np.zeros((phi_l, phi_n), dtype=np.int64)
    tab = _powers_array(L)
    step = L // N
    for k in range(phi_n):
        out[:, k] = tab[(k * step) % L]
    return out


def _apply_left(mat, data, r, obj):
    """Mix coefficient blocks: block j of result = sum_a mat[j, a] * block a."""
    if obj:
        phi_out, phi_in = mat.shape
        res = np.zeros((phi_out * r, data.shape[1]), dtype=object)
        for j in range(phi_out):
            for a in range(phi_in):
                c = int(mat[j, a])
                if c:
                    res[j * r:(j + 1) * r] += c * data[a * r:(a + 1) * r]
        return res
    k = sp.kron(sp.csr_matrix(mat), sp.identity(r, dtype=np.int64, format="csr"), format="csr")
    return k @ data


class CycMatrix:
    """Dense-semantics matrix over a cyclotomic field with sparse exact storage."""

    __slots__ = ("rows", "cols", "N", "den", "_data")

    def __init__(self, *_args, **_kw):
        raise TypeError("use CycMatrix.from_rows, from_entries, from_dict, identity, ...")

    # -- construction -------------------------------------------------------

    @classmethod
    def _wrap(cls, rows, cols, N, data, den):
        obj = object.__new__(cls)
        obj.rows, obj.cols, obj.N = rows, cols, N
        if _is_obj(data):
            if _maxabs(data) < _SAFE:
                data = sp.csr_matrix(data.astype(np.int64))
        if not _is_obj(data):
            data = sp.csr_matrix(data, dtype=np.int64)
            data.sum_duplicates()
            data.eliminate_zeros()
            data.sort_indices()
            nz = data.nnz
            if nz:
                g = math.gcd(int(np.gcd.reduce(np.abs(data.data))), den)
            else:
                g = den
        else:
            vals = [int(v) for v in data.flat if v]
            nz = len(vals)
            g = math.gcd(den, *vals) if vals else den
        if den < 0:
            data, den = -data, -den
        if not nz:
            den = 1
        elif g > 1:
            if _is_obj(data):
                data = data // g
            else:
                data.data //= g
            den //= g
        if _is_obj(data) and _maxabs(data) < _SAFE:
            data = sp.csr_matrix(data.astype(np.int64))
            data.eliminate_zeros()
            data.sort_indices()
        obj.den = den
        obj._data = data
        return obj

    @classmethod
    def from_dict(cls, rows, cols, mapping, N=None):
        """Build from ``{(i, j): scalar}``; missing entries are zero."""
        vals = {ij: as_cycnum(v) for ij, v in mapping.items()}
        vals = {ij: v for ij, v in vals.items() if not v.is_zero()}
        for i, j in vals:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ShapeMismatch(f"entry {(i, j)} outside a {rows}x{cols} matrix")
        L = math.lcm(N or 1, *(v.N for v in vals.values()))
        den = math.lcm(1, *(v.den for v in vals.values()))
        phi = totient(L)
        ri, ci, dv = [], [], []
        big = False
        for (i, j), v in vals.items():
            scale = den // v.den
            for a, x in enumerate(_lift_num(v.num, v.N, L)):
                if x:
                    x *= scale
                    big = big or abs(x) >= _SAFE
                    ri.append(a * rows + i)
                    ci.append(j)
                    dv.append(x)
        if big:
            data = np.zeros((phi * rows, cols), dtype=object)
            for r_, c_, x in zip(ri, ci, dv):
                data[r_, c_] = x
        else:
            data = sp.csr_matrix(
                (np.array(dv, dtype=np.int64), (np.array(ri, dtype=np.int64), np.array(ci, dtype=np.int64))),
                shape=(phi * rows, cols),
            )
        return cls._wrap(rows, cols, L, data, den)

    @classmethod
    def from_rows(cls, rows, N=None):
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeMismatch("ragged or empty row list")
        mapping = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r)}
        return cls.from_dict(len(rows), len(rows[0]), mapping, N)

    @classmethod
    def from_entries(cls, rows, cols, entries, N=None):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ShapeMismatch(f"{len(entries)} entries for a {rows}x{cols} matrix")
        return cls.from_dict(rows, cols, {divmod(k, cols): v for k, v in enumerate(entries)}, N)

    @classmethod
    def from_root_exponents(cls, rows, cols, row_idx, col_idx, exps, N):
        """Sparse matrix with entry zeta_N^exps[k] at (row_idx[k], col_idx[k])."""
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        coeff = _powers_array(N)[np.asarray(exps, dtype=np.int64) % N]
        ent, a = np.nonzero(coeff)
        data = sp.csr_matrix(
            (coeff[ent, a], (a * rows + row_idx[ent], col_idx[ent])),
            shape=(totient(N) * rows, cols),
        )
        return cls._wrap(rows, cols, N, data, 1)

    @classmethod
    def zeros(cls, rows, cols=None, N=1):
        cols = rows if cols is None else cols
        return cls._wrap(rows, cols, N, sp.csr_matrix((totient(N) * rows, cols), dtype=np.int64), 1)

    @classmethod
    def identity(cls, n, N=1):
        idx = np.arange(n)
        return cls.from_root_exponents(n, n, idx, idx, np.zeros(n, dtype=np.int64), N)

    @classmethod
    def diag(cls, values):
        values = list(values)
        return cls.from_dict(len(values), len(values), {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def monomial(cls, perm, phases=None):
        """Matrix sending basis vector j to phases[j] times basis vector perm[j]."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        phases = [1] * n if phases is None else list(phases)
        return cls.from_dict(n, n, {(perm[j], j): phases[j] for j in range(n)})

    # -- basic views --------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def phi(self):
        return totient(self.N)

    def _blocks(self):
        return [_block_rows(self._data, a, self.rows) for a in range(self.phi)]

    def _pattern(self):
        """Boolean CSR marking the nonzero entries."""
        acc = sp.csr_matrix((self.rows, self.cols), dtype=np.int64)
        for b in self._blocks():
            if _is_obj(b):
                b = sp.csr_matrix((b != 0).astype(np.int64))
            else:
                b = abs(b)
            acc = acc + b
        acc.eliminate_zeros()
        acc.sort_indices()
        return acc

    def nnz(self):
        return self._pattern().nnz

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        num = [int(self._data[a * self.rows + i, j]) for a in range(self.phi)]
        return CycNum._make(self.N, num, self.den)

    def to_dict(self):
        """Nonzero entries as ``{(i, j): CycNum}``."""
        coo = sp.coo_matrix(self._data) if not _is_obj(self._data) else None
        acc = {}
        phi, r = self.phi, self.rows
        if coo is not None:
            for row, col, x in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                a, i = divmod(row, r)
                acc.setdefault((i, col), [0] * phi)[a] = x
        else:
            for (row, col), x in np.ndenumerate(self._data):
                if x:
                    a, i = divmod(row, r)
                    acc.setdefault((i, col), [0] * phi)[a] = int(x)
        return {ij: CycNum._make(self.N, num, self.den) for ij, num in sorted(acc.items())}

    @property
    def entries(self):
        """All entries in row-major order."""
        d = self.to_dict()
        zero = CycNum.from_rational(0, self.N)
        return [d.get((i, j), zero) for i in range(self.rows) for j in range(self.cols)]

    def to_rows(self):
        e = self.entries
        return [e[i * self.cols:(i + 1) * self.cols] for i in range(self.rows)]

    def key(self):
        """Hashable canonical form (conductor specific)."""
        if _is_obj(self._data):
            payload = tuple(int(v) for v in self._data.flat)
        else:
            payload = (self._data.indptr.tobytes(), self._data.indices.tobytes(), self._data.data.tobytes())
        return (self.N, self.rows, self.cols, self.den, payload)

    def __hash__(self):
        p = self._pattern()
        return hash((self.rows, self.cols, p.indptr.tobytes(), p.indices.tobytes()))

    def __repr__(self):
        return f"CycMatrix({self.rows}x{self.cols}, N={self.N}, nnz={self.nnz()})"

    def __str__(self):
        rows = []
        for row in self.to_rows():
            rows.append("[" + ", ".join(_short(x) for x in row) + "]")
        return "\n".join(rows)

    # -- conductor handling -------------------------------------------------

    def lift(self, L):
        if L % self.N:
            raise ValueError(f"conductor {self.N} does not divide {L}")
        if L == self.N:
            return self
        mat = _lift_matrix(self.N, L)
        obj = _is_obj(self._data) or _maxabs(self._data) * int(np.abs(mat).sum(axis=1).max()) >= _SAFE
        data = _apply_left(mat, _as_kind(self._data, obj), self.rows, obj)
        return CycMatrix._wrap(self.rows, self.cols, L, data, self.den)

    def _align(self, other):
        if isinstance(other, CycMatrix):
            L = math.lcm(self.N, other.N)
            return self.lift(L), other.lift(L)
        raise TypeError(f"expected CycMatrix, got {type(other).__name__}")

    # -- arithmetic ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a, b = self._align(other)
        if a.den != b.den:
            return False
        if _is_obj(a._data) or _is_obj(b._data):
            return bool(np.array_equal(_as_obj(a._data), _as_obj(b._data)))
        return (a._data != b._data).nnz == 0

    def __add__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        a, b = self._align(other)
        if a.shape != b.shape:
            raise ShapeMismatch(f"{a.shape} + {b.shape}")
        den = math.lcm(a.den, b.den)
        sa, sb = den // a.den, den // b.den
        obj = (
            _is_obj(a._data)
            or _is_obj(b._data)
            or _maxabs(a._data) * sa + _maxabs(b._data) * sb >= _SAFE
        )
        data = _as_kind(a._data, obj) * sa + _as_kind(b._data, obj) * sb
        return CycMatrix._wrap(a.rows, a.cols, a.N, data, den)

    def __neg__(self):
        return CycMatrix._wrap(self.rows, self.cols, self.N, -self._data, self.den)

    def __sub__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, s):
        """Multiply every entry by the scalar ``s``."""
        s = as_cycnum(s)
        L = math.lcm(self.N, s.N)
        a = self.lift(L)
        sn = _lift_num(s.num, s.N, L)
        phi = totient(L)
        mat = np.zeros((phi, phi), dtype=object)
        for b, x in enumerate(sn):
            if x:
                mat += x * _mix_matrix(L, b).astype(object)
        bound = _maxabs(a._data) * max((sum(abs(int(v)) for v in row) for row in mat), default=0)
        obj = _is_obj(a._data) or bound >= _SAFE
        if not obj:
            mat = mat.astype(np.int64)
        data = _apply_left(mat, _as_kind(a._data, obj), a.rows, obj)
        return CycMatrix._wrap(a.rows, a.cols, L, data, a.den * s.den)

    def __mul__(self, other):
        if isinstance(other, CycMatrix):
            return NotImplemented
        if _coerce(other) is NotImplemented:
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.scale(as_cycnum(other).inverse())

    def __matmul__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        a, b = self._align(other)
        if a.cols != b.rows:
            raise ShapeMismatch(f"{a.shape} @ {b.shape}")
        N, phi, r, k = a.N, a.phi, a.rows, a.cols
        bound = _maxabs(a._data) * _maxabs(b._data) * k * phi * phi * _max_power_coeff(N)
        obj = _is_obj(a._data) or _is_obj(b._data) or bound >= _SAFE
        ad, bd = _as_kind(a._data, obj), _as_kind(b._data, obj)
        acc = _zeros_like_kind((phi * r, b.cols), obj)
        for j in range(phi):
            bj = _block_rows(bd, j, k)
            if (not obj and bj.nnz == 0) or (obj and not bj.any()):
                continue
            prod = ad @ bj
            if obj:
                acc = acc + _apply_left(_mix_matrix(N, j), prod, r, True)
            else:
                acc = acc + _mix_kron(N, j, r) @ prod
        return CycMatrix._wrap(r, b.cols, N, acc, a.den * b.den)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if self.rows != self.cols:
            raise ShapeMismatch("power of a non-square matrix")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = CycMatrix.identity(self.rows, self.N)
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def kron(self, other):
        return kron(self, other)

    def transpose(self):
        obj = _is_obj(self._data)
        blocks = [b.T for b in self._blocks()]
        data = _vstack(blocks, obj) if obj else sp.vstack([sp.csr_matrix(b) for b in blocks], format="csr")
        return CycMatrix._wrap(self.cols, self.rows, self.N, data, self.den)

    @property
    def T(self):
        return self.transpose()

    def conj(self):
        N, phi = self.N, self.phi
        tab = _powers_array(N)
        mat = tab[(-np.arange(phi)) % N].T.copy()
        obj = _is_obj(self._data) or _maxabs(self._data) * phi * _max_power_coeff(N) >= _SAFE
        data = _apply_left(mat, _as_kind(self._data, obj), self.rows, obj)
        return CycMatrix._wrap(self.rows, self.cols, N, data, self.den)

    def adjoint(self):
        return self.transpose().conj()

    def direct_sum(self, other):
        a, b = self._align(other)
        obj = _is_obj(a._data) or _is_obj(b._data)
        blocks = []
        for x, y in zip(a._blocks(), b._blocks()):
            if obj:
                z = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=object)
                z[: a.rows, : a.cols] = _as_obj(x) * b.den
                z[a.rows:, a.cols:] = _as_obj(y) * a.den
                blocks.append(z)
            else:
                blocks.append(sp.block_diag((x * b.den, y * a.den), format="csr", dtype=np.int64))
        return CycMatrix._wrap(a.rows + b.rows, a.cols + b.cols, a.N, _vstack(blocks, obj), a.den * b.den)

    # -- predicates ---------------------------------------------------------

    def is_square(self):
        return self.rows == self.cols

    def is_identity(self):
        return self.is_square() and self == CycMatrix.identity(self.rows, self.N)

    def is_zero(self):
        return self.nnz() == 0

    def monomial_parts(self):
        """``(perm, phases)`` with self[perm[j], j] = phases[j], or None if not monomial."""
        if not self.is_square():
            return None
        p = self._pattern()
        if p.nnz != self.rows:
            return None
        if not np.all(np.diff(p.indptr) == 1):
            return None
        pc = p.tocsc()
        pc.sort_indices()
        if not np.all(np.diff(pc.indptr) == 1):
            return None
        perm = pc.indices.tolist()
        entries = self.to_dict()
        return perm, [entries[(perm[j], j)] for j in range(self.cols)]

    def is_monomial(self):
        return self.monomial_parts() is not None

    def is_unitary(self):
        return self.is_square() and (self @ self.adjoint()).is_identity()

    # -- inversion ----------------------------------------------------------

    def inverse(self):
        if not self.is_square():
            raise NotInvertible("non-square matrix")
        parts = self.monomial_parts()
        if parts is not None:
            perm, phases = parts
            inv = [0] * self.rows
            for j, i in enumerate(perm):
                inv[i] = j
            return CycMatrix.monomial(inv, [phases[inv[i]].inverse() for i in range(self.rows)])
        adj = self.adjoint()
        if (self @ adj).is_identity():
            return adj
        return _gauss_inverse(self)

    def rank(self):
        rows = [list(r) for r in self.to_rows()]
        return _row_reduce(rows, None)

    def is_invertible(self):
        if not self.is_square():
            return False
        if self.is_monomial():
            return True
        return self.rank() == self.rows

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {"rows": self.rows, "cols": self.cols, "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, obj):
        entries = [CycNum.from_json(e) for e in obj["entries"]]
        return cls.from_entries(int(obj["rows"]), int(obj["cols"]), entries)

    def to_numpy(self):
        """Floating-point complex approximation, for display only."""
        w = np.exp(2j * np.pi * np.arange(self.phi) / self.N)
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for a, b in enumerate(self._blocks()):
            dense = _as_obj(b).astype(float) if _is_obj(b) else b.toarray()
            out += w[a] * dense
        return out / self.den


def _short(x):
    if x.is_rational():
        return str(x.to_fraction())
    return repr(x)[len("CycNum("):-1]


def _row_reduce(rows, aug):
    """Gauss-Jordan elimination in place; returns the rank.  ``aug`` is carried along."""
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if not rows[i][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        if aug is not None:
            aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        if aug is not None:
            aug[rank] = [x * inv for x in aug[rank]]
        for i in range(n_rows):
            if i != rank and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
                if aug is not None:
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[rank])]
        rank += 1
    return rank


def _gauss_inverse(m):
    n = m.rows
    rows = [list(r) for r in m.to_rows()]
    one, zero = CycNum.from_rational(1, m.N), CycNum.from_rational(0, m.N)
    aug = [[one if i == j else zero for j in range(n)] for i in range(n)]
    if _row_reduce(rows, aug) < n:
        raise NotInvertible("matrix is singular")
    return CycMatrix.from_rows(aug, m.N)


def kron(A: CycMatrix, B: CycMatrix) -> CycMatrix:
    """Kronecker product; row (i1, i2) maps to i1 * B.rows + i2."""
    a, b = A._align(B)
    N, phi = a.N, a.phi
    bound = _maxabs(a._data) * _maxabs(b._data) * phi * phi * _max_power_coeff(N)
    obj = _is_obj(a._data) or _is_obj(b._data) or bound >= _SAFE
    r, c = a.rows * b.rows, a.cols * b.cols
    out = [_zeros_like_kind((r, c), obj) for _ in range(phi)]
    ab, bb = a._blocks(), b._blocks()
    table = _powers(N)
    for i, x in enumerate(ab):
        if (not obj and x.nnz == 0) or (obj and not np.any(x)):
            continue
        for j, y in enumerate(bb):
            if (not obj and y.nnz == 0) or (obj and not np.any(y)):
                continue
            k = _kron_any(x, y, obj)
            for t, coef in table[(i + j) % N]:
                out[t] = out[t] + coef * k
    return CycMatrix._wrap(r, c, N, _vstack(out, obj), a.den * b.den)


def adjoint(A: CycMatrix) -> CycMatrix:
    return A.adjoint()
