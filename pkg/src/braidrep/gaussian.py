"""The Gaussian family: the algebra ES(m, n-1), its braid representation,
Gauss sums, and the localization u_i -> U_i on (C^m)^{(x)n}.

Throughout, ``q`` is zeta_m for odd m and zeta_{2m} for even m, held at the
working conductor 8m so that q, i, sqrt(2) and sqrt(m) share one field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bvs import BVS, MAX_TENSOR_DIM
from .cyclo import CycMatrix, CycNum, as_cycnum, make_root, sqrt_int
from .errors import (
    ConstructionCheckFailed,
    IndexOutOfRange,
    NotApplicable,
    ParameterMismatch,
    SizeGuard,
)


def working_conductor(m: int) -> int:
    return 8 * m


def _q_exponent(m):
    # q = zeta_{8m}^e
    return 8 if m % 2 else 4


def q_order(m: int) -> int:
    return m if m % 2 else 2 * m


def gaussian_q(m: int) -> CycNum:
    """zeta_m for odd m, zeta_{2m} for even m.

    zeta_m itself is never used for even m: the braiding built from it would
    not be invertible.
    """
    if m < 1:
        raise ValueError("m must be positive")
    return make_root(_q_exponent(m), working_conductor(m))


def q_power(m: int, k: int) -> CycNum:
    return make_root(_q_exponent(m) * k, working_conductor(m))


@dataclass
class CheckReport:
    check: str
    m: int
    n: int | None
    holds: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"check": self.check, "m": self.m, "n": self.n, "holds": self.holds, "details": self.details}


# ---------------------------------------------------------------------------
# Gauss sums and the normalising constant


@dataclass
class GaussSum:
    m: int
    value: CycNum
    closed_form: CycNum
    closed_form_matches: bool


def gauss_sum(m: int) -> GaussSum:
    """sum_{g<m} q^{g^2} together with its closed form.

    Closed forms: sqrt(m) for m = 1 mod 4, i sqrt(m) for m = 3 mod 4, and
    (1 + i) sqrt(2m) / 2 for even m (half of the full sum modulo 2m).
    """
    value = sum((q_power(m, g * g) for g in range(m)), CycNum.from_rational(0))
    i = make_root(1, 4)
    if m % 2 == 0:
        closed = (1 + i) * sqrt_int(2 * m) / 2
    elif m % 4 == 1:
        closed = sqrt_int(m)
    else:
        closed = i * sqrt_int(m)
    return GaussSum(m, value, closed, value == closed)


def gaussian_constant_K(m: int) -> CycNum:
    """Fixed branch of K: 1 (m = 1 mod 4), zeta_8^-1 (m = 3 mod 4), zeta_16^-1 (m even)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m % 2 == 0:
        return make_root(-1, 16)
    if m % 4 == 1:
        return CycNum.from_rational(1)
    return make_root(-1, 8)


def jones_function(m: int):
    """The values f(a) = K q^{a^2} for a = 0..m-1."""
    K = gaussian_constant_K(m)
    return [K * q_power(m, a * a) for a in range(m)]


def jones_conditions(m: int) -> CheckReport:
    """Check the three sufficient conditions for sum_g f(g) u^g to be a braid image.

    (a) f(g) = f(-g); (b) (1/m) sum_h f(h)/f(g-h) = delta_{g,0};
    (c) sqrt(m) f(x+y)/(f(x)f(y)) = sum_g f(g-y) f(g+x)/f(g).
    Every sum is evaluated term by term over Z/m.
    """
    f = jones_function(m)
    finv = [v.inverse() for v in f]
    root_m = sqrt_int(m)
    zero = CycNum.from_rational(0)
    a_ok = all(f[g] == f[(-g) % m] for g in range(m))
    b_fail = []
    for g in range(m):
        total = sum((f[h] * finv[(g - h) % m] for h in range(m)), zero) / m
        if total != (1 if g == 0 else 0):
            b_fail.append(g)
    c_fail = []
    for x in range(m):
        for y in range(m):
            lhs = root_m * f[(x + y) % m] * finv[x] * finv[y]
            rhs = sum((f[(g - y) % m] * f[(g + x) % m] * finv[g] for g in range(m)), zero)
            if lhs != rhs:
                c_fail.append((x, y))
    details = {"a": a_ok, "b": not b_fail, "c": not c_fail}
    if b_fail:
        details["b_failures"] = b_fail
    if c_fail:
        details["c_failures"] = c_fail[:10]
    return CheckReport("jones-conditions", m, None, a_ok and not b_fail and not c_fail, details)


# ---------------------------------------------------------------------------
# the algebra ES(m, n-1)


@lru_cache(maxsize=None)
def _q2_powers(m):
    q2 = q_power(m, 2)
    out = [CycNum.from_rational(1, working_conductor(m))]
    for _ in range(m - 1):
        out.append(out[-1] * q2)
    return tuple(out)


class ESElement:
    """An element of ES(m, n-1) as ``{exponent vector: coefficient}``.

    Monomials are stored in normal form u_1^{a_1} ... u_{n-1}^{a_{n-1}} with
    0 <= a_k < m.  Products are re-ordered with u_{i+1} u_i = q^{-2} u_i u_{i+1}.
    """

    __slots__ = ("m", "n", "terms")

    def __init__(self, m: int, n: int, terms=None):
        if m < 1 or n < 2:
            raise ValueError("ES(m, n-1) needs m >= 1 and n >= 2")
        self.m, self.n = m, n
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(e % m for e in exps)
            if len(exps) != n - 1:
                raise ParameterMismatch(f"monomial {exps} has the wrong length for n={n}")
            c = as_cycnum(c)
            if exps in clean:
                c = clean[exps] + c
            clean[exps] = c
        self.terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def scalar(cls, m, n, c=1):
        return cls(m, n, {(0,) * (n - 1): c})

    @classmethod
    def generator(cls, m, n, i, power=1):
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"u_{i} does not exist in ES({m}, {n - 1})")
        exps = [0] * (n - 1)
        exps[i - 1] = power
        return cls(m, n, {tuple(exps): 1})

    def _same(self, other):
        if (self.m, self.n) != (other.m, other.n):
            raise ParameterMismatch(f"ES({self.m},{self.n - 1}) vs ES({other.m},{other.n - 1})")

    def __add__(self, other):
        if not isinstance(other, ESElement):
            other = ESElement.scalar(self.m, self.n, other)
        self._same(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return ESElement(self.m, self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return ESElement(self.m, self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ESElement):
            other = ESElement.scalar(self.m, self.n, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, ESElement):
            c = as_cycnum(other)
            return ESElement(self.m, self.n, {k: v * c for k, v in self.terms.items()})
        return es_mul(self, other)

    def __rmul__(self, other):
        c = as_cycnum(other)
        return ESElement(self.m, self.n, {k: c * v for k, v in self.terms.items()})

    def __pow__(self, k):
        out = ESElement.scalar(self.m, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ESElement):
            if isinstance(other, (int, CycNum)):
                other = ESElement.scalar(self.m, self.n, other)
            else:
                return NotImplemented
        if (self.m, self.n) != (other.m, other.n):
            return False
        return not (self - other).terms

    __hash__ = None

    def star(self):
        """The involution: conjugate coefficients, reverse and invert monomials."""
        m, n = self.m, self.n
        out = ESElement(m, n)
        for exps, c in self.terms.items():
            mono = ESElement.scalar(m, n, c.conj())
            for i in range(n - 1, 0, -1):
                if exps[i - 1]:
                    mono = mono * ESElement.generator(m, n, i, -exps[i - 1])
            out = out + mono
        return out

    def is_scalar_monomial(self):
        """True if this is a single monomial whose coefficient is a root of unity."""
        if len(self.terms) != 1:
            return False
        (c,) = self.terms.values()
        return c.root_of_unity() is not None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items()):
            mono = "*".join(f"u{i + 1}^{e}" for i, e in enumerate(exps) if e) or "1"
            parts.append(f"({c!r})*{mono}")
        return " + ".join(parts)


def es_mul(a: ESElement, b: ESElement) -> ESElement:
    a._same(b)
    m, n = a.m, a.n
    q2 = _q2_powers(m)
    out = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            # moving u_j^{b_j} left past u_{j+1}^{a_{j+1}} costs q^{-2 a_{j+1} b_j}
            twist = -sum(ea[j + 1] * eb[j] for j in range(n - 2))
            exps = tuple((x + y) % m for x, y in zip(ea, eb))
            c = ca * cb * q2[twist % m]
            out[exps] = out[exps] + c if exps in out else c
    return ESElement(m, n, out)


def es_braid_image(m: int, n: int, i: int) -> ESElement:
    """(1/sqrt m) sum_j q^{j^2} u_i^j."""
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange(f"sigma_{i} out of range for {n} strands")
    inv_root = sqrt_int(m).inverse()
    exps = [0] * (n - 1)
    terms = {}
    for j in range(m):
        exps[i - 1] = j
        terms[tuple(exps)] = inv_root * q_power(m, j * j)
    return ESElement(m, n, terms)


def es_ordered_product(elements):
    out = elements[0]
    for e in elements[1:]:
        out = out * e
    return out


def es_relations_check(m: int, n: int) -> CheckReport:
    """u_i^m = 1, u_i u_{i+1} = q^2 u_{i+1} u_i and distant commutation, symbolically."""
    q2 = q_power(m, 2)
    one = ESElement.scalar(m, n)
    u = [ESElement.generator(m, n, i) for i in range(1, n)]
    failures = []
    for i in range(n - 1):
        if u[i] ** m != one:
            failures.append(f"u{i + 1}^m")
        for j in range(i + 1, n - 1):
            lhs = u[i] * u[j]
            rhs = u[j] * u[i] * (q2 if j == i + 1 else 1)
            if lhs != rhs:
                failures.append(f"u{i + 1}u{j + 1}")
    return CheckReport("es-relations", m, n, not failures, {"failures": failures})


def es_braid_relations_check(m: int, n: int) -> CheckReport:
    """Braid relations for the images of sigma_1..sigma_{n-1} inside ES(m, n-1)."""
    phi = [es_braid_image(m, n, i) for i in range(1, n)]
    failures = []
    for i in range(n - 2):
        a, b = phi[i], phi[i + 1]
        if a * b * a != b * a * b:
            failures.append(f"R1 at {i + 1}")
    for i in range(n - 1):
        for j in range(i + 2, n - 1):
            if phi[i] * phi[j] != phi[j] * phi[i]:
                failures.append(f"R2 at {i + 1},{j + 1}")
    return CheckReport("es-braid-relations", m, n, not failures, {"failures": failures})


def es_conjugation_check(m: int, n: int) -> CheckReport:
    """R_i u_{i+1} R_i^-1 = q u_i^-1 u_{i+1} and R_i u_{i-1} R_i^-1 = q^-1 u_{i-1} u_i.

    R_i^-1 is taken as the star of R_i and is first verified to be a two-sided inverse.
    """
    if n < 3:
        raise ValueError("conjugation relations need n >= 3")
    q, qinv = q_power(m, 1), q_power(m, -1)
    one = ESElement.scalar(m, n)
    failures, verified = [], []
    for i in range(1, n):
        R = es_braid_image(m, n, i)
        Rinv = R.star()
        if R * Rinv != one or Rinv * R != one:
            failures.append(f"R{i} inverse")
            continue
        ui = ESElement.generator(m, n, i)
        ui_inv = ESElement.generator(m, n, i, -1)
        if i + 1 <= n - 1:
            lhs = R * ESElement.generator(m, n, i + 1) * Rinv
            ok = lhs == ui_inv * ESElement.generator(m, n, i + 1) * q
            (verified if ok else failures).append(f"conj-next i={i}")
        if i - 1 >= 1:
            lhs = R * ESElement.generator(m, n, i - 1) * Rinv
            ok = lhs == ESElement.generator(m, n, i - 1) * ui * qinv
            (verified if ok else failures).append(f"conj-prev i={i}")
    return CheckReport("conjugation", m, n, not failures, {"verified": verified, "failures": failures})


def conjugation_permutes_monomials(m: int, n: int) -> bool:
    """Each R_i u_k R_i^-1 is one monomial times a root of unity."""
    for i in range(1, n):
        R = es_braid_image(m, n, i)
        Rinv = R.star()
        for k in range(1, n):
            if not (R * ESElement.generator(m, n, k) * Rinv).is_scalar_monomial():
                return False
    return True


# ---------------------------------------------------------------------------
# localization


def _guard(m, n, override):
    if not override and m**n > MAX_TENSOR_DIM:
        raise SizeGuard(f"m^n = {m**n} exceeds {MAX_TENSOR_DIM}")


def _monomial_action(m, n, exps):
    """Column images and q-exponents of U_1^{a_1} ... U_{n-1}^{a_{n-1}} on (C^m)^{(x)n}."""
    dim = m**n
    idx = np.arange(dim)
    digits = np.stack([(idx // m ** (n - 1 - k)) % m for k in range(n)], axis=1)
    qexp = np.zeros(dim, dtype=np.int64)
    # rightmost factor acts first
    for i in range(n - 1, 0, -1):
        for _ in range(exps[i - 1] % m):
            x, y = digits[:, i - 1], digits[:, i]
            qexp += y - x
            digits[:, i - 1] = (x + 1) % m
            digits[:, i] = (y + 1) % m
    weights = m ** np.arange(n - 1, -1, -1)
    return digits @ weights, qexp


def localize(a: ESElement, *, override: bool = False) -> CycMatrix:
    """Image of ``a`` under u_i -> I^{(i-1)} (x) U (x) I^{(n-i-1)}."""
    m, n = a.m, a.n
    _guard(m, n, override)
    dim, N, e = m**n, working_conductor(m), _q_exponent(m)
    cols = np.arange(dim)
    out = CycMatrix.zeros(dim, dim, N)
    for exps, c in a.terms.items():
        rows, qexp = _monomial_action(m, n, exps)
        mono = CycMatrix.from_root_exponents(dim, dim, rows, cols, e * qexp, N)
        out = out + (mono if c == 1 else mono.scale(c))
    return out


def localized_relations_check(m: int, n: int, *, override: bool = False) -> CheckReport:
    """ES relations for the matrices U_i."""
    _guard(m, n, override)
    q2 = q_power(m, 2)
    U = [localize(ESElement.generator(m, n, i), override=override) for i in range(1, n)]
    eye = CycMatrix.identity(m**n)
    failures = []
    for i in range(n - 1):
        if U[i] ** m != eye:
            failures.append(f"U{i + 1}^m")
        for j in range(i + 1, n - 1):
            rhs = U[j] @ U[i]
            if j == i + 1:
                rhs = rhs.scale(q2)
            if U[i] @ U[j] != rhs:
                failures.append(f"U{i + 1}U{j + 1}")
    return CheckReport("localized-relations", m, n, not failures, {"failures": failures})


def localized_braid_check(m: int, n: int, *, override: bool = False) -> CheckReport:
    """Braid relations and conjugation relations for the localized R_i."""
    _guard(m, n, override)
    q, qinv = q_power(m, 1), q_power(m, -1)
    R = [localize(es_braid_image(m, n, i), override=override) for i in range(1, n)]
    Rinv = [r.adjoint() for r in R]
    U = [localize(ESElement.generator(m, n, i), override=override) for i in range(1, n)]
    Uinv = [localize(ESElement.generator(m, n, i, -1), override=override) for i in range(1, n)]
    failures = []
    for i in range(n - 1):
        if not (R[i] @ Rinv[i]).is_identity():
            failures.append(f"R{i + 1} unitary")
    for i in range(n - 2):
        if R[i] @ R[i + 1] @ R[i] != R[i + 1] @ R[i] @ R[i + 1]:
            failures.append(f"R1 at {i + 1}")
    for i in range(n - 1):
        for j in range(i + 2, n - 1):
            if R[i] @ R[j] != R[j] @ R[i]:
                failures.append(f"R2 at {i + 1},{j + 1}")
    for i in range(n - 1):
        if i + 1 < n - 1:
            if R[i] @ U[i + 1] @ Rinv[i] != (Uinv[i] @ U[i + 1]).scale(q):
                failures.append(f"conj-next i={i + 1}")
        if i - 1 >= 0:
            if R[i] @ U[i - 1] @ Rinv[i] != (U[i - 1] @ U[i]).scale(qinv):
                failures.append(f"conj-prev i={i + 1}")
    return CheckReport("localized-braid", m, n, not failures, {"failures": failures})


# ---------------------------------------------------------------------------
# the Gaussian braided vector space


@dataclass
class GaussianBVS:
    m: int
    q: CycNum
    U: CycMatrix
    R: CycMatrix
    K: CycNum

    @property
    def bvs(self) -> BVS:
        return BVS(self.m, self.R, unitary=True)


def shift_phase_operator(m: int) -> CycMatrix:
    """U(e_i (x) e_j) = q^{j-i} e_{i+1} (x) e_{j+1}, indices mod m."""
    N, e = working_conductor(m), _q_exponent(m)
    idx = np.arange(m * m)
    i, j = idx // m, idx % m
    rows = ((i + 1) % m) * m + (j + 1) % m
    return CycMatrix.from_root_exponents(m * m, m * m, rows, idx, e * (j - i), N)


@lru_cache(maxsize=None)
def gaussian_bvs(m: int) -> GaussianBVS:
    """Build U and R = (1/sqrt m) sum_j q^{j^2} U^j, checking U^m = I and unitarity."""
    if m < 1:
        raise ValueError("m must be positive")
    N = working_conductor(m)
    U = shift_phase_operator(m)
    eye = CycMatrix.identity(m * m, N)
    acc = CycMatrix.zeros(m * m, m * m, N)
    power = eye
    for j in range(m):
        acc = acc + power.scale(q_power(m, j * j))
        power = power @ U
    if power != eye:
        raise ConstructionCheckFailed(f"U^{m} != I")
    R = acc.scale(sqrt_int(m).inverse())
    if not R.is_unitary():
        raise ConstructionCheckFailed("R is not unitary")
    return GaussianBVS(m, gaussian_q(m), U, R, gaussian_constant_K(m))


# ---------------------------------------------------------------------------
# coprime factorization


def coprime_splits(m: int):
    """Unordered factorizations m = x*y with gcd(x, y) = 1 and 1 < x < y."""
    return [(x, m // x) for x in range(2, m) if m % x == 0 and x < m // x and math.gcd(x, m // x) == 1]


def check_coprime_factorization(m: int, n: int, *, override: bool = False) -> CheckReport:
    """u_i^x commutes with u_j^y for every coprime split m = x*y and all i, j."""
    splits = coprime_splits(m)
    if not splits:
        raise NotApplicable(f"{m} is a prime power; no coprime factorization")
    localized = m**n <= MAX_TENSOR_DIM or override
    U = {}
    if localized:
        U = {i: localize(ESElement.generator(m, n, i), override=override) for i in range(1, n)}
    pairs, failures = [], []
    for x, y in splits:
        for i in range(1, n):
            for j in range(1, n):
                a = ESElement.generator(m, n, i, x)
                b = ESElement.generator(m, n, j, y)
                ok = a * b == b * a
                if ok and localized:
                    A, B = U[i] ** x, U[j] ** y
                    ok = A @ B == B @ A
                (pairs if ok else failures).append([x, y, i, j])
    details = {"splits": splits, "verified_pairs": pairs, "failures": failures, "localized": localized}
    return CheckReport("factorization", m, n, not failures, details)
