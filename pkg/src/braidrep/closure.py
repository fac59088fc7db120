"""Exact closure of finitely generated matrix groups over a cyclotomic field.

Elements live in a private dense form: an integer array of shape
``(phi(N), r, r)`` (coefficient of zeta_N^a in slice ``a``) and a positive
denominator, reduced so the gcd of all numerators and the denominator is 1.
That form is canonical, so its bytes serve directly as a dictionary key and
two different matrices can never be merged.
"""

from __future__ import annotations

import hashlib
import math
import os
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

from .cyclo import CycMatrix, CycNum, _powers_array, make_root, totient
from .errors import InvariantError, NotInvertible, ShapeMismatch, SizeGuard

DEFAULT_BUDGET = 1_000_000
MAX_BUDGET = 10_000_000
MAX_DIM = 256

_FLOAT_SAFE = 2**53
_INT_SAFE = 2**62
_CHUNK = 4_000_000  # floats per intermediate product block


def default_budget() -> int:
    env = os.environ.get("BRAIDREP_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# dense kernel


@lru_cache(maxsize=None)
def _mult_tensor(N):
    """T[j, a, b] = coefficient of z^j in z^a * z^b (mod Phi_N)."""
    phi = totient(N)
    tab = _powers_array(N)
    T = np.zeros((phi, phi, phi), dtype=np.int64)
    for a in range(phi):
        for b in range(phi):
            T[:, a, b] = tab[(a + b) % N]
    T.setflags(write=False)
    return T


def _maxabs(x):
    if x.dtype == object:
        return max((abs(int(v)) for v in x.flat), default=0)
    return int(np.abs(x).max()) if x.size else 0


class _Kernel:
    def __init__(self, N, dim):
        self.N = N
        self.phi = totient(N)
        self.dim = dim
        T = _mult_tensor(N)
        self.T = T
        self.Tmat = T.reshape(self.phi, -1).T.copy()  # (phi*phi, phi)
        self.Tmat_f = self.Tmat.astype(np.float64)
        self.tsum = int(np.abs(T).sum(axis=(1, 2)).max())

    # arrays are (B, phi, r, c) numerators; dens is a list of ints

    def mul_right(self, A, E):
        """A[n] @ E for every n (numerators only)."""
        B, phi, r, k = A.shape
        c = E.shape[2]
        bound = _maxabs(A) * _maxabs(E) * k * self.tsum
        if bound < _FLOAT_SAFE:
            kind, Af, Ef, Tm = "f", A.astype(np.float64), E.astype(np.float64), self.Tmat_f
        elif bound < _INT_SAFE:
            kind, Af, Ef, Tm = "i", A.astype(np.int64), E.astype(np.int64), self.Tmat
        else:
            kind, Af, Ef, Tm = "o", A.astype(object), E.astype(object), self.Tmat.astype(object)
        E2 = Ef.transpose(1, 0, 2).reshape(k, phi * c)
        step = max(1, _CHUNK // (phi * r * phi * c))
        out = []
        for s in range(0, B, step):
            blk = Af[s:s + step]
            nb = blk.shape[0]
            P = blk.reshape(nb * phi * r, k) @ E2
            P = P.reshape(nb, phi, r, phi, c).transpose(0, 2, 4, 1, 3).reshape(nb * r * c, phi * phi)
            C = (P @ Tm).reshape(nb, r, c, phi).transpose(0, 3, 1, 2)
            if kind == "f":
                C = np.rint(C).astype(np.int64)
            out.append(C)
        C = np.concatenate(out, axis=0)
        if kind == "o" and _maxabs(C) < _INT_SAFE:
            C = C.astype(np.int64)
        return C

    @staticmethod
    def reduce(C, dens):
        """Divide each numerator block and its denominator by their common gcd."""
        B = C.shape[0]
        dens = [int(d) for d in dens]
        flat = C.reshape(B, -1)
        if C.dtype == object:
            gs = [math.gcd(d, *[int(v) for v in row]) for row, d in zip(flat, dens)]
        else:
            g = np.gcd.reduce(np.abs(flat), axis=1)
            gs = [math.gcd(int(x), d) for x, d in zip(g, dens)]
        if any(x != 1 for x in gs):
            div = np.array(gs, dtype=C.dtype).reshape(B, 1, 1, 1)
            C = C // div
            dens = [d // x for d, x in zip(dens, gs)]
        return C, dens

    def projective(self, C, dens):
        """Scale each matrix so its first nonzero entry (row-major) is 1."""
        B = C.shape[0]
        mask = (C != 0).any(axis=1).reshape(B, -1)
        first = mask.argmax(axis=1)
        rc = C.shape[3]
        svecs, new_dens = [], []
        for n in range(B):
            i, j = divmod(int(first[n]), rc)
            inv = _scalar_inverse(self.N, tuple(int(v) for v in C[n, :, i, j]))
            svecs.append(inv[0])
            new_dens.append(inv[1])
        S = np.array(svecs, dtype=object)
        if _maxabs(S) * _maxabs(C) * self.tsum < _INT_SAFE:
            S = S.astype(np.int64)
            Cx = C.astype(np.int64)
        else:
            Cx = C.astype(object)
        M = np.einsum("jab,nb->nja", self.T.astype(S.dtype), S)
        out = np.einsum("nja,narc->njrc", M, Cx)
        return self.reduce(out, new_dens)


@lru_cache(maxsize=65536)
def _scalar_inverse(N, coeffs):
    """Integer numerator coefficients and denominator of 1/(sum coeffs[a] z^a)."""
    inv = CycNum(N, list(coeffs)).inverse()
    if inv.N != N:
        inv = inv.lift(N)
    return tuple(int(v) for v in inv.num), int(inv.den)


def _to_dense(A: CycMatrix, N):
    A = A.lift(N) if A.N != N else A
    phi = totient(N)
    data = A._data
    arr = data if isinstance(data, np.ndarray) else data.toarray()
    if arr.dtype == object and _maxabs(arr) < _INT_SAFE:
        arr = arr.astype(np.int64)
    return arr.reshape(phi, A.rows, A.cols), int(A.den)


def _from_dense(arr, den, N) -> CycMatrix:
    phi, r, c = arr.shape
    data = arr.reshape(phi * r, c)
    if data.dtype == object:
        return CycMatrix._wrap(r, c, N, data.copy(), den)
    import scipy.sparse as sp

    return CycMatrix._wrap(r, c, N, sp.csr_matrix(data), den)


def _key(arr, den) -> bytes:
    m = _maxabs(arr)
    if arr.dtype == object and m >= _INT_SAFE:
        return f"{den}|o|".encode() + repr([int(v) for v in arr.flat]).encode()
    for dt in (np.int8, np.int16, np.int32, np.int64):
        if m <= np.iinfo(dt).max:
            break
    return f"{den}|{np.dtype(dt).char}|".encode() + np.ascontiguousarray(arr, dtype=dt).tobytes()


def _digest(key: bytes) -> str:
    return hashlib.sha256(key).hexdigest()


# ---------------------------------------------------------------------------
# results


@dataclass
class ClosureResult:
    status: str  # "Finite" or "BudgetExceeded"
    order: int | None
    generators_used: int
    budget: int
    projective: bool = False
    element_set_hash: str | None = None
    witness_hashes: list[str] = field(default_factory=list)
    elapsed_ms: float = 0.0
    _store: tuple | None = field(default=None, repr=False, compare=False)
    _elements: list | None = field(default=None, repr=False, compare=False)

    @property
    def finite(self):
        return self.status == "Finite"

    @property
    def elements(self) -> list[CycMatrix] | None:
        """Canonical element list (generated on first access)."""
        if self._elements is None and self._store is not None:
            arrays, dens, N = self._store
            self._elements = [_from_dense(a, d, N) for a, d in zip(arrays, dens)]
        return self._elements

    def to_json(self):
        out = {
            "status": self.status,
            "budget": self.budget,
            "generators_used": self.generators_used,
            "projective": self.projective,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.finite:
            out["order"] = self.order
            out["element_set_hash"] = self.element_set_hash
            out["witness_hashes"] = list(self.witness_hashes)
        return out


def _prepare(generators, budget, override):
    gens = list(generators)
    if not gens:
        raise ShapeMismatch("need at least one generator")
    shape = gens[0].shape
    if shape[0] != shape[1] or any(g.shape != shape for g in gens):
        raise ShapeMismatch("generators must be square and of equal shape")
    if budget < 1:
        raise ValueError("budget must be positive")
    if not override and (shape[0] > MAX_DIM or budget > MAX_BUDGET):
        raise SizeGuard(f"closure of {shape[0]}x{shape[0]} matrices with budget {budget} needs override")
    for g in gens:
        if not g.is_invertible():
            raise NotInvertible("closure generators must be invertible")
    N = math.lcm(*[g.N for g in gens])
    return gens, N, shape[0]


def _closure(generators, budget, seed, override, projective):
    t0 = time.perf_counter()
    budget = default_budget() if budget is None else int(budget)
    gens, N, dim = _prepare(generators, budget, override)
    kern = _Kernel(N, dim)
    rng = random.Random(seed)

    def canon(C, dens):
        C, dens = kern.reduce(C, dens)
        if projective:
            C, dens = kern.projective(C, dens)
        return C, dens

    gen_dense = []
    for g in gens:
        a, d = _to_dense(g, N)
        C, ds = canon(a[None], [d])
        gen_dense.append((C[0], ds[0]))
    order_idx = list(range(len(gen_dense)))
    if seed is not None:
        rng.shuffle(order_idx)

    eye, _ = _to_dense(CycMatrix.identity(dim), N)
    elems = [eye]
    dens = [1]
    index = {_key(eye, 1): 0}

    def mul_batch(arrs, ds, e, de):
        C = kern.mul_right(np.stack(arrs), e)
        return canon(C, [d * de for d in ds])

    def add_coset(H, Hd, x, xd):
        C, ds = mul_batch(H, Hd, x, xd)
        for k in range(C.shape[0]):
            key = _key(C[k], ds[k])
            if key in index:
                raise InvariantError("coset disjointness", "Dimino coset overlaps the current set")
            index[key] = len(elems)
            elems.append(C[k])
            dens.append(ds[k])

    used = []
    exceeded = False
    for gi in order_idx:
        g, gd = gen_dense[gi]
        if _key(g, gd) in index:
            used.append((g, gd))
            continue
        H, Hd = list(elems), list(dens)
        nH = len(H)
        if len(elems) + nH > budget:
            exceeded = True
            break
        used.append((g, gd))
        add_coset(H, Hd, g, gd)
        pos = nH
        while pos < len(elems) and not exceeded:
            rep, rd = elems[pos], dens[pos]
            for s, sd in used:
                C, ds = mul_batch([rep], [rd], s, sd)
                if _key(C[0], ds[0]) not in index:
                    if len(elems) + nH > budget:
                        exceeded = True
                        break
                    add_coset(H, Hd, C[0], ds[0])
            pos += nH
        if exceeded:
            break

    elapsed = (time.perf_counter() - t0) * 1000
    if exceeded:
        return ClosureResult("BudgetExceeded", None, len(gens), budget, projective, elapsed_ms=elapsed)

    # post-hoc spot verification
    for _ in range(min(100, len(elems) * len(gen_dense))):
        k = rng.randrange(len(elems))
        s, sd = gen_dense[rng.randrange(len(gen_dense))]
        C, ds = mul_batch([elems[k]], [dens[k]], s, sd)
        if _key(C[0], ds[0]) not in index:
            raise InvariantError("closure", "sampled product escaped the element set")
    for g in gens:
        a, d = _to_dense(g.inverse(), N)
        C, ds = canon(a[None], [d])
        if _key(C[0], ds[0]) not in index:
            raise InvariantError("closure", "generator inverse missing from the element set")

    keys = sorted(index)
    h = hashlib.sha256()
    for k in keys:
        h.update(hashlib.sha256(k).digest())
    witness = [_digest(_key(a, d)) for a, d in gen_dense]
    elapsed = (time.perf_counter() - t0) * 1000
    return ClosureResult(
        "Finite",
        len(elems),
        len(gens),
        budget,
        projective,
        h.hexdigest(),
        witness,
        elapsed,
        _store=(elems, dens, N),
    )


def dimino_closure(generators, budget: int | None = None, seed: int | None = None, *, override: bool = False) -> ClosureResult:
    """Enumerate the group generated by ``generators`` (Dimino's coset method).

    ``budget`` caps the number of stored elements; ``seed`` only affects the
    generator processing order and the post-hoc spot checks, never the result.
    """
    return _closure(generators, budget, seed, override, projective=False)


def closure_mod_scalars(generators, budget: int | None = None, seed: int | None = None, *, override: bool = False) -> ClosureResult:
    """Closure in the projective group: every element is scaled so its first nonzero entry is 1."""
    return _closure(generators, budget, seed, override, projective=True)


def projective_normal_form(A: CycMatrix) -> CycMatrix:
    """A divided by its first nonzero entry in row-major order."""
    for i in range(A.rows):
        for j in range(A.cols):
            v = A[i, j]
            if not v.is_zero():
                return A / v
    raise ValueError("zero matrix has no projective normal form")


# ---------------------------------------------------------------------------
# monomial certificates


@dataclass
class VirtAbelianCert:
    perm_quotient_order: int
    diagonal_rank_note: int
    generator_monomial_witness: list[tuple[list[int], list[CycNum]]]
    reassembly_ok: bool = True
    homomorphism_ok: bool = True

    def to_json(self):
        return {
            "perm_quotient_order": self.perm_quotient_order,
            "diagonal_rank_note": self.diagonal_rank_note,
            "reassembly_ok": self.reassembly_ok,
            "homomorphism_ok": self.homomorphism_ok,
            "generator_permutations": [list(p) for p, _ in self.generator_monomial_witness],
        }


def permutation_group_order(perms) -> int:
    perms = [list(p) for p in perms]
    if not perms:
        return 1
    return int(PermutationGroup([Permutation(p) for p in perms]).order())


def monomial_certificate(generators) -> VirtAbelianCert | None:
    """Certificate that the generated group is monomial, hence virtually abelian.

    Each generator g is written as P_g D_g with P_g a permutation matrix
    (column j goes to row perm[j]) and D_g diagonal. None if some generator
    is not monomial.
    """
    gens = list(generators)
    parts = []
    for g in gens:
        p = g.monomial_parts()
        if p is None:
            return None
        parts.append(p)
    reassembly = all(
        CycMatrix.monomial(perm) @ CycMatrix.diag(phases) == g for g, (perm, phases) in zip(gens, parts)
    )
    homom = True
    for a, (pa, _) in zip(gens, parts):
        for b, (pb, _) in zip(gens, parts):
            prod = (a @ b).monomial_parts()
            if prod is None or prod[0] != [pa[j] for j in pb]:
                homom = False
    order = permutation_group_order([p for p, _ in parts])
    dim = gens[0].rows if gens else 0
    return VirtAbelianCert(order, dim, parts, reassembly, homom)


# ---------------------------------------------------------------------------
# braid relations


@dataclass
class BraidRelationReport:
    holds: bool
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"holds": self.holds, "failures": [list(f) for f in self.failures]}


def braid_relation_check(generators) -> BraidRelationReport:
    """g_i g_{i+1} g_i = g_{i+1} g_i g_{i+1} and g_i g_j = g_j g_i for |i - j| > 1.

    Failures are reported as ``(kind, i, j)`` with 1-based generator indices.
    """
    g = list(generators)
    fails = []
    for i in range(len(g) - 1):
        if g[i] @ g[i + 1] @ g[i] != g[i + 1] @ g[i] @ g[i + 1]:
            fails.append(("braid", i + 1, i + 2))
    for i in range(len(g)):
        for j in range(i + 2, len(g)):
            if g[i] @ g[j] != g[j] @ g[i]:
                fails.append(("commute", i + 1, j + 1))
    return BraidRelationReport(not fails, fails)


def discussion_example(k: int) -> list[CycMatrix]:
    """Two 3x3 monomial matrices giving a B_3 representation, at x = zeta_k."""
    if k < 1:
        raise ValueError("k must be positive")
    x = make_root(1, k)
    xi = x.inverse()
    s1 = CycMatrix.from_rows([[0, x, 0], [x, 0, 0], [0, 0, xi * xi]])
    s2 = CycMatrix.from_rows([[xi * xi, 0, 0], [0, 0, x * x], [0, 1, 0]])
    return [s1, s2]
