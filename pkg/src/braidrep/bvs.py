"""Braided vector spaces, braid words and the representations they induce.

Tensor legs are indexed most-significant first: the basis vector
``e_{i_1} (x) ... (x) e_{i_n}`` has index ``sum_k i_k * d**(n - k)``, which is
the row ordering produced by :func:`braidrep.cyclo.kron`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cyclo import CycMatrix, kron
from .errors import IndexOutOfRange, NotInvertible, ParseError, ShapeMismatch, SizeGuard

MAX_TENSOR_DIM = 4096


class BVS:
    """A braided vector space: dimension ``d`` and an invertible ``c`` on V (x) V.

    ``unitary`` may be passed as a claim (verified) or left as None to detect it.
    """

    def __init__(self, dim: int, c: CycMatrix, unitary: bool | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if c.shape != (dim * dim, dim * dim):
            raise ShapeMismatch(f"braiding must be {dim * dim}x{dim * dim}, got {c.shape}")
        is_unitary = c.is_unitary()
        if unitary and not is_unitary:
            raise ValueError("braiding tagged unitary but c c^* != I")
        if is_unitary:
            c_inv = c.adjoint()
        else:
            try:
                c_inv = c.inverse()
            except NotInvertible:
                raise NotInvertible("braiding is not invertible") from None
        self.dim = dim
        self.c = c
        self.c_inv = c_inv
        self.unitary = is_unitary

    def __repr__(self):
        return f"BVS(dim={self.dim}, unitary={self.unitary}, N={self.c.N})"

    def __eq__(self, other):
        if not isinstance(other, BVS):
            return NotImplemented
        return self.dim == other.dim and self.c == other.c

    def to_json(self):
        return {"dim": self.dim, "c": self.c.to_json(), "unitary": self.unitary}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["dim"]), CycMatrix.from_json(obj["c"]), bool(obj.get("unitary")) or None)


@dataclass(frozen=True)
class BraidWord:
    """A word in the braid generators; letter ``+i`` is sigma_i, ``-i`` its inverse."""

    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise IndexOutOfRange("a braid needs at least one strand")
        for x in self.letters:
            if x == 0 or abs(x) > self.strands - 1:
                raise IndexOutOfRange(f"generator {x} out of range for {self.strands} strands")

    def __add__(self, other):
        if not isinstance(other, BraidWord):
            return NotImplemented
        return BraidWord(max(self.strands, other.strands), self.letters + other.letters)

    def inverse(self):
        return BraidWord(self.strands, tuple(-x for x in reversed(self.letters)))

    def __str__(self):
        return " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in self.letters)

    def __len__(self):
        return len(self.letters)


_TOKEN = re.compile(r"\S+")
_GEN = re.compile(r"^s(\d+)(\^(-?1))?$")
_INT = re.compile(r"^[+-]?\d+$")


def parse_braid_word(text: str, strands: int | None = None) -> BraidWord:
    """Parse ``"s1 s2^-1 s1"`` or ``"1 -2 1"`` (forms may be mixed).

    The strand count defaults to one more than the largest index.
    """
    letters = []
    for m in _TOKEN.finditer(text):
        tok, pos = m.group(), m.start()
        g = _GEN.match(tok)
        if g:
            idx = int(g.group(1))
            sign = -1 if g.group(3) == "-1" else 1
        elif _INT.match(tok):
            val = int(tok)
            idx, sign = abs(val), (-1 if tok.startswith("-") else 1)
        else:
            raise ParseError(f"unrecognised braid token {tok!r}", pos)
        if idx == 0:
            raise IndexOutOfRange(f"generator index 0 at position {pos}; generators start at 1")
        letters.append(sign * idx)
    needed = 1 + max((abs(x) for x in letters), default=0)
    if strands is None:
        strands = needed
    elif strands < needed:
        raise IndexOutOfRange(f"word needs {needed} strands, {strands} given")
    return BraidWord(strands, tuple(letters))


@dataclass
class YBEReport:
    holds: bool
    first_discrepancy: tuple[int, int] | None = None
    details: dict = field(default_factory=dict)


def _first_difference(a: CycMatrix, b: CycMatrix):
    diff = (a - b).to_dict()
    return min(diff) if diff else None


def check_ybe(b: BVS) -> YBEReport:
    """Compare (c x I)(I x c)(c x I) with (I x c)(c x I)(I x c) on V^{(x)3}."""
    eye = CycMatrix.identity(b.dim)
    c12 = kron(b.c, eye)
    c23 = kron(eye, b.c)
    lhs = c12 @ c23 @ c12
    rhs = c23 @ c12 @ c23
    where = _first_difference(lhs, rhs)
    return YBEReport(holds=where is None, first_discrepancy=where)


def check_unitary(b: BVS) -> bool:
    return b.c.is_unitary()


def operator_order(A: CycMatrix, budget: int = 10_000) -> int | None:
    """Least k <= budget with A^k = I, or None when the budget is exhausted."""
    if not A.is_square():
        raise ShapeMismatch("order of a non-square matrix")
    if not A.is_invertible():
        raise NotInvertible("operator_order needs an invertible matrix")
    eye = CycMatrix.identity(A.rows, A.N)
    power = A
    for k in range(1, budget + 1):
        if power == eye:
            return k
        power = power @ A
    return None


def _check_size(d, n, override):
    if not override and d**n > MAX_TENSOR_DIM:
        raise SizeGuard(f"dimension {d}^{n} = {d**n} exceeds {MAX_TENSOR_DIM}; pass override=True")


def _leg_operator(op: CycMatrix, d: int, n: int, i: int) -> CycMatrix:
    """I^{(i-1)} (x) op (x) I^{(n-i-1)} for an operator on two adjacent legs."""
    out = op
    if i > 1:
        out = kron(CycMatrix.identity(d ** (i - 1)), out)
    if n - i - 1 > 0:
        out = kron(out, CycMatrix.identity(d ** (n - i - 1)))
    return out


def braid_generator(b: BVS, n: int, i: int, *, inverse: bool = False, override: bool = False) -> CycMatrix:
    """The image of sigma_i (or its inverse) acting on V^{(x)n}."""
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange(f"generator {i} out of range for {n} strands")
    _check_size(b.dim, n, override)
    return _leg_operator(b.c_inv if inverse else b.c, b.dim, n, i)


def braid_generators(b: BVS, n: int, *, override: bool = False) -> list[CycMatrix]:
    return [braid_generator(b, n, i, override=override) for i in range(1, n)]


def eval_braid_word(b: BVS, w: BraidWord, *, override: bool = False) -> CycMatrix:
    """Ordered product of generator images; the empty word maps to the identity."""
    _check_size(b.dim, w.strands, override)
    cache = {}
    out = CycMatrix.identity(b.dim**w.strands, b.c.N)
    for x in w.letters:
        if x not in cache:
            cache[x] = braid_generator(b, w.strands, abs(x), inverse=x < 0, override=override)
        out = out @ cache[x]
    return out


def flip_bvs(d: int) -> BVS:
    """The symmetric braiding c(x (x) y) = y (x) x."""
    perm = [(j % d) * d + j // d for j in range(d * d)]
    return BVS(d, CycMatrix.monomial(perm), unitary=True)
