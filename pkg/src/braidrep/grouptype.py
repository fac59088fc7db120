"""Group-type braided vector spaces.

Covers set-theoretic solutions of the braid equation with diagonal phase
twists, Yetter-Drinfeld braidings over finite groups, and the twisted
coefficients gamma and mu attached to a 3-cocycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bvs import BVS, check_ybe
from .cyclo import CycMatrix, CycNum, as_cycnum, kron, make_root
from .errors import AxiomViolation, InvariantError, TwistBreaksYBE, YBEFails

# ---------------------------------------------------------------------------
# finite groups


class FiniteGroup:
    """A finite group given by its Cayley table on elements 0..order-1."""

    def __init__(self, table, names=None):
        table = [list(map(int, row)) for row in table]
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise InvariantError("square table", "Cayley table must be square and non-empty")
        if any(not 0 <= x < n for row in table for x in row):
            raise InvariantError("closure", "table entries out of range")
        ident = next((e for e in range(n) if all(table[e][x] == x == table[x][e] for x in range(n))), None)
        if ident is None:
            raise InvariantError("identity", "no two-sided identity")
        inverse = []
        for x in range(n):
            y = next((y for y in range(n) if table[x][y] == ident == table[y][x]), None)
            if y is None:
                raise InvariantError("inverses", f"element {x} has no inverse")
            inverse.append(y)
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise InvariantError("associativity", f"fails at {(a, b, c)}")
        self.order = n
        self.table = tuple(tuple(row) for row in table)
        self.identity = ident
        self.inverse = tuple(inverse)
        self.names = list(names) if names else [str(x) for x in range(n)]

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse[a]

    def conj(self, a, b):
        """a b a^-1."""
        return self.table[self.table[a][b]][self.inverse[a]]

    def conjugacy_class(self, g):
        return sorted({self.conj(x, g) for x in range(self.order)})

    def is_abelian(self):
        return all(self.table[a][b] == self.table[b][a] for a in range(self.order) for b in range(a))

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    @classmethod
    def cyclic(cls, n):
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def from_permutations(cls, perms):
        """Group of the given permutations (tuples), composed as (p*q)(x) = p(q(x))."""
        perms = [tuple(p) for p in perms]
        index = {p: k for k, p in enumerate(perms)}
        table = [[index[tuple(p[x] for x in q)] for q in perms] for p in perms]
        names = ["".join(map(str, p)) for p in perms]
        return cls(table, names)

    @classmethod
    def symmetric(cls, k):
        return cls.from_permutations(sorted(itertools.permutations(range(k))))

    @classmethod
    def by_name(cls, name):
        """``Z<n>``, ``S<k>`` or ``trivial``."""
        name = name.strip()
        if name.lower() == "trivial":
            return cls.cyclic(1)
        if name[:1] in "ZzCc" and name[1:].isdigit():
            return cls.cyclic(int(name[1:]))
        if name[:1] in "Ss" and name[1:].isdigit():
            return cls.symmetric(int(name[1:]))
        raise ValueError(f"unknown group name {name!r}")

    def to_json(self):
        return {"order": self.order, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, obj):
        table = obj["table"]
        if int(obj.get("order", len(table))) != len(table):
            raise InvariantError("order", "declared order does not match the table")
        return cls(table)


# ---------------------------------------------------------------------------
# set-theoretic solutions


class SetSolution:
    """A map S: X x X -> X x X on X = {0..size-1}, stored as ``S[x][y] = (s1, s2)``."""

    def __init__(self, size, S):
        S = [[tuple(map(int, pair)) for pair in row] for row in S]
        if len(S) != size or any(len(row) != size for row in S):
            raise InvariantError("shape", f"table must be {size}x{size}")
        if any(len(p) != 2 or not all(0 <= v < size for v in p) for row in S for p in row):
            raise InvariantError("range", "images must be pairs of elements of X")
        self.size = size
        self.S = tuple(tuple(row) for row in S)

    def __call__(self, x, y):
        return self.S[x][y]

    def __eq__(self, other):
        return isinstance(other, SetSolution) and self.S == other.S

    def is_bijective(self):
        return len({p for row in self.S for p in row}) == self.size**2

    @classmethod
    def flip(cls, n):
        return cls(n, [[(y, x) for y in range(n)] for x in range(n)])

    @classmethod
    def identity(cls, n):
        return cls(n, [[(x, y) for y in range(n)] for x in range(n)])

    @classmethod
    def conjugation(cls, G: FiniteGroup, elements=None):
        """S(x, y) = (x y x^-1, x) on a conjugation-closed subset of G."""
        elements = list(range(G.order)) if elements is None else sorted(elements)
        pos = {g: k for k, g in enumerate(elements)}
        try:
            S = [[(pos[G.conj(x, y)], pos[x]) for y in elements] for x in elements]
        except KeyError:
            raise InvariantError("closure", "subset is not closed under conjugation") from None
        return cls(len(elements), S)

    def to_json(self):
        return {"size": self.size, "S": [[list(p) for p in row] for row in self.S]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["size"]), obj["S"])


@dataclass
class SetCheckReport:
    holds: bool
    bijective: bool
    first_failure: tuple[int, int, int] | None = None


def check_set_theoretic(s: SetSolution) -> SetCheckReport:
    """Braid equation (S x id)(id x S)(S x id) = (id x S)(S x id)(id x S) on X^3."""

    def s12(t):
        a, b = s(t[0], t[1])
        return (a, b, t[2])

    def s23(t):
        a, b = s(t[1], t[2])
        return (t[0], a, b)

    bij = s.is_bijective()
    for t in itertools.product(range(s.size), repeat=3):
        if s12(s23(s12(t))) != s23(s12(s23(t))):
            return SetCheckReport(False, bij, t)
    return SetCheckReport(bij, bij, None)


class PhaseTwist:
    """Root-of-unity phases q_{x,y} multiplying the linearized solution."""

    def __init__(self, phases):
        phases = [[as_cycnum(v) for v in row] for row in phases]
        for x, row in enumerate(phases):
            for y, v in enumerate(row):
                if v.root_of_unity() is None:
                    raise InvariantError("root of unity", f"phase at {(x, y)} is {v!r}")
        self.phases = phases

    @property
    def size(self):
        return len(self.phases)

    @classmethod
    def trivial(cls, n):
        return cls([[1] * n for _ in range(n)])

    @classmethod
    def from_exponents(cls, exps, N):
        """phases[x][y] = zeta_N^exps[x][y]."""
        return cls([[make_root(k, N) for k in row] for row in exps])

    def __eq__(self, other):
        return isinstance(other, PhaseTwist) and self.phases == other.phases

    def to_json(self):
        out = []
        for row in self.phases:
            out_row = []
            for v in row:
                k, N = v.root_of_unity()
                out_row.append({"k": k, "N": N})
            out.append(out_row)
        return {"phases": out}

    @classmethod
    def from_json(cls, obj):
        """Entries are ``{"k", "N"}`` for zeta_N^k, or a general ``{"N", "coeffs"}`` number."""

        def entry(e):
            if "coeffs" in e:
                return CycNum.from_json(e)
            return make_root(int(e["k"]), int(e["N"]))

        return cls([[entry(e) for e in row] for row in obj["phases"]])


def _triple(index, d):
    return (index // (d * d), (index // d) % d, index % d)


def linearize(s: SetSolution, t: PhaseTwist | None = None) -> BVS:
    """c(v_x (x) v_y) = q_{x,y} v_{s1(x,y)} (x) v_{s2(x,y)}."""
    n = s.size
    t = PhaseTwist.trivial(n) if t is None else t
    if t.size != n:
        raise InvariantError("shape", "twist and solution sizes differ")
    entries = {}
    for x in range(n):
        for y in range(n):
            a, b = s(x, y)
            entries[(a * n + b, x * n + y)] = t.phases[x][y]
    c = CycMatrix.from_dict(n * n, n * n, entries)
    bvs = BVS(n, c)
    rep = check_ybe(bvs)
    if not rep.holds:
        raise TwistBreaksYBE("twisted solution violates the braid equation", _triple(rep.first_discrepancy[1], n))
    return bvs


# ---------------------------------------------------------------------------
# Yetter-Drinfeld modules


class YDModule:
    """A G-graded space with a G-action given by one matrix per group element.

    ``grading[j]`` is the degree (group element) of basis vector j.
    """

    def __init__(self, group: FiniteGroup, grading, action):
        self.group = group
        self.grading = [int(g) for g in grading]
        self.action = list(action)
        d = len(self.grading)
        if len(self.action) != group.order:
            raise InvariantError("action", "need one matrix per group element")
        if any(a.shape != (d, d) for a in self.action):
            raise InvariantError("action", f"action matrices must be {d}x{d}")

    @property
    def dim(self):
        return len(self.grading)

    def support(self):
        return sorted(set(self.grading))


def conjugation_module(G: FiniteGroup, elements=None) -> YDModule:
    """Span of a conjugation-closed set of elements, graded by themselves, acted on by conjugation."""
    elements = list(range(G.order)) if elements is None else sorted(elements)
    pos = {g: k for k, g in enumerate(elements)}
    action = []
    for s in range(G.order):
        try:
            perm = [pos[G.conj(s, g)] for g in elements]
        except KeyError:
            raise InvariantError("closure", "subset is not closed under conjugation") from None
        action.append(CycMatrix.monomial(perm))
    return YDModule(G, elements, action)


def yd_axiom_failures(v: YDModule):
    """Untwisted YD axioms: grading compatibility and (st) = s(t)."""
    G = v.group
    out = []
    for s in range(G.order):
        for (i, j) in v.action[s].to_dict():
            if v.grading[i] != G.conj(s, v.grading[j]):
                out.append(("grading", s, j))
                break
    for s in range(G.order):
        for t in range(G.order):
            if v.action[G.mul(s, t)] != v.action[s] @ v.action[t]:
                out.append(("representation", s, t))
    if not v.action[G.identity].is_identity():
        out.append(("identity", G.identity))
    return out


def yd_braiding(v: YDModule) -> BVS:
    """c(v_i (x) v_j) = (deg v_i) . v_j (x) v_i."""
    failures = yd_axiom_failures(v)
    if failures:
        raise AxiomViolation(f"not a Yetter-Drinfeld module: {failures[0]}")
    d = v.dim
    entries = {}
    for i in range(d):
        A = v.action[v.grading[i]]
        for (k, j), val in A.to_dict().items():
            entries[(k * d + i, i * d + j)] = val
    bvs = BVS(d, CycMatrix.from_dict(d * d, d * d, entries))
    rep = check_ybe(bvs)
    if not rep.holds:
        raise YBEFails("YD braiding violates the braid equation", _triple(rep.first_discrepancy[1], d))
    return bvs


def faithfulness_report(v: YDModule) -> dict:
    """Diagnostics only: is the action faithful, and does the support generate G?"""
    G = v.group
    kernel = [s for s in range(G.order) if v.action[s].is_identity()]
    generated = {G.identity}
    frontier = list(generated)
    support = v.support()
    while frontier:
        x = frontier.pop()
        for g in support:
            y = G.mul(x, g)
            if y not in generated:
                generated.add(y)
                frontier.append(y)
    return {"faithful": len(kernel) == 1, "support_generates": len(generated) == G.order}


def bvs_from_group_type_data(generators, dim: int) -> BVS:
    """c(x_i (x) z) = g_i(z) (x) x_i for a braided basis x_1..x_d."""
    generators = list(generators)
    if len(generators) != dim:
        raise InvariantError("shape", f"need {dim} operators g_i")
    entries = {}
    for i, g in enumerate(generators):
        if g.shape != (dim, dim):
            raise InvariantError("shape", f"g_{i + 1} must be {dim}x{dim}")
        for (k, j), val in g.to_dict().items():
            entries[(k * dim + i, i * dim + j)] = val
    bvs = BVS(dim, CycMatrix.from_dict(dim * dim, dim * dim, entries))
    rep = check_ybe(bvs)
    if not rep.holds:
        raise YBEFails("group-type data violates the braid equation", _triple(rep.first_discrepancy[1], dim))
    return bvs


# ---------------------------------------------------------------------------
# 3-cocycles and twisted coefficients


@dataclass
class CocycleReport:
    holds: bool
    normalized: bool
    first_failure: tuple | None = None
    checked: int = 0


class Cocycle3:
    """A normalized U(1)-valued 3-cocycle on a finite group; construction verifies both."""

    def __init__(self, group: FiniteGroup, values):
        self.group = group
        n = group.order
        self.values = [[[as_cycnum(values[a][b][c]) for c in range(n)] for b in range(n)] for a in range(n)]
        rep = check_cocycle(self)
        if not rep.normalized:
            raise InvariantError("normalized", "omega must be 1 when an argument is the identity")
        if not rep.holds:
            raise InvariantError("cocycle identity", f"fails at {rep.first_failure}")

    def __call__(self, a, b, c):
        return self.values[a][b][c]

    @classmethod
    def trivial(cls, group):
        n = group.order
        return cls(group, [[[1] * n for _ in range(n)] for _ in range(n)])

    def is_trivial(self):
        return all(v == 1 for plane in self.values for row in plane for v in row)


def check_cocycle(w: Cocycle3) -> CocycleReport:
    """w(b,c,d) w(a,bc,d) w(a,b,c) = w(ab,c,d) w(a,b,cd) for all quadruples."""
    G = w.group
    e = G.identity
    normalized = all(
        w(a, b, c) == 1
        for a, b, c in itertools.product(range(G.order), repeat=3)
        if e in (a, b, c)
    )
    count = 0
    for a, b, c, d in itertools.product(range(G.order), repeat=4):
        count += 1
        lhs = w(b, c, d) * w(a, G.mul(b, c), d) * w(a, b, c)
        rhs = w(G.mul(a, b), c, d) * w(a, b, G.mul(c, d))
        if lhs != rhs:
            return CocycleReport(False, normalized, (a, b, c, d), count)
    return CocycleReport(True, normalized, None, count)


def cyclic_3cocycle(n: int, s: int) -> Cocycle3:
    """w_s(a,b,c) = zeta_{n^2}^{s a (b + c - [b+c]_n)} on Z/n."""
    if n < 1:
        raise ValueError("n must be positive")
    G = FiniteGroup.cyclic(n)
    s %= n
    vals = [
        [[make_root(s * a * (b + c - (b + c) % n), n * n) for c in range(n)] for b in range(n)]
        for a in range(n)
    ]
    return Cocycle3(G, vals)


def gamma_coeff(w: Cocycle3, s, t, r) -> CycNum:
    """gamma_{s,t}(r) = w(s,t,r) w(st r (st)^-1, s, t) / w(s, t r t^-1, t)."""
    G = w.group
    st = G.mul(s, t)
    return w(s, t, r) * w(G.conj(st, r), s, t) / w(s, G.conj(t, r), t)


def mu_coeff(w: Cocycle3, s, t, r) -> CycNum:
    """mu_s(t, r) = w(s t s^-1, s, r) / (w(s t s^-1, s r s^-1, s) w(s, t, r))."""
    G = w.group
    sts = G.conj(s, t)
    return w(sts, s, r) / (w(sts, G.conj(s, r), s) * w(s, t, r))


@dataclass
class TwistedActionReport:
    holds: bool
    grading_ok: bool
    action_failures: list = field(default_factory=list)
    tensor_failures: list = field(default_factory=list)


def _twisted_axiom_failures(G, grading, action, w):
    out = []
    d = len(grading)
    for s in range(G.order):
        for t in range(G.order):
            lhs = action[G.mul(s, t)]
            prod = action[s] @ action[t]
            for j in range(d):
                g = gamma_coeff(w, s, t, grading[j])
                col_l = {i: v for (i, jj), v in lhs.to_dict().items() if jj == j}
                col_r = {i: v * g for (i, jj), v in prod.to_dict().items() if jj == j}
                if col_l != col_r:
                    out.append((s, t, j))
    return out


def _grading_ok(G, grading, action):
    for s in range(G.order):
        for (i, j) in action[s].to_dict():
            if grading[i] != G.conj(s, grading[j]):
                return False
    return True


def check_twisted_action(v: YDModule, w: Cocycle3) -> TwistedActionReport:
    """Verify (st) v_r = gamma_{s,t}(r) s(t v_r) on V and on V (x) V.

    On V (x) V the action is s(v_t (x) w_r) = mu_s(t, r) s v_t (x) s w_r with the
    tensor grading deg(v (x) w) = deg(v) deg(w).
    """
    G = v.group
    if w.group != G:
        raise InvariantError("group", "module and cocycle live on different groups")
    grading_ok = _grading_ok(G, v.grading, v.action)
    action_failures = _twisted_axiom_failures(G, v.grading, v.action, w)
    d = v.dim
    grading2 = [G.mul(v.grading[i], v.grading[j]) for i in range(d) for j in range(d)]
    action2 = []
    for s in range(G.order):
        mus = [mu_coeff(w, s, v.grading[i], v.grading[j]) for i in range(d) for j in range(d)]
        action2.append(kron(v.action[s], v.action[s]) @ CycMatrix.diag(mus))
    tensor_failures = _twisted_axiom_failures(G, grading2, action2, w)
    grading_ok = grading_ok and _grading_ok(G, grading2, action2)
    holds = grading_ok and not action_failures and not tensor_failures
    return TwistedActionReport(holds, grading_ok, action_failures, tensor_failures)


def one_dim_twisted_module(w: Cocycle3, degree: int):
    """Solve for a 1-dimensional twisted module of the given degree over Z/n.

    Writing lambda(k) for the scalar action of k, the axiom with s = 1 forces
    lambda(k) = lambda(1)^k prod_{j<k} gamma_{1,j}(degree), and lambda(n) = 1
    then forces lambda(1)^n = (prod_{j=1}^{n-1} gamma_{1,j}(degree))^-1.
    Returns the module and that constraint's right-hand side.
    """
    G = w.group
    n = G.order
    if G != FiniteGroup.cyclic(n):
        raise ValueError("only cyclic groups Z/n with generator 1 are supported")
    prod = CycNum.from_rational(1)
    for j in range(1, n):
        prod = prod * gamma_coeff(w, 1 % n, j, degree)
    rhs = prod.inverse()
    k, M = rhs.root_of_unity()
    t = make_root(k, n * M)
    lam = [CycNum.from_rational(1)]
    for j in range(1, n):
        lam.append(lam[-1] * t * gamma_coeff(w, 1 % n, j - 1, degree) if j > 1 else t)
    action = [CycMatrix.diag([x]) for x in lam]
    return YDModule(G, [degree], action), rhs


def monomial_check(b: BVS) -> bool:
    """Every column of c has one nonzero entry, and it is a root of unity."""
    parts = b.c.monomial_parts()
    return parts is not None and all(p.root_of_unity() is not None for p in parts[1])
