"""Engine for explicitly enumerated finite groups (orders up to a few
thousand): closure, structural subgroups, predicates, quotients,
isomorphism testing, reference constructions, split-extension search.

Element objects only need *, .inv(), hashing, equality and a total
order; the engine is generic over the element type so that matrix
groups, permutation groups, direct products and quotients all go
through the same code paths.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dfield
from itertools import combinations, product as iproduct
from math import gcd

from .gf64 import GF64
from .psu import PElement, pgenerators


class ClosureCapExceeded(RuntimeError):
    """Generated subgroup is larger than the configured cap."""


# ---------------------------------------------------------------------------
# element types for reference groups


class Perm:
    """Permutation of range(n); p*q applies p first, then q."""

    __slots__ = ("im",)

    def __init__(self, im):
        self.im = tuple(im)

    def __mul__(self, other: "Perm") -> "Perm":
        oi = other.im
        return Perm(tuple(oi[i] for i in self.im))

    def inv(self) -> "Perm":
        r = [0] * len(self.im)
        for i, j in enumerate(self.im):
            r[j] = i
        return Perm(r)

    def __eq__(self, other):
        return isinstance(other, Perm) and self.im == other.im

    def __hash__(self):
        return hash(self.im)

    def __lt__(self, other: "Perm"):
        return self.im < other.im

    def __repr__(self):
        return f"Perm{self.im}"


class DPEl:
    """Element of a direct product, componentwise multiplication."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = tuple(c)

    def __mul__(self, other: "DPEl") -> "DPEl":
        return DPEl(tuple(a * b for a, b in zip(self.c, other.c)))

    def inv(self) -> "DPEl":
        return DPEl(tuple(a.inv() for a in self.c))

    def __eq__(self, other):
        return isinstance(other, DPEl) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __lt__(self, other: "DPEl"):
        for a, b in zip(self.c, other.c):
            if a != b:
                return a < b
        return False


class SP2El:
    """Element (i, j) of the extraspecial group of order 27 and exponent 9,
    realized on Z9 x Z3 with (i,j)(k,l) = (i + 4^j k mod 9, j + l mod 3)."""

    __slots__ = ("i", "j")
    _POW4 = (1, 4, 7)  # 4^j mod 9

    def __init__(self, i, j):
        self.i = i % 9
        self.j = j % 3

    def __mul__(self, other: "SP2El") -> "SP2El":
        return SP2El(self.i + self._POW4[self.j] * other.i, self.j + other.j)

    def inv(self) -> "SP2El":
        nj = (-self.j) % 3
        return SP2El(-self._POW4[nj] * self.i, nj)

    def __eq__(self, other):
        return isinstance(other, SP2El) and (self.i, self.j) == (other.i, other.j)

    def __hash__(self):
        return hash((self.i, self.j))

    def __lt__(self, other: "SP2El"):
        return (self.i, self.j) < (other.i, other.j)

    def __repr__(self):
        return f"SP2El({self.i},{self.j})"


class QEl:
    """Coset of a normal subgroup, stored by its minimal representative.

    `table` maps every element of the parent group to its coset
    representative, so multiplication is one parent product plus a
    lookup.
    """

    __slots__ = ("rep", "table")

    def __init__(self, rep, table):
        self.rep = rep
        self.table = table

    def __mul__(self, other: "QEl") -> "QEl":
        return QEl(self.table[self.rep * other.rep], self.table)

    def inv(self) -> "QEl":
        return QEl(self.table[self.rep.inv()], self.table)

    def __eq__(self, other):
        return isinstance(other, QEl) and self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __lt__(self, other: "QEl"):
        return self.rep < other.rep


# ---------------------------------------------------------------------------
# small helpers


def _close(gens, identity):
    """Subgroup generated by gens, as a set (finite, so the product
    closure already contains inverses)."""
    els = {identity}
    frontier = [identity]
    gens = [g for g in gens if g != identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in els:
                    els.add(y)
                    nxt.append(y)
        frontier = nxt
    return els


def _pow(x, k, identity):
    r = identity
    b = x
    while k:
        if k & 1:
            r = r * b
        b = b * b
        k >>= 1
    return r


def _pval(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------


class SmallGroup:
    """An explicitly enumerated group.

    `elems` is in closure discovery order with elems[0] the identity.
    When built by generate(), `parent`/`genidx` record the BFS tree
    (elems[i] = elems[parent[i]] * gens[genidx[i]]), which downstream
    code uses to evaluate vertex actions incrementally.
    """

    def __init__(self, elems, gens, identity, parent=None, genidx=None, name=""):
        self.elems = list(elems)
        self.gens = list(gens)
        self.identity = identity
        self.parent = parent
        self.genidx = genidx
        self.name = name
        self.eset = frozenset(self.elems)
        self._orders: dict = {}
        self._classes: dict | None = None
        self._class_list: list | None = None
        self._sorted: list | None = None

    # -- construction -----------------------------------------------------

    @staticmethod
    def generate(gens, cap: int = 2_000_000, name: str = "") -> "SmallGroup":
        gens = list(gens)
        if not gens:
            raise ValueError("need at least one generator")
        e = gens[0] * gens[0].inv()
        elems = [e]
        seen = {e: 0}
        parent = [0]
        genidx = [-1]
        frontier = [0]
        while frontier:
            nxt = []
            for pi in frontier:
                x = elems[pi]
                for gi, g in enumerate(gens):
                    y = x * g
                    if y not in seen:
                        if len(elems) >= cap:
                            raise ClosureCapExceeded(f"closure exceeded cap {cap}")
                        seen[y] = len(elems)
                        elems.append(y)
                        parent.append(pi)
                        genidx.append(gi)
                        nxt.append(len(elems) - 1)
            frontier = nxt
        return SmallGroup(elems, gens, e, parent, genidx, name)

    def subgroup(self, elements, name: str = "") -> "SmallGroup":
        """Subgroup from an explicit (closed) element subset; generators
        are found lazily on first use."""
        els = sorted(set(elements))
        ident = self.identity
        return SmallGroup([ident] + [x for x in els if x != ident], [], ident, name=name)

    def regenerate(self) -> "SmallGroup":
        """Fresh closure from a generating set, restoring parent links."""
        g = SmallGroup.generate(self.gens_list(), name=self.name)
        assert g.eset == self.eset
        return g

    # -- basics -----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elems)

    def __len__(self):
        return len(self.elems)

    def __contains__(self, x) -> bool:
        return x in self.eset

    def __iter__(self):
        return iter(self.elems)

    def sorted_elems(self) -> list:
        if self._sorted is None:
            self._sorted = sorted(self.elems)
        return self._sorted

    def __le__(self, other: "SmallGroup") -> bool:
        return self.eset <= other.eset

    def same_set(self, other) -> bool:
        oset = other.eset if isinstance(other, SmallGroup) else frozenset(other)
        return self.eset == oset

    def element_order(self, x) -> int:
        o = self._orders.get(x)
        if o is None:
            r, o = x, 1
            while r != self.identity:
                r = r * x
                o += 1
            self._orders[x] = o
        return o

    def order_profile(self) -> Counter:
        return Counter(self.element_order(x) for x in self.elems)

    def exponent(self) -> int:
        e = 1
        for x in self.elems:
            o = self.element_order(x)
            e = e * o // gcd(e, o)
        return e

    def gens_list(self) -> list:
        if not self.gens:
            self.gens = self.generating_set()
        return self.gens

    def generating_set(self) -> list:
        """Small deterministic generating set: greedy over elements sorted
        by decreasing order."""
        if len(self.elems) == 1:
            return [self.identity]
        cand = sorted(self.elems, key=lambda x: (-self.element_order(x), x))
        gens: list = []
        span = {self.identity}
        for x in cand:
            if x in span:
                continue
            gens.append(x)
            span = _close(gens, self.identity)
            if len(span) == len(self.elems):
                return gens
        raise AssertionError("element set is not closed under multiplication")

    # -- predicates ---------------------------------------------------

    def is_abelian(self) -> bool:
        gens = self.gens_list()
        return all(a * b == b * a for a in gens for b in gens)

    def is_elementary_abelian(self, p: int) -> bool:
        return self.is_abelian() and all(
            self.element_order(x) in (1, p) for x in self.elems
        )

    def is_cyclic(self) -> bool:
        return any(self.element_order(x) == len(self.elems) for x in self.elems)

    def is_p_group(self, p: int) -> bool:
        n = len(self.elems)
        while n % p == 0:
            n //= p
        return n == 1

    def is_special(self, p: int) -> bool:
        """Z(G) = G' = Phi(G) for a p-group."""
        if not self.is_p_group(p):
            return False
        z = self.center()
        d = self.derived()
        f = self.frattini_p(p)
        return z.eset == d.eset == f.eset

    def is_extraspecial(self, p: int) -> bool:
        return self.is_special(p) and len(self.center()) == p

    def structure_predicates(self, p: int = 3) -> dict:
        return {
            "order": len(self.elems),
            "exponent": self.exponent(),
            "is_cyclic": self.is_cyclic(),
            "is_abelian": self.is_abelian(),
            "is_elementary_abelian": self.is_elementary_abelian(p),
            "is_special": self.is_special(p),
        }

    # -- structural subgroups -------------------------------------------

    def center(self) -> "SmallGroup":
        gens = self.gens_list()
        z = [x for x in self.elems if all(x * g == g * x for g in gens)]
        return self.subgroup(z, name=f"Z({self.name})" if self.name else "")

    def centralizer(self, xs) -> "SmallGroup":
        xs = list(xs)
        c = [g for g in self.elems if all(g * x == x * g for x in xs)]
        return self.subgroup(c)

    def normalizer(self, H: "SmallGroup") -> "SmallGroup":
        hgens = H.gens_list()
        out = []
        for g in self.elems:
            gi = g.inv()
            if all((gi * h * g) in H.eset for h in hgens):
                out.append(g)
        return self.subgroup(out)

    def is_normal(self, H: "SmallGroup") -> bool:
        return all(
            (g.inv() * h * g) in H.eset
            for g in self.gens_list()
            for h in H.gens_list()
        )

    def normal_closure(self, xs) -> "SmallGroup":
        gens = self.gens_list()
        seed = set(xs)
        frontier = list(seed)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = g.inv() * x * g
                    if y not in seed:
                        seed.add(y)
                        nxt.append(y)
            frontier = nxt
        return self.subgroup(_close(sorted(seed), self.identity))

    def derived(self) -> "SmallGroup":
        gens = self.gens_list()
        comms = {a.inv() * b.inv() * a * b for a in self.elems for b in gens}
        return self.normal_closure(comms)

    def frattini_p(self, p: int) -> "SmallGroup":
        """Phi(G) = G' <g^p> for a p-group."""
        if not self.is_p_group(p):
            raise ValueError("frattini_p is only used on p-groups here")
        d = self.derived()
        pw = {_pow(x, p, self.identity) for x in self.elems}
        return self.subgroup(_close(sorted(d.eset | pw), self.identity))

    def commutator_subgroup(self, X: "SmallGroup", Y: "SmallGroup") -> "SmallGroup":
        """[X, Y] for subgroups X, Y of self (commutators over all pairs,
        then product closure; the pair set is conjugation-closed enough
        because both conventions' commutators are mutually inverse)."""
        comms = {x.inv() * y.inv() * x * y for x in X.elems for y in Y.elems}
        return self.subgroup(_close(sorted(comms), self.identity))

    def intersect(self, other: "SmallGroup") -> "SmallGroup":
        return self.subgroup(self.eset & other.eset)

    def conjugate_set(self, g) -> frozenset:
        gi = g.inv()
        return frozenset(gi * h * g for h in self.elems)

    def conjugate(self, g, name: str = "") -> "SmallGroup":
        gi = g.inv()
        els = [gi * h * g for h in self.elems]
        return SmallGroup(
            [self.identity] + sorted(x for x in els if x != self.identity),
            [gi * h * g for h in self.gens] if self.gens else [],
            self.identity, name=name,
        )

    # -- Sylow machinery --------------------------------------------------

    def sylow(self, p: int) -> "SmallGroup":
        """One Sylow p-subgroup, grown greedily inside successive
        normalizers; deterministic because candidates are scanned in
        sorted order."""
        n = len(self.elems)
        target = p ** _pval(n, p)
        P = self.subgroup([self.identity])
        pgens: list = []
        while len(P) < target:
            N = self.normalizer(P) if pgens else self
            grown = False
            for x in N.sorted_elems():
                if x in P.eset:
                    continue
                o = self.element_order(x)
                if o == p ** _pval(o, p) and o > 1:
                    cand = _close(pgens + [x], self.identity)
                    if len(cand) % p == 0 and len(cand) == p ** _pval(len(cand), p):
                        pgens.append(x)
                        P = self.subgroup(cand)
                        grown = True
                        break
            if not grown:
                raise AssertionError("sylow growth stalled")
        return P

    def p_core(self, p: int) -> "SmallGroup":
        """O_p(G): intersection of all conjugates of one Sylow p-subgroup."""
        if len(self.elems) % p != 0:
            return self.subgroup([self.identity])
        P = self.sylow(p)
        gens = self.gens_list()
        core = set(P.eset)
        seen = {P.eset}
        frontier = [P.eset]
        while frontier and len(core) > 1:
            nxt = []
            for S in frontier:
                for g in gens:
                    gi = g.inv()
                    T = frozenset(gi * h * g for h in S)
                    if T not in seen:
                        seen.add(T)
                        nxt.append(T)
                        core &= T
            frontier = nxt
        return self.subgroup(_close(sorted(core), self.identity))

    # -- conjugacy classes ----------------------------------------------

    def conj_classes(self) -> list[frozenset]:
        if self._class_list is None:
            gens = self.gens_list()
            done = set()
            classes = []
            for g in self.sorted_elems():
                if g in done:
                    continue
                orb = {g}
                fr = [g]
                while fr:
                    nf = []
                    for x in fr:
                        for h in gens:
                            y = h.inv() * x * h
                            if y not in orb:
                                orb.add(y)
                                nf.append(y)
                    fr = nf
                classes.append(frozenset(orb))
                done |= orb
            self._class_list = classes
        return self._class_list

    def conj_class_invariants(self) -> dict:
        """Map element -> (order, class size); cached."""
        if self._classes is None:
            cls = {}
            for c in self.conj_classes():
                size = len(c)
                for x in c:
                    cls[x] = (self.element_order(x), size)
            self._classes = cls
        return self._classes

    def class_equation_ok(self) -> bool:
        """Classes partition G and the singletons are exactly the center."""
        classes = self.conj_classes()
        if sum(len(c) for c in classes) != len(self.elems):
            return False
        singles = {next(iter(c)) for c in classes if len(c) == 1}
        return singles == set(self.center().eset)

    # -- quotient ---------------------------------------------------------

    def quotient(self, N: "SmallGroup") -> "SmallGroup":
        """G/N as a group of canonical coset representatives."""
        if not self.is_normal(N):
            raise ValueError("quotient by a non-normal subgroup")
        table: dict = {}
        reps = []
        for g in self.sorted_elems():
            if g in table:
                continue
            coset = sorted(g * n for n in N.elems)
            rep = coset[0]
            reps.append(rep)
            for x in coset:
                table[x] = rep
        qels = [QEl(r, table) for r in reps]
        ident = QEl(table[self.identity], table)
        q = SmallGroup(
            [ident] + [x for x in qels if x != ident], [], ident,
            name=f"{self.name}/{N.name}" if self.name and N.name else "",
        )
        assert len(q) * len(N) == len(self.elems)
        return q


def direct_product(*groups: SmallGroup) -> SmallGroup:
    els = [DPEl(c) for c in iproduct(*(g.elems for g in groups))]
    ident = DPEl(tuple(g.identity for g in groups))
    gens = []
    for i, g in enumerate(groups):
        for x in g.gens_list():
            comp = [h.identity for h in groups]
            comp[i] = x
            gens.append(DPEl(comp))
    return SmallGroup([ident] + [x for x in els if x != ident], gens, ident)


# ---------------------------------------------------------------------------
# isomorphism testing


def _refined_invariants(G: SmallGroup) -> dict:
    """Per-element invariant labels: conjugacy class data sharpened by the
    labels of small powers, iterated to a fixed point.  Isomorphisms
    preserve these labels, so they are safe candidate filters."""
    inv = {}
    for g in G.elems:
        o, s = G.conj_class_invariants()[g]
        inv[g] = (o, s)
    for _ in range(3):
        nxt = {}
        for g in G.elems:
            g2 = g * g
            g3 = g2 * g
            nxt[g] = (inv[g], inv[g2], inv[g3])
        # compress labels to keep tuples small
        labels = {v: i for i, v in enumerate(sorted(set(nxt.values())))}
        new = {g: labels[v] for g, v in nxt.items()}
        if len(set(new.values())) == len(set(inv.values())):
            break
        # keep the original pair visible in the label for readability of
        # candidate filtering
        inv = {g: (inv[g][0] if isinstance(inv[g], tuple) else inv[g], new[g])
               for g in G.elems}
    return inv


def iso_check(G1: SmallGroup, G2: SmallGroup, witness: bool = False):
    """Backtracking isomorphism test, sound and complete at these orders.

    Candidate generator images are filtered by refined class invariants;
    partial maps are extended subgroup-by-subgroup so an inconsistent
    choice dies at the scale of the subgroup generated so far rather
    than of the whole group.  Returns bool, or (bool, map) with
    witness=True.
    """
    result = _iso_search(G1, G2)
    if witness:
        return result is not None, result
    return result is not None


def _iso_search(G1: SmallGroup, G2: SmallGroup):
    if len(G1) != len(G2):
        return None
    if G1.order_profile() != G2.order_profile():
        return None
    if len(G1) == 1:
        return {G1.identity: G2.identity}
    if G1.is_abelian() != G2.is_abelian():
        return None
    cls1 = G1.conj_class_invariants()
    cls2 = G2.conj_class_invariants()
    if Counter(cls1.values()) != Counter(cls2.values()):
        return None
    inv1 = _refined_invariants(G1)
    inv2 = _refined_invariants(G2)
    if Counter(inv1.values()) != Counter(inv2.values()):
        return None

    by_inv2: dict = {}
    for h in G2.sorted_elems():
        by_inv2.setdefault(inv2[h], []).append(h)

    # generating sequence of G1, greedily preferring elements with the
    # fewest candidate images (ties broken canonically)
    gens1: list = []
    span = {G1.identity}
    while len(span) < len(G1):
        best = None
        for g in G1.sorted_elems():
            if g in span:
                continue
            k = len(by_inv2.get(inv1[g], ()))
            if k == 0:
                return None
            if best is None or k < best[0]:
                best = (k, g)
        gens1.append(best[1])
        span = _close(gens1, G1.identity)
    n = len(G1)

    def extend(mapping, gens, imgs):
        """Grow the partial map over <gens>; None on any inconsistency."""
        m = dict(mapping)
        fr = list(m.keys())
        while fr:
            nf = []
            for x in fr:
                mx = m[x]
                for g, h in zip(gens, imgs):
                    y = x * g
                    my = mx * h
                    prev = m.get(y)
                    if prev is None:
                        m[y] = my
                        nf.append(y)
                    elif prev != my:
                        return None
            fr = nf
        if len(set(m.values())) != len(m):
            return None
        return m

    # Iterative DFS over candidate image tuples.  Composing a candidate
    # isomorphism with an inner automorphism of G2 is free, so the first
    # image ranges over one representative per conjugacy class, and
    # deeper candidates are reduced to orbit representatives under the
    # centralizer of the images already placed.  Pairwise product
    # invariants prefilter before the closure extension runs.
    stack = [({G1.identity: G2.identity}, [], G2.elems)]
    while stack:
        mapping, imgs, cent = stack.pop()
        i = len(imgs)
        if i == len(gens1):
            if len(mapping) != n:
                continue
            ok = True
            for x in G1.elems:
                mx = mapping[x]
                for g, h in zip(gens1, imgs):
                    if mapping[x * g] != mx * h:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return mapping
            continue
        g = gens1[i]
        cands = []
        seen: set = set()
        cpairs = [(c.inv(), c) for c in cent]
        for h in by_inv2[inv1[g]]:
            if h in seen:
                continue
            orbit = {ci * h * c for ci, c in cpairs}
            seen |= orbit
            fits = True
            for gj, hj in zip(gens1[:i], imgs):
                if inv1[gj * g] != inv2[hj * h] or inv1[g * gj] != inv2[h * hj]:
                    fits = False
                    break
            if fits:
                cands.append(h)
        for h in reversed(cands):
            m2 = extend(mapping, gens1[: i + 1], imgs + [h])
            if m2 is not None and len(m2) <= n:
                newcent = [c for c in cent if c * h == h * c]
                stack.append((m2, imgs + [h], newcent))
    return None


# ---------------------------------------------------------------------------
# split extension search


def is_split_extension(G: SmallGroup, N: SmallGroup, witness: bool = False):
    """True iff N has a complement in G: C <= G with C n N = 1, CN = G.

    Exhaustive over tuples of lifts of a generating set of G/N.
    Complete: a complement C maps isomorphically onto G/N, so the
    preimages in C of the chosen quotient generators form one of the
    enumerated tuples; the lift of a quotient element q may be
    restricted to lifts of order exactly ord(q) because C meets N
    trivially.
    """
    Q = G.quotient(N)
    if len(Q) == 1:
        triv = G.subgroup([G.identity])
        return (True, triv) if witness else True
    qgens = Q.generating_set()
    lifts = []
    for q in qgens:
        o = Q.element_order(q)
        coset = sorted(q.rep * x for x in N.elems)
        cand = [g for g in coset if G.element_order(g) == o]
        if not cand:
            return (False, None) if witness else False
        lifts.append(cand)
    target = len(Q)
    for tup in iproduct(*lifts):
        try:
            C = SmallGroup.generate(list(tup), cap=target)
        except ClosureCapExceeded:
            continue
        if len(C) == target and len(C.eset & N.eset) == 1:
            return (True, G.subgroup(C.eset)) if witness else True
    return (False, None) if witness else False


# ---------------------------------------------------------------------------
# reference groups


def sym_group(n: int) -> SmallGroup:
    cyc = Perm(tuple(list(range(1, n)) + [0]))
    tr = Perm(tuple([1, 0] + list(range(2, n))))
    return SmallGroup.generate([cyc, tr], name=f"Sym({n})")


def cyclic_group(n: int) -> SmallGroup:
    return SmallGroup.generate([Perm(tuple(list(range(1, n)) + [0]))], name=f"C{n}")


def dihedral_18() -> SmallGroup:
    r = Perm(tuple(list(range(1, 9)) + [0]))
    s = Perm(tuple((-i) % 9 for i in range(9)))
    return SmallGroup.generate([r, s], name="Dih(18)")


def agl1_group() -> SmallGroup:
    """AGL_1(3): affine maps x -> ax + b on GF(3), as perms of 3 points."""
    els = []
    for a in (1, 2):
        for b in range(3):
            els.append(Perm(tuple((a * x + b) % 3 for x in range(3))))
    ident = Perm((0, 1, 2))
    g = SmallGroup([ident] + [x for x in els if x != ident], [], ident, name="AGL1(3)")
    assert len(g) == 6
    return g


def _affine_perm(a, b, c, d, e, f, idx, pts) -> Perm:
    im = []
    for (x, y) in pts:
        im.append(idx[((a * x + b * y + e) % 3, (c * x + d * y + f) % 3)])
    return Perm(im)


@dataclass
class AffineRefs:
    """AGL_2(3) on the 9 affine points, with the distinguished Sylow-3
    subgroup S, V = O_3(AGL_2(3)), V0 = C_V(S) = Z(S), the normalizer
    AGL_2(3,S) and its two index-2 subgroups picked out by their action
    on V0 and V/V0."""

    agl: SmallGroup
    gl: SmallGroup
    syl3: SmallGroup
    v: SmallGroup
    v0: SmallGroup
    agl_s: SmallGroup
    sharp: SmallGroup
    star: SmallGroup


def affine_refs() -> AffineRefs:
    pts = [(x, y) for y in range(3) for x in range(3)]
    idx = {p: i for i, p in enumerate(pts)}
    els = []
    gl_els = []
    for a, b, c, d in iproduct(range(3), repeat=4):
        if (a * d - b * c) % 3 == 0:
            continue
        gl_els.append(_affine_perm(a, b, c, d, 0, 0, idx, pts))
        for e, f in iproduct(range(3), repeat=2):
            els.append(_affine_perm(a, b, c, d, e, f, idx, pts))
    ident = Perm(tuple(range(9)))
    agl = SmallGroup([ident] + [x for x in els if x != ident], [], ident, name="AGL2(3)")
    assert len(agl) == 432
    gl = agl.subgroup(gl_els, name="GL2(3)")
    assert len(gl) == 48

    t1 = _affine_perm(1, 0, 0, 1, 1, 0, idx, pts)
    t2 = _affine_perm(1, 0, 0, 1, 0, 1, idx, pts)
    v = agl.subgroup(_close([t1, t2], ident), name="V")
    u = _affine_perm(1, 1, 0, 1, 0, 0, idx, pts)
    syl3 = agl.subgroup(_close([t1, t2, u], ident), name="S")
    assert len(v) == 9 and len(syl3) == 27

    v0 = v.subgroup(
        [x for x in v.elems if all(x * s == s * x for s in syl3.elems)], name="V0"
    )
    assert v0.eset == syl3.center().eset and len(v0) == 3

    agl_s = agl.normalizer(syl3)
    agl_s.name = "AGL2(3,S)"
    assert len(agl_s) == 108

    sharp, star = _index2_variants(agl_s, syl3, v, v0)
    return AffineRefs(agl, gl, syl3, v, v0, agl_s, sharp, star)


def _index2_variants(agl_s, syl3, v, v0):
    """The unique subgroups # and * of index 2 in AGL_2(3,S): both factor
    as C_X(V0) C_X(V/V0); # centralizes V/V0 exactly on S and induces
    GL_1(3) on V0's side, * the other way around."""
    der = agl_s.derived()
    q = agl_s.quotient(der)
    assert q.is_abelian()
    half = len(q) // 2
    cand_sets = set()
    for r in range(1, len(q)):
        for comb in combinations(q.sorted_elems(), r):
            s = frozenset(_close(list(comb), q.identity))
            if len(s) == half:
                cand_sets.add(s)
    table = q.identity.table
    sharp = star = None
    for s in sorted(cand_sets, key=lambda fs: sorted(x.rep for x in fs)):
        reps = {x.rep for x in s}
        X = agl_s.subgroup([g for g in agl_s.elems if table[g] in reps])
        if len(X) != half * len(der) or not syl3.eset <= X.eset:
            continue
        c_v0 = X.centralizer(v0.elems)
        c_vq = X.subgroup(
            [x for x in X.elems
             if all((x.inv() * t * x) * t.inv() in v0.eset for t in v.elems)]
        )
        prod = {a * b for a in c_v0.elems for b in c_vq.elems}
        if prod != set(X.eset):
            continue
        if c_vq.eset == syl3.eset and len(c_v0) == 2 * len(syl3):
            assert sharp is None, "sharp subgroup not unique"
            sharp = X
        elif c_v0.eset == syl3.eset and len(c_vq) == 2 * len(syl3):
            assert star is None, "star subgroup not unique"
            star = X
    assert sharp is not None and star is not None and sharp.eset != star.eset
    sharp.name = "AGL2(3,S)#"
    star.name = "AGL2(3,S)*"
    return sharp, star


def sp2_group() -> SmallGroup:
    els = [SP2El(i, j) for j in range(3) for i in range(9)]
    ident = SP2El(0, 0)
    g = SmallGroup([ident] + [x for x in els if x != ident],
                   [SP2El(1, 0), SP2El(0, 1)], ident, name="SP2")
    assert len(g) == 27 and g.exponent() == 9 and g.is_extraspecial(3)
    return g


def pgl23_group(gl: SmallGroup) -> SmallGroup:
    z = gl.center()
    assert len(z) == 2
    q = gl.quotient(z)
    q.name = "PGL2(3)"
    return q


def reference_groups() -> dict[str, SmallGroup]:
    """All reference groups used by the structure and shape checks, with
    construction self-checks baked in."""
    aff = affine_refs()
    sym3 = sym_group(3)
    sym4 = sym_group(4)
    c2 = cyclic_group(2)
    c3 = cyclic_group(3)
    c9 = cyclic_group(9)
    c3xc3 = direct_product(c3, c3)
    dih18 = dihedral_18()
    refs = {
        "Sym3": sym3,
        "Sym4": sym4,
        "AGL13": agl1_group(),
        "GL23": aff.gl,
        "PGL23": pgl23_group(aff.gl),
        "AGL23": aff.agl,
        "AGL23S": aff.agl_s,
        "AGL23S_sharp": aff.sharp,
        "AGL23S_star": aff.star,
        "V": aff.v,
        "V0": aff.v0,
        "S_syl3": aff.syl3,
        "C2": c2,
        "C3": c3,
        "C9": c9,
        "C3xC3": c3xc3,
        "E9": c3xc3,
        "E27": direct_product(c3, c3, c3),
        "SP2": sp2_group(),
        "Dih18": dih18,
        "Dih18xC2": direct_product(dih18, c2),
        "Sym3xC2": direct_product(sym3, c2),
        "C2xAGL13": direct_product(c2, agl1_group()),
        "C3xAGL23": direct_product(c3, aff.agl),
        "C3xAGL23S": direct_product(c3, aff.agl_s),
        "C3xAGL23S_sharp": direct_product(c3, aff.sharp),
    }
    expected = {
        "Sym3": 6, "Sym4": 24, "AGL13": 6, "GL23": 48, "PGL23": 24,
        "AGL23": 432, "AGL23S": 108, "AGL23S_sharp": 54, "AGL23S_star": 54,
        "V": 9, "V0": 3, "S_syl3": 27, "C9": 9, "C3xC3": 9, "E27": 27,
        "SP2": 27, "Dih18": 18, "Dih18xC2": 36, "Sym3xC2": 12,
        "C2xAGL13": 12, "C3xAGL23": 1296, "C3xAGL23S": 324,
        "C3xAGL23S_sharp": 162,
    }
    for k, n in expected.items():
        assert len(refs[k]) == n, (k, len(refs[k]), n)
    return refs


# ---------------------------------------------------------------------------
# the named subgroups of the construction


@dataclass
class NamedGroups:
    """The concrete projective unitary subgroups the whole build rests on."""

    field: GF64
    p: dict[str, PElement]
    Q1: SmallGroup
    Q2: SmallGroup
    Qstar: SmallGroup
    S: SmallGroup
    H1: SmallGroup
    H2: SmallGroup
    Qh1: SmallGroup
    Qh2: SmallGroup
    K1: SmallGroup
    K2: SmallGroup
    H12: SmallGroup
    K12: SmallGroup
    Lambda: list[SmallGroup] = dfield(default_factory=list)

    def h_part(self, G: SmallGroup, name: str = "") -> SmallGroup:
        """Intersection with H = PSU_3(8) . <sigma^3>: twist in {0, 3}."""
        return G.subgroup([x for x in G.elems if x.twist in (0, 3)], name=name)


def named_groups(field: GF64) -> NamedGroups:
    p = pgenerators(field)
    A, B, C, D, E, F = p["A"], p["B"], p["C"], p["D"], p["E"], p["F"]
    s2, s3 = p["sigma2"], p["sigma3"]
    Q1 = SmallGroup.generate([A, B], name="Q1")
    Q2 = SmallGroup.generate([A, B, C], name="Q2")
    Qstar = SmallGroup.generate([B, C], name="Q*")
    S = SmallGroup.generate([E, F, s3], name="S")
    H1 = SmallGroup.generate([A, B, C, D, s3], name="H1")
    H2 = SmallGroup.generate([A, B, C, E, F, s3], name="H2")
    Qh1 = SmallGroup.generate([A, B, s2], name="Qh1")
    Qh2 = SmallGroup.generate([A, B, C, s2], name="Qh2")
    K1 = SmallGroup.generate([A, B, C, D, s3, s2], name="K1")
    K2 = SmallGroup.generate([A, B, C, E, F, s3, s2], name="K2")
    H12 = H1.intersect(H2)
    H12.name = "H12"
    K12 = K1.intersect(K2)
    K12.name = "K12"
    ng = NamedGroups(field, p, Q1, Q2, Qstar, S, H1, H2, Qh1, Qh2, K1, K2, H12, K12)
    ng.Lambda = _lambda_subgroups(Q2, Qstar)
    return ng


def _lambda_subgroups(Q2: SmallGroup, Qstar: SmallGroup) -> list[SmallGroup]:
    """Order-9 elementary abelian subgroups of Q2 other than Q*."""
    seen = set()
    out = []
    els = Q2.sorted_elems()
    for i, a in enumerate(els):
        for b in els[i + 1:]:
            s = frozenset(_close([a, b], Q2.identity))
            if len(s) != 9 or s in seen:
                continue
            seen.add(s)
            sub = Q2.subgroup(s)
            if sub.is_elementary_abelian(3) and s != Qstar.eset:
                out.append(sub)
    out.sort(key=lambda g: [x.key for x in g.sorted_elems()])
    return out
