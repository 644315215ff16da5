"""Construction of the bipartite coset graph on K1- and K2-cosets.

A vertex is the coset K_side . g = {k g}; its canonical representative
is the product with the least packed serialization, and its dense id is
assigned in deterministic BFS order from the base edge (each layer's new
vertices are sorted by canonical key before numbering).  Neighbors of
K1.g are the cosets K2.t.g where t runs over a fixed transversal of
K1 n K2 in K1, and dually; the group acts on the right, so the
stabilizer of K_side.g is (K_side)^g, matching the conjugate stabilizer
identities the downstream checks rely on.

Identity of a probe t.g is decided by the two-level scheme: a cheap
coset-invariant fingerprint (sorted conjugates of a fixed normal subgroup
of K_side) prefilters candidates, and an exact membership test
probe . rep^-1 in K_side settles each collision.  Full min-over-subgroup
canonicalization runs once per discovered vertex, not per probe.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field as dfield

import numpy as np

from .fastops import (FieldOps, SubgroupArrays, bpack, bunpack,
                      conj_fingerprints, coset_canon_keys)
from .gf64 import GF64
from .grp import NamedGroups, SmallGroup
from .psu import Element, PElement

CACHE_MAGIC = b"PSU38GR\x00"
CACHE_VERSION = 2
VERTEX_CAP = 1_000_000


class CacheMismatch(RuntimeError):
    """Cache file does not match the requested configuration."""


def transversal(K: SmallGroup, K12: SmallGroup) -> list[PElement]:
    """Right transversal of K12 in K: representatives t of the cosets
    K12.t, scanned in canonical order so the choice is deterministic."""
    cover = set()
    ts = []
    for t in K.sorted_elems():
        if t not in cover:
            ts.append(t)
            cover.update(h * t for h in K12.elems)
    assert len(ts) * len(K12) == len(K)
    return ts


def coset_canon(ops: FieldOps, sub: SubgroupArrays, g: PElement) -> PElement:
    """Canonical representative of the coset K.g (exact scan)."""
    pm, pt = bunpack(np.array([g.key], dtype=np.uint64))
    key = coset_canon_keys(ops, sub, pm, pt)[0]
    return PElement(Element.from_key(ops.field, int(key)))


@dataclass
class CosetGraph:
    field: GF64
    ng: NamedGroups
    n1: int = 0
    n2: int = 0
    reps: dict = dfield(default_factory=dict)      # side -> (n,) uint64 canonical keys
    edges: np.ndarray | None = None                # (E,2) uint32 per-side id pairs
    # runtime
    ops: FieldOps | None = None
    subs: dict = dfield(default_factory=dict)      # side -> SubgroupArrays
    repmats: dict = dfield(default_factory=dict)
    reptw: dict = dfield(default_factory=dict)
    irepmats: dict = dfield(default_factory=dict)
    ireptw: dict = dfield(default_factory=dict)
    fpdict: dict = dfield(default_factory=dict)    # side -> {fp bytes: [ids]}
    zsets: dict = dfield(default_factory=dict)     # side -> (zm, zt)
    indptr: np.ndarray | None = None
    indices: np.ndarray | None = None
    _perm_cache: dict = dfield(default_factory=dict)

    # -- sizes and ids ----------------------------------------------------

    @property
    def nv(self) -> int:
        return self.n1 + self.n2

    def gid(self, side: int, vid: int) -> int:
        return vid if side == 1 else self.n1 + vid

    def side_of(self, g: int) -> int:
        return 1 if g < self.n1 else 2

    def local_id(self, g: int) -> int:
        return g if g < self.n1 else g - self.n1

    def rep_key(self, g: int) -> int:
        side = self.side_of(g)
        return int(self.reps[side][self.local_id(g)])

    def rep_element(self, g: int) -> PElement:
        return PElement(Element.from_key(self.field, self.rep_key(g)))

    def neighbors(self, g: int) -> np.ndarray:
        return self.indices[self.indptr[g]:self.indptr[g + 1]]

    def degree(self, g: int) -> int:
        return int(self.indptr[g + 1] - self.indptr[g])

    @property
    def base_x1(self) -> int:
        return 0

    @property
    def base_x2(self) -> int:
        return self.n1

    # -- group action ------------------------------------------------------

    def image_batch(self, gids: np.ndarray, x: PElement) -> np.ndarray:
        """Right action: K.g -> K.(g x), resolved to vertex ids."""
        gids = np.asarray(gids, dtype=np.int64)
        out = np.empty(len(gids), dtype=np.int64)
        xm, xt = bunpack(np.array([x.key], dtype=np.uint64))
        for side in (1, 2):
            sel = np.where((gids >= self.n1) == (side == 2))[0]
            if len(sel) == 0:
                continue
            lids = gids[sel] - (0 if side == 1 else self.n1)
            pm, pt = self.ops.bsmul_right(
                self.repmats[side][lids], self.reptw[side][lids], (xm[0], int(xt[0]))
            )
            ids = self._resolve(side, pm, pt, must=True)
            out[sel] = ids + (0 if side == 1 else self.n1)
        return out

    def image(self, g: int, x: PElement) -> int:
        return int(self.image_batch(np.array([g]), x)[0])

    def perm(self, x: PElement) -> np.ndarray:
        """Full vertex permutation of one group element (cached)."""
        p = self._perm_cache.get(x.key)
        if p is None:
            p = self.image_batch(np.arange(self.nv), x)
            self._perm_cache[x.key] = p
        return p

    def is_graph_automorphism(self, x: PElement) -> bool:
        p = self.perm(x)
        if len(np.unique(p)) != self.nv:
            return False
        u = self.edges[:, 0].astype(np.int64)
        v = self.edges[:, 1].astype(np.int64) + self.n1
        ekeys = np.sort(u * np.int64(self.nv) + v)
        pu, pv = p[u], p[v]
        lo = np.minimum(pu, pv)
        hi = np.maximum(pu, pv)
        ikeys = np.sort(lo * np.int64(self.nv) + hi)
        return bool(np.array_equal(ekeys, ikeys))

    # -- stabilizers ---------------------------------------------------

    def vertex_stabilizer(self, g: int, group: str = "K") -> SmallGroup:
        """(K_side)^rep, filtered to twist {0,3} for group="H"."""
        side = self.side_of(g)
        base = self.ng.K1 if side == 1 else self.ng.K2
        rep = self.rep_element(g)
        if self.local_id(g) == 0:
            stab = base
        else:
            stab = base.conjugate(rep, name=f"K_v{g}")
        if group == "H":
            return self.ng.h_part(stab, name=f"H_v{g}")
        return stab

    def group_order_from_graph(self) -> int:
        """|<K1,K2>| by orbit-stabilizer on side-1 cosets; cross-checked
        against side 2."""
        o1 = self.n1 * len(self.ng.K1)
        o2 = self.n2 * len(self.ng.K2)
        if o1 != o2:
            raise AssertionError(f"orbit counts disagree: {o1} != {o2}")
        return o1

    # -- resolution --------------------------------------------------------

    def _fp(self, side: int, pm, pt) -> np.ndarray:
        zm, zt = self.zsets[side]
        return conj_fingerprints(self.ops, pm, pt, zm, zt)

    def _resolve(self, side: int, pm, pt, must: bool = False) -> np.ndarray:
        """Vertex ids for a batch of probe elements on one side (-1 when
        the coset is not a known vertex)."""
        F = self._fp(side, pm, pt)
        m = len(pm)
        out = np.full(m, -1, dtype=np.int64)
        fpd = self.fpdict[side]
        cand_lists = [fpd.get(F[i].tobytes(), ()) for i in range(m)]
        first = np.array([c[0] if c else -1 for c in cand_lists], dtype=np.int64)
        sel = np.where(first >= 0)[0]
        if len(sel):
            cm = self.irepmats[side][first[sel]]
            ct = self.ireptw[side][first[sel]]
            tm, tt = self.ops.bsmul(pm[sel], pt[sel], cm, ct)
            keys = self.ops.bpkeys(tm, tt)
            okmask = self.subs[side].contains(keys)
            out[sel[okmask]] = first[sel[okmask]]
        # slow path: several candidates behind one fingerprint
        for i in range(m):
            if out[i] >= 0 or not cand_lists[i]:
                continue
            for cand in cand_lists[i][1:]:
                tm, tt = self.ops.bsmul(
                    pm[i:i + 1], pt[i:i + 1],
                    self.irepmats[side][cand:cand + 1], self.ireptw[side][cand:cand + 1],
                )
                if self.subs[side].contains(self.ops.bpkeys(tm, tt))[0]:
                    out[i] = cand
                    break
        if must and (out < 0).any():
            raise AssertionError("action image is not a known vertex")
        return out

    def _register(self, side: int, keys: np.ndarray) -> None:
        """Append canonical vertex reps (already sorted) to the side tables."""
        mats, tw = bunpack(keys)
        im, it = self.ops.binv(mats, tw)
        start = len(self.reps[side]) if side in self.reps else 0
        if side in self.reps and len(self.reps[side]):
            self.reps[side] = np.concatenate([self.reps[side], keys])
            self.repmats[side] = np.concatenate([self.repmats[side], mats])
            self.reptw[side] = np.concatenate([self.reptw[side], tw])
            self.irepmats[side] = np.concatenate([self.irepmats[side], im])
            self.ireptw[side] = np.concatenate([self.ireptw[side], it])
        else:
            self.reps[side] = keys
            self.repmats[side] = mats
            self.reptw[side] = tw
            self.irepmats[side] = im
            self.ireptw[side] = it
        F = self._fp(side, mats, tw)
        fpd = self.fpdict[side]
        for i in range(len(keys)):
            fpd.setdefault(F[i].tobytes(), []).append(start + i)

    def _finish(self, edge_pairs) -> None:
        e = np.array(sorted(set(edge_pairs)), dtype=np.uint32)
        self.edges = e
        self.n1 = len(self.reps[1])
        self.n2 = len(self.reps[2])
        self._build_csr()

    def _build_csr(self) -> None:
        u = self.edges[:, 0].astype(np.int64)
        v = self.edges[:, 1].astype(np.int64) + self.n1
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        self.indptr = np.zeros(self.nv + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = dst.astype(np.int32)


def _arm(graph: CosetGraph, threads: int) -> None:
    ng = graph.ng
    graph.ops = FieldOps(graph.field)
    graph.subs = {
        1: SubgroupArrays.from_group(graph.ops, ng.K1),
        2: SubgroupArrays.from_group(graph.ops, ng.K2),
    }
    # fingerprint sets: nonidentity elements of a normal subgroup of K_side
    z1 = ng.K1.center()
    if len(z1) < 3:
        raise AssertionError("Z(K1) unexpectedly small; fingerprints need it")
    z2 = ng.Qh2.center()  # normal in K2 since Qh2 = O_3(K2) is
    for name, z, parent in (("Z(K1)", z1, ng.K1), ("Z(Qh2)", z2, ng.K2)):
        if not parent.is_normal(z):
            raise AssertionError(f"{name} is not normal in {parent.name}")
    for side, z in ((1, z1), (2, z2)):
        keys = np.array([x.key for x in z.sorted_elems() if x != z.identity],
                        dtype=np.uint64)
        zm, zt = bunpack(keys)
        graph.zsets[side] = (zm, zt)
    graph.fpdict = {1: {}, 2: {}}
    graph._threads = threads


def build_graph(ng: NamedGroups, threads: int = 1, progress=None) -> CosetGraph:
    """BFS from the two trivial cosets; deterministic ids; asserts the
    base-edge stabilizer identities that pin the action convention."""
    if len(ng.K12) * 4 != len(ng.K1) or len(ng.K12) * 3 != len(ng.K2):
        raise AssertionError("K1 n K2 does not have the expected indices")
    graph = CosetGraph(ng.field, ng)
    _arm(graph, threads)
    ops = graph.ops

    trans = {1: transversal(ng.K1, ng.K12), 2: transversal(ng.K2, ng.K12)}
    tarr = {}
    for side in (1, 2):
        keys = np.array([t.key for t in trans[side]], dtype=np.uint64)
        tarr[side] = bunpack(keys)

    ident = PElement(Element.identity(ng.field))
    for side in (1, 2):
        sub = graph.subs[side]
        pm, pt = bunpack(np.array([ident.key], dtype=np.uint64))
        key = coset_canon_keys(ops, sub, pm, pt, threads=threads)
        graph._register(side, key.astype(np.uint64))

    edge_pairs = []
    frontier = [(1, 0), (2, 0)]
    total = 2
    while frontier:
        by_side_probes = {1: [], 2: []}   # target side -> (src_vid, row idx)
        probe_arrays = {1: [], 2: []}
        for side, vid in frontier:
            tgt = 3 - side
            gm = graph.repmats[side][vid:vid + 1]
            gt = graph.reptw[side][vid:vid + 1]
            tm, tt = tarr[side]
            k = len(tm)
            pm, pt = ops.bsmul(
                tm, tt,
                np.repeat(gm, k, axis=0), np.repeat(gt, k, axis=0),
            )
            probe_arrays[tgt].append((pm, pt))
            by_side_probes[tgt].extend((vid, None) for _ in range(k))
        newfrontier = []
        for side in (1, 2):
            if not probe_arrays[side]:
                continue
            pm = np.concatenate([a for a, _ in probe_arrays[side]])
            pt = np.concatenate([b for _, b in probe_arrays[side]])
            srcs = [s for s, _ in by_side_probes[side]]
            ids = graph._resolve(side, pm, pt)
            # unresolved probes are new vertices; dedupe within the layer
            # by fingerprint plus exact membership
            pend_reps: list[tuple] = []      # (mat, tw) raw probe
            pend_srcs: list[list[int]] = []
            pend_by_fp: dict = {}
            F = graph._fp(side, pm, pt)
            for i in range(len(pm)):
                if ids[i] >= 0:
                    edge_pairs.append(_edge(side, srcs[i], int(ids[i])))
                    continue
                fpb = F[i].tobytes()
                hit = None
                for j in pend_by_fp.get(fpb, ()):
                    rm, rt = pend_reps[j]
                    tm2, tt2 = ops.bsmul(pm[i:i + 1], pt[i:i + 1], *_inv1(ops, rm, rt))
                    if graph.subs[side].contains(ops.bpkeys(tm2, tt2))[0]:
                        hit = j
                        break
                if hit is None:
                    pend_reps.append((pm[i:i + 1], pt[i:i + 1]))
                    pend_srcs.append([srcs[i]])
                    pend_by_fp.setdefault(fpb, []).append(len(pend_reps) - 1)
                else:
                    pend_srcs[hit].append(srcs[i])
            if pend_reps:
                rm = np.concatenate([a for a, _ in pend_reps])
                rt = np.concatenate([b for _, b in pend_reps])
                ck = coset_canon_keys(ops, graph.subs[side], rm, rt,
                                      threads=getattr(graph, "_threads", 1))
                order = np.argsort(ck, kind="stable")
                base = len(graph.reps[side])
                graph._register(side, ck[order])
                total += len(order)
                if total > VERTEX_CAP:
                    raise AssertionError("vertex cap exceeded; convention bug")
                for newpos, pos in enumerate(order):
                    vid = base + newpos
                    newfrontier.append((side, vid))
                    for s in pend_srcs[int(pos)]:
                        edge_pairs.append(_edge(side, s, vid))
        frontier = newfrontier
        if progress:
            progress(len(graph.reps[1]), len(graph.reps[2]))

    graph._finish(edge_pairs)
    _assert_base_edge(graph)
    return graph


def _edge(target_side: int, src_vid: int, tgt_vid: int) -> tuple[int, int]:
    return (src_vid, tgt_vid) if target_side == 2 else (tgt_vid, src_vid)


def _inv1(ops, rm, rt):
    im, it = ops.binv(rm, rt)
    return im, it


def _assert_base_edge(graph: CosetGraph) -> None:
    """x1 and x2 are adjacent, degrees are (4,3), and the stabilizer of
    x3 = K1.E is the conjugate K1^E; this pins the orientation."""
    ng = graph.ng
    x1, x2 = graph.base_x1, graph.base_x2
    if x2 not in graph.neighbors(x1):
        raise AssertionError("base vertices are not adjacent")
    if graph.degree(x1) != 4 or graph.degree(x2) != 3:
        raise AssertionError("base degrees are not (4,3)")
    E = ng.p["E"]
    x3 = graph.image(x1, E)
    if x3 == x1 or graph.side_of(x3) != 1:
        raise AssertionError("K1.E did not land on a new side-1 vertex")
    stab = graph.vertex_stabilizer(x3, "K")
    conj = ng.K1.conjugate_set(graph.rep_element(x3))
    if frozenset(stab.eset) != conj:
        raise AssertionError("stabilizer of K1.E is not K1 conjugated by the rep")


# ---------------------------------------------------------------------------
# cache


def group_hash(ng: NamedGroups) -> bytes:
    h = hashlib.sha256()
    h.update(struct.pack("<I", ng.field.modulus))
    for G in (ng.K1, ng.K2):
        arr = np.array(sorted(x.key for x in G.elems), dtype="<u8")
        h.update(arr.tobytes())
    return h.digest()


def save_cache(graph: CosetGraph, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(struct.pack("<IIQQQ", CACHE_VERSION, graph.field.modulus,
                            graph.n1, graph.n2, len(graph.edges)))
        f.write(group_hash(graph.ng))
        f.write(np.ascontiguousarray(graph.reps[1], dtype="<u8").tobytes())
        f.write(np.ascontiguousarray(graph.reps[2], dtype="<u8").tobytes())
        f.write(np.ascontiguousarray(graph.edges, dtype="<u4").tobytes())
    os.replace(tmp, path)


def load_cache(path: str, ng: NamedGroups, threads: int = 1) -> CosetGraph:
    with open(path, "rb") as f:
        magic = f.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise CacheMismatch("bad magic")
        ver, modulus, n1, n2, ne = struct.unpack("<IIQQQ", f.read(32))
        if ver != CACHE_VERSION:
            raise CacheMismatch(f"cache version {ver} != {CACHE_VERSION}")
        if modulus != ng.field.modulus:
            raise CacheMismatch("cache was built with a different modulus")
        gh = f.read(32)
        if gh != group_hash(ng):
            raise CacheMismatch("cache group hash mismatch")
        reps1 = np.frombuffer(f.read(8 * n1), dtype="<u8").astype(np.uint64)
        reps2 = np.frombuffer(f.read(8 * n2), dtype="<u8").astype(np.uint64)
        edges = np.frombuffer(f.read(8 * ne), dtype="<u4").astype(np.uint32)
    graph = CosetGraph(ng.field, ng)
    _arm(graph, threads)
    graph._register(1, reps1)
    graph._register(2, reps2)
    graph.edges = edges.reshape(ne, 2)
    graph.n1, graph.n2 = int(n1), int(n2)
    graph._build_csr()
    return graph


# ---------------------------------------------------------------------------
# exports


def export_edge_list(graph: CosetGraph, path: str) -> int:
    """One "u v" line per edge in global ids, ascending; returns line count."""
    u = graph.edges[:, 0].astype(np.int64)
    v = graph.edges[:, 1].astype(np.int64) + graph.n1
    order = np.lexsort((v, u))
    with open(path, "w") as f:
        for i in order:
            f.write(f"{u[i]} {v[i]}\n")
    return len(order)


def export_adjacency_json(graph: CosetGraph, path: str) -> None:
    adj = [graph.neighbors(g).tolist() for g in range(graph.nv)]
    doc = {
        "n1": graph.n1,
        "n2": graph.n2,
        "modulus": graph.field.modulus,
        "adjacency": adj,
    }
    with open(path, "w") as f:
        json.dump(doc, f)


def graph6_bytes_header(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, ((n >> 12) & 63) + 63, ((n >> 6) & 63) + 63, (n & 63) + 63])
    raise ValueError("graph too large for the 3-byte graph6 size field")


def export_graph6(graph_or_edges, path: str, n: int | None = None,
                  col_chunk: int = 1024) -> int:
    """graph6 writer: upper-triangle bits in column-major order, packed
    6 bits per byte, processed in column chunks to bound memory.
    Accepts a CosetGraph or an (E,2) array of global id pairs.
    Returns the number of vertices written."""
    if isinstance(graph_or_edges, CosetGraph):
        g = graph_or_edges
        u = g.edges[:, 0].astype(np.int64)
        v = g.edges[:, 1].astype(np.int64) + g.n1
        n = g.nv
    else:
        e = np.asarray(graph_or_edges, dtype=np.int64)
        u, v = e[:, 0], e[:, 1]
        if n is None:
            n = int(max(u.max(), v.max())) + 1
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    order = np.argsort(hi, kind="stable")
    lo, hi = lo[order], hi[order]
    starts = np.searchsorted(hi, np.arange(n + 1))

    with open(path, "wb") as f:
        f.write(graph6_bytes_header(n))
        carry = np.zeros(0, dtype=np.uint8)
        for c0 in range(1, n, col_chunk):
            c1 = min(n, c0 + col_chunk)
            lens = np.arange(c0, c1)
            total = int(lens.sum())
            bits = np.zeros(total, dtype=np.uint8)
            offs = np.concatenate([[0], np.cumsum(lens)])
            for j in range(c0, c1):
                s, e2 = starts[j], starts[j + 1]
                if e2 > s:
                    bits[offs[j - c0] + lo[s:e2]] = 1
            bits = np.concatenate([carry, bits])
            nfull = (len(bits) // 6) * 6
            chunk, carry = bits[:nfull], bits[nfull:]
            if nfull:
                six = chunk.reshape(-1, 6)
                vals = (six * np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)).sum(
                    axis=1, dtype=np.uint8) + 63
                f.write(vals.astype(np.uint8).tobytes())
        if len(carry):
            pad = np.zeros(6 - len(carry), dtype=np.uint8)
            six = np.concatenate([carry, pad])
            val = int((six * np.array([32, 16, 8, 4, 2, 1])).sum()) + 63
            f.write(bytes([val]))
        f.write(b"\n")
    return n


def read_graph6_header(path: str) -> int:
    """Vertex count from a graph6 file written by export_graph6."""
    with open(path, "rb") as f:
        b = f.read(4)
    if b[0] != 126:
        return b[0] - 63
    return ((b[1] - 63) << 12) | ((b[2] - 63) << 6) | (b[3] - 63)
