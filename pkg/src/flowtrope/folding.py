"""Stallings core graphs and the invertibility test for endomorphisms.

A labeled graph stores each edge once; traversing an edge against its
direction reads the inverse label.  Folding repeatedly identifies pairs of
equally labeled edges sharing a source or a target.  An endomorphism of a
rank-n free group is onto exactly when the folded graph of its images is the
rose with n petals, and onto implies invertible because the group is Hopfian.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import NotFolded, RankMismatch
from .freegroup import (GroupHom, GroupWord, apply, compose_hom,
                        identity_hom, reduce)


@dataclass(frozen=True)
class LabeledGraph:
    """A connected directed graph with generator-labeled edges and a basepoint."""

    rank: int
    basepoint: int
    vertices: frozenset[int]
    edges: tuple[tuple[int, int, int], ...]  # (source, target, label)

    def __post_init__(self):
        if self.basepoint not in self.vertices:
            raise ValueError("basepoint missing from vertex set")
        for s, t, lab in self.edges:
            if s not in self.vertices or t not in self.vertices:
                raise ValueError("edge endpoint missing from vertex set")
            if not 0 <= lab < self.rank:
                raise ValueError(f"edge label {lab} out of range")
        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        seen = {self.basepoint}
        queue = deque([self.basepoint])
        adj: dict[int, list[int]] = {}
        for s, t, _ in self.edges:
            adj.setdefault(s, []).append(t)
            adj.setdefault(t, []).append(s)
        while queue:
            v = queue.popleft()
            for w in adj.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen == self.vertices

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_folded(self) -> bool:
        out = set()
        inc = set()
        for s, t, lab in self.edges:
            if (s, lab) in out or (t, lab) in inc:
                return False
            out.add((s, lab))
            inc.add((t, lab))
        return True


def rose(rank: int) -> LabeledGraph:
    return LabeledGraph(rank, 0, frozenset({0}),
                        tuple((0, 0, lab) for lab in range(rank)))


def is_rose(g: LabeledGraph) -> bool:
    if g.vertices != frozenset({g.basepoint}):
        return False
    return sorted(lab for _, _, lab in g.edges) == list(range(g.rank))


def bouquet(words: list[GroupWord], rank: int) -> LabeledGraph:
    """A wedge of subdivided loops at the basepoint, one loop per word.

    A letter with positive sign becomes an edge along the traversal
    direction; a negative letter becomes an edge pointing back against it.
    Empty words contribute nothing.
    """
    for w in words:
        if w.rank != rank:
            raise RankMismatch("word rank does not match the bouquet rank")
    base = 0
    next_vertex = 1
    vertices = {base}
    edges = []
    for w in words:
        cur = base
        for pos, (idx, sign) in enumerate(w.letters):
            last = pos == len(w.letters) - 1
            nxt = base if last else next_vertex
            if not last:
                next_vertex += 1
                vertices.add(nxt)
            if sign > 0:
                edges.append((cur, nxt, idx))
            else:
                edges.append((nxt, cur, idx))
            cur = nxt
    return LabeledGraph(rank, base, frozenset(vertices), tuple(edges))


@dataclass(frozen=True)
class _FoldStep:
    """One elementary fold: edge `removed` identified with edge `kept`.

    merged_from/merged_into record the vertex identification performed by
    this step (None when the edges were already parallel).  Endpoints are as
    of the moment just before the step.
    """

    kept: int
    removed: int
    merged_from: Optional[int]
    merged_into: Optional[int]


class _Folder:
    """Mutable folding workspace that records enough history to lift paths."""

    def __init__(self, g: LabeledGraph):
        self.rank = g.rank
        self.basepoint = g.basepoint
        self.endpoints = {eid: (s, t) for eid, (s, t, _) in enumerate(g.edges)}
        self.labels = {eid: lab for eid, (_, _, lab) in enumerate(g.edges)}
        self.live = set(self.endpoints)
        self.vertices = set(g.vertices)
        self.steps: list[_FoldStep] = []
        # endpoint maps per version; version k is the graph before step k
        self.versions: list[dict[int, tuple[int, int]]] = []

    def _clash_at(self, v: int):
        by_out: dict[int, int] = {}
        by_in: dict[int, int] = {}
        for eid in sorted(self.live):
            s, t = self.endpoints[eid]
            lab = self.labels[eid]
            if s == v:
                if lab in by_out:
                    return by_out[lab], eid
                by_out[lab] = eid
            if t == v:
                if lab in by_in:
                    return by_in[lab], eid
                by_in[lab] = eid
        return None

    def fold(self, order: Optional[random.Random] = None):
        pending = deque(sorted(self.vertices))
        if order is not None:
            items = list(pending)
            order.shuffle(items)
            pending = deque(items)
        while pending:
            v = pending.popleft()
            if v not in self.vertices:
                continue
            clash = self._clash_at(v)
            if clash is None:
                continue
            kept, removed = clash
            if order is not None and order.random() < 0.5:
                kept, removed = removed, kept
            self.versions.append(dict(self.endpoints))
            ks, kt = self.endpoints[kept]
            rs, rt = self.endpoints[removed]
            # shared-source clash merges targets; shared-target merges sources
            if ks == v and rs == v:
                far_kept, far_removed = kt, rt
            else:
                far_kept, far_removed = ks, rs
            if far_kept == far_removed:
                self.steps.append(_FoldStep(kept, removed, None, None))
                self.live.remove(removed)
            else:
                into, frm = far_kept, far_removed
                if frm == self.basepoint:
                    into, frm = frm, into
                    kept, removed = removed, kept
                self.steps.append(_FoldStep(kept, removed, frm, into))
                for eid in self.live:
                    s, t = self.endpoints[eid]
                    self.endpoints[eid] = (into if s == frm else s,
                                           into if t == frm else t)
                self.vertices.remove(frm)
                self.live.remove(removed)
                pending.append(into)
            pending.append(v)

    def result(self) -> LabeledGraph:
        edges = tuple(sorted((self.endpoints[eid][0], self.endpoints[eid][1],
                              self.labels[eid]) for eid in self.live))
        return LabeledGraph(self.rank, self.basepoint,
                            frozenset(self.vertices), edges)


def fold(g: LabeledGraph, order: Optional[random.Random] = None) -> LabeledGraph:
    """Fold to completion.  The result is independent of the fold order;
    `order` only randomizes the processing sequence (used to test that)."""
    folder = _Folder(g)
    folder.fold(order)
    return folder.result()


def _trim(vertices: set[int], edges: list[tuple[int, int, int]],
          basepoint: int):
    """Iteratively drop non-basepoint vertices of degree at most one."""
    changed = True
    while changed:
        changed = False
        degree: dict[int, int] = {v: 0 for v in vertices}
        for s, t, _ in edges:
            degree[s] += 1
            degree[t] += 1
        for v in sorted(vertices):
            if v != basepoint and degree[v] <= 1:
                vertices.discard(v)
                edges[:] = [e for e in edges if v not in (e[0], e[1])]
                changed = True
                break
    return vertices, edges


def subgroup_rank(g: LabeledGraph) -> int:
    """E - V + 1 of the core, after trimming hanging trees."""
    if not g.is_folded():
        raise NotFolded("subgroup_rank needs a folded graph")
    vertices, edges = _trim(set(g.vertices), list(g.edges), g.basepoint)
    return len(edges) - len(vertices) + 1


def canonical_form(g: LabeledGraph):
    """Canonical relabeling of a folded graph by ordered BFS from the base.

    Two folded graphs are isomorphic as based labeled graphs exactly when
    their canonical forms are equal.
    """
    if not g.is_folded():
        raise NotFolded("canonical_form needs a folded graph")
    out: dict[tuple[int, int], int] = {}
    inc: dict[tuple[int, int], int] = {}
    for s, t, lab in g.edges:
        out[(s, lab)] = t
        inc[(t, lab)] = s
    names = {g.basepoint: 0}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        for lab in range(g.rank):
            for table in (out, inc):
                w = table.get((v, lab))
                if w is not None and w not in names:
                    names[w] = len(names)
                    queue.append(w)
    edges = sorted((names[s], names[t], lab) for s, t, lab in g.edges)
    return (len(names), tuple(edges))


def graphs_isomorphic(a: LabeledGraph, b: LabeledGraph) -> bool:
    return a.rank == b.rank and canonical_form(a) == canonical_form(b)


def is_invertible(h: GroupHom) -> bool:
    """Whether the images generate the whole group (then h is an automorphism)."""
    if h.domain_rank != h.codomain_rank:
        raise RankMismatch("invertibility needs equal ranks")
    folded = fold(bouquet(list(h.images), h.codomain_rank))
    return is_rose(folded)


# -- witness inverse extraction ----------------------------------------------

def _lift_path(path, steps, versions, basepoint):
    """Pull a basepoint loop in the folded graph back to the bouquet.

    A path is a list of (edge id, forward) traversals.  Undoing one fold can
    only break the path at the vertex pair that fold merged; a detour through
    the kept and removed edges repairs it while inserting a cancelling pair
    of labels, so the read word is unchanged up to free reduction.
    """
    for step, version in zip(reversed(steps), reversed(versions)):
        # a shared source means the fold merged targets and vice versa;
        # loops make endpoint matching ambiguous, so directions are fixed
        # by the clash side, guaranteeing the detour reads a cancelling pair
        shared_source = version[step.kept][0] == version[step.removed][0]

        def far(eid):
            s, t = version[eid]
            return t if shared_source else s

        def detour(src, dst):
            first = step.removed if far(step.removed) == src else step.kept
            second = step.kept if first == step.removed else step.removed
            assert far(first) == src and far(second) == dst
            if shared_source:
                return [(first, False), (second, True)]
            return [(first, True), (second, False)]

        if step.merged_from is None:
            continue
        lifted = []
        cur = basepoint
        for eid, fwd in path:
            s, t = version[eid]
            need = s if fwd else t
            if cur != need:
                assert {cur, need} == {step.merged_from, step.merged_into}
                lifted.extend(detour(cur, need))
            lifted.append((eid, fwd))
            cur = t if fwd else s
        if cur != basepoint:
            assert {cur, basepoint} == {step.merged_from, step.merged_into}
            lifted.extend(detour(cur, basepoint))
        path = lifted
    return path


def inverse_witness(h: GroupHom) -> Optional[GroupHom]:
    """An explicit inverse of an invertible endomorphism, or None.

    Each generator is a loop in the folded rose; lifting that loop back
    through the folding history gives a loop in the bouquet, and reading off
    the loop's petal crossings expresses the generator as a word in the
    images.  The result is verified against the identity in both orders.
    """
    if h.domain_rank != h.codomain_rank:
        raise RankMismatch("invertibility needs equal ranks")
    n = h.codomain_rank
    g = bouquet(list(h.images), n)
    folder = _Folder(g)
    folder.fold()
    folded = folder.result()
    if not is_rose(folded):
        return None

    # petal bookkeeping: the closing edge of each loop generates pi_1
    closing: dict[int, tuple[int, bool]] = {}  # edge id -> (word index, forward?)
    eid = 0
    for i, w in enumerate(h.images):
        for pos, (_, sign) in enumerate(w.letters):
            if pos == len(w.letters) - 1:
                closing[eid] = (i, sign > 0)
            eid += 1

    loops = {lab: e for e, lab in
             ((eid, folder.labels[eid]) for eid in folder.live)}
    images = []
    for gen in range(n):
        path = [(loops[gen], True)]
        path = _lift_path(path, folder.steps, folder.versions, g.basepoint)
        letters = []
        for e, fwd in path:
            if e in closing:
                i, loop_fwd = closing[e]
                letters.append((i, 1 if fwd == loop_fwd else -1))
        images.append(reduce(n, letters))
    inv = GroupHom(n, n, tuple(images))
    ident = identity_hom(n)
    assert compose_hom(h, inv) == ident and compose_hom(inv, h) == ident
    return inv
