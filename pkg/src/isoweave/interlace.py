"""Hangs-together analysis of prefabrics.

The interlacement digraph has one node per strand (n warps, n wefts) and
one arc per warp/weft pair: warp -> weft when the warp passes over, else
weft -> warp.  A prefabric falls apart exactly when this digraph is not
strongly connected; a witness is a nonempty proper strand set with every
crossing against its complement on top, i.e. a set that lifts off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .grid import TorusDesign, order


@dataclass(frozen=True)
class Witness:
    """Strand set lying wholly above the rest."""

    warps: tuple[int, ...]
    wefts: tuple[int, ...]

    def labels(self):
        return [f"warp-{i}" for i in self.warps] + [f"weft-{j}" for j in self.wefts]


def _adjacency(d: TorusDesign):
    """adj[u] = list of successors; nodes 0..n-1 warps, n..2n-1 wefts."""
    n = d.n
    adj = [[] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            if d.arr[i, j]:
                adj[i].append(n + j)
            else:
                adj[n + j].append(i)
    return adj


def _tarjan_sccs(adj):
    """Iterative Tarjan; returns list of components (lists of nodes),
    in reverse topological order of the condensation."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    sccs = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for k in range(pi, len(adj[v])):
                w = adj[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return sccs


def falls_apart(d: TorusDesign):
    """(bool, witness) - True with a lifting strand set when the
    interlacement digraph is not strongly connected, else (False, None).

    The witness is a source component of the condensation (everything it
    touches lies below it), chosen as the one containing the smallest
    strand index among sources.
    """
    n = d.n
    adj = _adjacency(d)
    sccs = _tarjan_sccs(adj)
    if len(sccs) == 1:
        return False, None
    comp_of = [0] * (2 * n)
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    has_incoming = [False] * len(sccs)
    for u in range(2 * n):
        for v in adj[u]:
            if comp_of[u] != comp_of[v]:
                has_incoming[comp_of[v]] = True
    sources = [ci for ci in range(len(sccs)) if not has_incoming[ci]]
    top = min(sources, key=lambda ci: min(sccs[ci]))
    members = sorted(sccs[top])
    witness = Witness(
        warps=tuple(v for v in members if v < n),
        wefts=tuple(v - n for v in members if v >= n),
    )
    return True, witness


def witness_is_valid(d: TorusDesign, w: Witness) -> bool:
    """Independent check: every crossing between the witness set and its
    complement has the witness strand on top."""
    n = d.n
    in_set = np.zeros(2 * n, dtype=bool)
    for i in w.warps:
        in_set[i] = True
    for j in w.wefts:
        in_set[n + j] = True
    if not in_set.any() or in_set.all():
        return False
    for i in range(n):
        for j in range(n):
            wi, fj = in_set[i], in_set[n + j]
            if wi == fj:
                continue
            over_is_warp = bool(d.arr[i, j])
            if wi != over_is_warp:
                return False
    return True


def falls_apart_bruteforce(d: TorusDesign) -> bool:
    """Oracle: scan all nonempty proper strand subsets for a lifting set.

    A subset S lifts off iff it is closed under predecessors in the
    interlacement digraph.  Rejects orders above 8 (2^(2n) subsets).
    """
    if order(d) > 8:
        raise PreconditionError("brute-force subset scan limited to order <= 8")
    if d.n > 8:
        from .grid import canonical

        d = canonical(d)
    n = d.n
    m = 2 * n
    pred = np.zeros(m, dtype=np.uint64)
    for i in range(n):
        for j in range(n):
            if d.arr[i, j]:
                pred[n + j] |= np.uint64(1 << i)  # warp over weft: arc i -> n+j
            else:
                pred[i] |= np.uint64(1 << (n + j))
    masks = np.arange(1, 1 << m, dtype=np.uint64)
    ok = np.ones(masks.shape, dtype=bool)
    for v in range(m):
        member = (masks >> np.uint64(v)) & np.uint64(1) == 1
        violated = (pred[v] & ~masks) != 0
        ok &= ~(member & violated)
    full = np.uint64((1 << m) - 1)
    ok &= masks != full
    return bool(ok.any())
