"""Canonical labelling and isomorph-free enumeration of small graphs.

The code of a labelled graph is its upper-triangular adjacency bit string
read column by column (``(0,1), (0,2), (1,2), (0,3), ...``), most
significant bit first.  The canonical code is the minimum code over the
orderings that respect an isomorphism-invariant colour refinement, so two
graphs are isomorphic iff their canonical codes (and orders) agree.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import InputError
from .graph import Graph, graph_from_masks


def _refine(n: int, masks: Sequence[int]) -> list[list[int]]:
    """Ordered equitable partition by iterated neighbour-colour counts."""
    colour = [bin(m).count("1") for m in masks]
    while True:
        sig = [(colour[v], tuple(sorted(colour[w] for w in _bits(masks[v])))) for v in range(n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[sig[v]] for v in range(n)]
        if len(set(new)) == len(set(colour)):
            colour = new
            break
        colour = new
    cells: dict[int, list[int]] = {}
    for v in range(n):
        cells.setdefault(colour[v], []).append(v)
    return [cells[c] for c in sorted(cells)]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def canonical_labeling(g: Graph) -> tuple[int, tuple[int, ...]]:
    """``(code, order)``: ``order[p]`` is the vertex placed at position ``p``."""
    n = g.n
    masks = g.masks
    if n <= 1:
        return 0, tuple(range(n))
    cells = _refine(n, masks)
    cell_of_pos = [ci for ci, cell in enumerate(cells) for _ in cell]
    # Prefix of the best code so far, one entry per position; the current
    # branch always agrees with it on every position already placed.
    best_cols: list[int] = []
    best_order: list[int] = []
    order: list[int] = []
    used = 0

    def dfs(pos: int) -> None:
        nonlocal best_order, used
        if pos == n:
            best_order = list(order)
            return
        seen_twins = set()
        for v in cells[cell_of_pos[pos]]:
            if used >> v & 1:
                continue
            # Unplaced non-adjacent twins are interchangeable.
            if masks[v] in seen_twins:
                continue
            seen_twins.add(masks[v])
            col = 0
            mv = masks[v]
            for u in order:
                col = (col << 1) | (mv >> u & 1)
            if pos < len(best_cols):
                if col > best_cols[pos]:
                    continue
                if col < best_cols[pos]:
                    del best_cols[pos:]
                    best_cols.append(col)
            else:
                best_cols.append(col)
            order.append(v)
            used |= 1 << v
            dfs(pos + 1)
            used &= ~(1 << v)
            order.pop()

    dfs(0)
    return _code(masks, best_order), tuple(best_order)


def _code(masks: Sequence[int], order: Sequence[int]) -> int:
    code = 0
    for p in range(1, len(order)):
        mv = masks[order[p]]
        for u in order[:p]:
            code = (code << 1) | (mv >> u & 1)
    return code


def canonical_code(g: Graph) -> int:
    return canonical_labeling(g)[0]


def canonical_form(g: Graph) -> Graph:
    """Relabelled copy of ``g`` whose vertex ``p`` is ``order[p]``."""
    _, order = canonical_labeling(g)
    pos = {v: p for p, v in enumerate(order)}
    masks = []
    for v in order:
        m = 0
        for w in _bits(g.masks[v]):
            m |= 1 << pos[w]
        masks.append(m)
    return graph_from_masks(masks)


def graph_from_code(n: int, code: int) -> Graph:
    total = n * (n - 1) // 2
    masks = [0] * n
    bit = total - 1
    for j in range(1, n):
        for i in range(j):
            if code >> bit & 1:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
            bit -= 1
    return graph_from_masks(masks)


def enumerate_graphs(n: int) -> list[Graph]:
    """One representative per isomorphism class on ``n`` vertices, in canonical form.

    Vertex augmentation: every graph on ``n`` vertices is a graph on ``n - 1``
    vertices plus one vertex, so extending all classes one level down by
    every neighbourhood and deduplicating by canonical code is complete.
    """
    if n < 0:
        raise InputError(f"n must be non-negative, got {n}")
    if n == 0:
        return [graph_from_masks([])]
    level = {0: graph_from_masks([0])}
    for m in range(2, n + 1):
        nxt: dict[int, Graph] = {}
        for parent in level.values():
            base = list(parent.masks)
            for nb in range(1 << (m - 1)):
                masks = [base[v] | ((nb >> v & 1) << (m - 1)) for v in range(m - 1)] + [nb]
                child = graph_from_masks(masks)
                code = canonical_code(child)
                if code not in nxt:
                    nxt[code] = child
        level = nxt
    return [canonical_form(g) for _, g in sorted(level.items())]


def count_graphs(n: int) -> int:
    return len(enumerate_graphs(n))
