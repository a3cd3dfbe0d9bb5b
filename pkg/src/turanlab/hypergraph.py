"""s-partite s-uniform hypergraphs and min-degree cleaning."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InputError, PreconditionError


@dataclass
class PartiteHypergraph:
    """Edge ``e`` has ``e[i]`` in ``parts[i]``; parts are 0-indexed."""

    parts: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.parts = tuple(frozenset(p) for p in self.parts)
        self.edges = tuple(tuple(e) for e in self.edges)
        for i, a in enumerate(self.parts):
            for b in self.parts[i + 1:]:
                if a & b:
                    raise InputError("parts must be disjoint")
        if len(set(self.edges)) != len(self.edges):
            raise InputError("duplicate hyperedge")
        s = len(self.parts)
        for e in self.edges:
            if len(e) != s or any(e[i] not in self.parts[i] for i in range(s)):
                raise InputError(f"hyperedge {e} does not meet every part exactly once")

    @property
    def s(self) -> int:
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.edges)

    def volume(self, skip: int | None = None) -> int:
        """Product of part sizes, optionally leaving one part out."""
        out = 1
        for i, p in enumerate(self.parts):
            if i != skip:
                out *= len(p)
        return out

    def degrees(self, i: int) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for e in self.edges:
            out[e[i]] += 1
        return dict(out)

    def degree(self, v: int, i: int) -> int:
        return self.degrees(i).get(v, 0)

    def restrict(self, i: int, keep: Iterable[int]) -> "PartiteHypergraph":
        """Edges whose i-th vertex lies in ``keep``; parts are unchanged."""
        keep = set(keep)
        return PartiteHypergraph(self.parts, tuple(e for e in self.edges if e[i] in keep))


def min_degree_clean(h: PartiteHypergraph, i: int, alpha, require_density: bool = True) -> PartiteHypergraph:
    """Drop every edge through a part-``i`` vertex of degree ``<= (alpha/2) * prod_{j != i} |A_j|``.

    Each edge holds exactly one part-``i`` vertex, so deleting the edges at one
    low vertex never lowers another part-``i`` degree and one pass is already
    stable.  Part sizes stay fixed.  With ``require_density`` the input must
    have more than ``alpha * prod |A_j|`` edges, which is what makes the
    "more than half survive" guarantee hold.
    """
    if not 0 <= i < h.s:
        raise InputError(f"part index must lie in [0, {h.s}), got {i}")
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    if require_density and not len(h) > alpha * h.volume():
        raise PreconditionError(f"{len(h)} edges is not more than alpha * prod|A_j| = {alpha * h.volume()}")
    bound = alpha / 2 * h.volume(skip=i)
    keep = [v for v, d in h.degrees(i).items() if d > bound]
    return h.restrict(i, keep)
