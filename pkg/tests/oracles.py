"""Reference implementations that share no code with the package under test.

Everything here is deliberately naive: plain dicts of sets, itertools
permutations, no pruning beyond adjacency.  Only graph *inputs* come from the
package (as edge lists).
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def f_ref(l, L):  # noqa: E741
    return 1 if l == 0 else L if l == 1 else 1 + f_ref(l - 1, L) ** 16 * (l - 1) ** 2 * max(f_ref(i, L) * f_ref(l - i, L) for i in range(1, l))


def adjacency(n, edges):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def subdivision_edges(s, t, lengths):
    """Pattern graph with left roots 0..s-1, right roots s..s+t-1.

    ``lengths[i][j]`` is the length of the path joining left i and right j.
    """
    edges = []
    nxt = s + t
    for i in range(s):
        for j in range(t):
            chain = [i] + list(range(nxt, nxt + lengths[i][j] - 1)) + [s + j]
            nxt += lengths[i][j] - 1
            edges.extend(zip(chain, chain[1:]))
    return nxt, edges


def has_monomorphism(host_n, host_edges, pat_n, pat_edges):
    """Generic injective edge-preserving map search, pattern vertices in BFS order."""
    if pat_n > host_n:
        return False
    H = adjacency(host_n, host_edges)
    P = adjacency(pat_n, pat_edges)
    order = []
    seen = set()
    for root in range(pat_n):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(P[u]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    img = {}
    used = set()

    def extend(i):
        if i == len(order):
            return True
        u = order[i]
        placed = [w for w in P[u] if w in img]
        cands = H[img[placed[0]]] if placed else range(host_n)
        for x in cands:
            if x in used or len(H[x]) < len(P[u]):
                continue
            if all(img[w] in H[x] for w in placed):
                img[u] = x
                used.add(x)
                if extend(i + 1):
                    return True
                del img[u]
                used.discard(x)
        return False

    return extend(0)


def contains_subdivision_ref(host_n, host_edges, s, t, k, at_most=False):
    if not at_most:
        pn, pe = subdivision_edges(s, t, [[k] * t for _ in range(s)])
        return has_monomorphism(host_n, host_edges, pn, pe)
    for flat in itertools.product(range(1, k + 1), repeat=s * t):
        lengths = [list(flat[i * t:(i + 1) * t]) for i in range(s)]
        pn, pe = subdivision_edges(s, t, lengths)
        if has_monomorphism(host_n, host_edges, pn, pe):
            return True
    return False


def is_hamiltonian(n, edges):
    """Held-Karp style bitmask reachability from vertex 0."""
    if n < 3:
        return False
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    full = (1 << n) - 1
    reach = {(1, 0)}
    frontier = {(1, 0)}
    for _ in range(n - 1):
        nxt = set()
        for mask, end in frontier:
            free = adj[end] & ~mask
            while free:
                low = free & -free
                w = low.bit_length() - 1
                nxt.add((mask | low, w))
                free ^= low
        frontier = nxt
        reach |= nxt
    return any(mask == full and adj[end] & 1 for mask, end in frontier)


def paths_between(n, edges, x, y, length):
    """Every x-y path with ``length`` edges, by brute force over vertex sequences."""
    adj = adjacency(n, edges)
    others = [v for v in range(n) if v not in (x, y)]
    out = []
    for mid in itertools.permutations(others, length - 1):
        seq = (x,) + mid + (y,)
        if all(seq[i + 1] in adj[seq[i]] for i in range(length)):
            out.append(seq)
    return out


def path_status_ref(n, edges, path, L):
    """'light', 'heavy' or 'critical' straight from the definitions."""
    return path_status_ref_table(n, edges, path, [f_ref(i, L) for i in range(len(path))])


def path_status_ref_table(n, edges, path, f):
    """As ``path_status_ref`` with an explicit threshold list ``f[length]``."""
    ell = len(path) - 1

    def heavy(sub):
        return len(paths_between(n, edges, sub[0], sub[-1], len(sub) - 1)) > f[len(sub) - 1]

    if not heavy(path):
        return "light"
    proper = [path[i:j + 1] for i in range(ell + 1) for j in range(i + 1, ell + 1) if j - i < ell]
    return "heavy" if any(heavy(q) for q in proper) else "critical"


def upper_code(n, adj, order):
    code = 0
    for p in range(1, n):
        for q in range(p):
            code = (code << 1) | (order[q] in adj[order[p]])
    return code


def brute_canonical(n, edges):
    """Minimum code over all n! orderings (same bit layout as the package)."""
    adj = adjacency(n, edges)
    return min(upper_code(n, adj, perm) for perm in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def count_isomorphism_classes(n):
    """Orbits of labelled graphs under S_n, by marking each orbit exhaustively."""
    pairs = list(itertools.combinations(range(n), 2))
    index = {pr: i for i, pr in enumerate(pairs)}
    perms = list(itertools.permutations(range(n)))
    seen = bytearray(1 << len(pairs))
    classes = 0
    for g in range(1 << len(pairs)):
        if seen[g]:
            continue
        classes += 1
        es = [pairs[i] for i in range(len(pairs)) if g >> i & 1]
        for perm in perms:
            h = 0
            for u, v in es:
                a, b = perm[u], perm[v]
                h |= 1 << index[(a, b) if a < b else (b, a)]
            seen[h] = 1
    return classes


def ex8_c8_ref():
    """ex(8, C_8) as (value, witness edges) from two facts checked exhaustively.

    Every 8-vertex graph with 23 edges is Hamiltonian (so every larger one is
    too), and K_7 plus a pendant edge has 22 edges and no Hamiltonian cycle.
    """
    pairs = list(itertools.combinations(range(8), 2))
    for missing in itertools.combinations(range(len(pairs)), 5):
        gone = set(missing)
        if not is_hamiltonian(8, [pairs[i] for i in range(len(pairs)) if i not in gone]):
            raise AssertionError("a 23-edge graph without a Hamiltonian cycle exists")
    witness = [pr for pr in itertools.combinations(range(7), 2)] + [(0, 7)]
    assert len(witness) == 22 and not is_hamiltonian(8, witness)
    return 22, witness


def embedding_ok_ref(n, edges, s, t, k, left, right, paths):
    """Certificate check straight from the definition of K_{s,t}^k."""
    adj = adjacency(n, edges)
    if len(left) != s or len(right) != t or len(set(left) | set(right)) != s + t:
        return False
    seen = set(left) | set(right)
    for i in range(s):
        for j in range(t):
            p = paths[i][j]
            if len(p) != k + 1 or p[0] != left[i] or p[-1] != right[j]:
                return False
            if any(p[a + 1] not in adj[p[a]] for a in range(k)):
                return False
            inner = set(p[1:-1])
            if len(inner) != k - 1 or inner & seen:
                return False
            seen |= inner
    return True
