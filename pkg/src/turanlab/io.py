"""Graph file formats and atomic output.

Edge lists are ``u v`` per line with ``#`` comments.  If every token is an
integer the ids are used as-is (``n = max id + 1``); otherwise labels are
mapped to dense ids in order of first appearance.  A comment of the form
``# vertices: N`` pins the vertex count so isolated vertices survive a round
trip; other readers simply ignore it.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any

from .errors import InputError
from .graph import Graph, build_graph

GRAPH6_HEADER = ">>graph6<<"
_VERTICES_RE = re.compile(r"^#\s*vertices\s*:\s*(\d+)\s*$")


def parse_edge_list(text: str) -> tuple[Graph, list[str]]:
    """Parse edge-list text; returns the graph and the label of each id."""
    pairs: list[tuple[str, str]] = []
    declared_n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _VERTICES_RE.match(line)
            if m:
                declared_n = int(m.group(1))
            continue
        line = line.split("#", 1)[0]
        tokens = line.split()
        if len(tokens) != 2:
            raise InputError(f"line {lineno}: expected 'u v', got {raw!r}")
        pairs.append((tokens[0], tokens[1]))

    tokens = [t for p in pairs for t in p]
    if all(_is_int(t) for t in tokens):
        ids = [int(t) for t in tokens]
        if any(i < 0 for i in ids):
            raise InputError("negative vertex id in edge list")
        n = max(ids, default=-1) + 1
        if declared_n is not None:
            if declared_n < n:
                raise InputError(f"declared {declared_n} vertices but edge list uses id {n - 1}")
            n = declared_n
        labels = [str(i) for i in range(n)]
        edges = [(int(a), int(b)) for a, b in pairs]
    else:
        index: dict[str, int] = {}
        for t in tokens:
            index.setdefault(t, len(index))
        labels = list(index)
        n = len(labels)
        edges = [(index[a], index[b]) for a, b in pairs]
    return build_graph(edges, n), labels


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def format_edge_list(g: Graph) -> str:
    lines = [f"# vertices: {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def _graph6_size(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(g: Graph) -> str:
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    body = "".join(
        chr(63 + int("".join(map(str, bits[i:i + 6])), 2)) for i in range(0, len(bits), 6)
    )
    return _graph6_size(g.n) + body


def from_graph6(line: str) -> Graph:
    s = line.strip()
    if s.startswith(GRAPH6_HEADER):
        s = s[len(GRAPH6_HEADER):]
    data = [ord(c) - 63 for c in s]
    if not data or any(not 0 <= d <= 63 for d in data):
        raise InputError(f"not a graph6 string: {line!r}")
    if data[0] < 63:
        n, pos = data[0], 1
    elif len(data) > 1 and data[1] < 63:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        pos = 4
    else:
        n = 0
        for d in data[2:8]:
            n = (n << 6) | d
        pos = 8
    need = n * (n - 1) // 2
    body = data[pos:]
    if len(body) != (need + 5) // 6:
        raise InputError(f"graph6 body length {len(body)} does not match n={n}")
    bits = []
    for d in body:
        bits.extend((d >> s) & 1 for s in range(5, -1, -1))
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return build_graph(edges, n)


def read_graph(path: str | os.PathLike[str]) -> Graph:
    """Load an edge-list or graph6 file (first graph only for graph6)."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc}") from exc
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if p.suffix in (".g6", ".graph6") or first.startswith(GRAPH6_HEADER):
        return from_graph6(first)
    return parse_edge_list(text)[0]


def read_graph6_file(path: str | os.PathLike[str]) -> list[Graph]:
    return [from_graph6(ln) for ln in Path(path).read_text().splitlines() if ln.strip()]


def atomic_write_text(path: str | os.PathLike[str], text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{p.name}.", dir=p.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str | os.PathLike[str], payload: Any) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=False, default=json_default) + "\n")


def json_default(obj: Any) -> Any:
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_graph(path: str | os.PathLike[str], g: Graph) -> None:
    atomic_write_text(path, format_edge_list(g))

