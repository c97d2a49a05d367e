"""Filtered simplicial complexes and clique (flag) expansion."""
from __future__ import annotations

import math
from collections import Counter
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

Simplex = Tuple[int, ...]


class FiltrationError(ValueError):
    pass


def sort_key(simplex: Simplex, value: float):
    return (value, len(simplex), simplex)


class Filtration:
    """Simplices with filtration values, sorted by (value, dimension, vertices).

    With that order every face precedes its cofaces whenever face values never
    exceed coface values, which :meth:`validate` checks.
    """

    def __init__(self, simplices: Sequence[Simplex], values: Sequence[float], presorted: bool = False):
        if len(simplices) != len(values):
            raise FiltrationError("simplices and values differ in length")
        pairs = [(tuple(int(v) for v in s), float(x)) for s, x in zip(simplices, values)]
        for s, _ in pairs:
            if not s or any(a >= b for a, b in zip(s, s[1:])):
                raise FiltrationError(f"simplex {s} is not strictly increasing")
        if not presorted:
            pairs.sort(key=lambda p: sort_key(p[0], p[1]))
        self.simplices: List[Simplex] = [p[0] for p in pairs]
        self.values = np.array([p[1] for p in pairs], dtype=float)

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self) -> Iterator[Tuple[Simplex, float]]:
        return iter(zip(self.simplices, self.values.tolist()))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Filtration)
            and self.simplices == other.simplices
            and np.array_equal(self.values, other.values)
        )

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def size_by_dim(self) -> List[int]:
        counts = Counter(len(s) - 1 for s in self.simplices)
        return [counts.get(d, 0) for d in range(self.dimension + 1)]

    def as_dict(self) -> Dict[Simplex, float]:
        return dict(zip(self.simplices, self.values.tolist()))

    def truncated(self, alpha: float) -> "Filtration":
        """Subcomplex of simplices with value <= alpha."""
        keep = [i for i, x in enumerate(self.values) if x <= alpha]
        return Filtration([self.simplices[i] for i in keep], self.values[keep], presorted=True)

    def validate(self) -> None:
        """Raise unless every face is listed earlier with a value <= the coface's."""
        position = {s: i for i, s in enumerate(self.simplices)}
        if len(position) != len(self.simplices):
            raise FiltrationError("duplicate simplex")
        for i, s in enumerate(self.simplices):
            if len(s) == 1:
                continue
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                pos = position.get(face)
                if pos is None:
                    raise FiltrationError(f"face {face} of {s} is not listed")
                if pos > i or self.values[pos] > self.values[i]:
                    raise FiltrationError(f"face {face} enters after {s}")

    # -- text format: "v1 v2 ... vk ; value" --------------------------------

    def to_text(self) -> str:
        lines = []
        for s, x in self:
            lines.append(" ".join(map(str, s)) + " ; " + format_value(x))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "Filtration":
        simplices, values = [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            try:
                verts, val = line.split(";")
                simplices.append(tuple(int(v) for v in verts.split()))
                values.append(parse_value(val.strip()))
            except ValueError as exc:
                raise FiltrationError(f"line {lineno}: cannot parse {line!r}") from exc
        return cls(simplices, values)


def format_value(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def format_short(x: float) -> str:
    """Shortest text that reads back to the same double."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def parse_value(s: str) -> float:
    return float(s)


class _EdgeTable:
    """Upper adjacency in CSR form with per-edge value and birth, looked up by key."""

    def __init__(self, n, u, v, x, b):
        order = np.lexsort((v, u))
        self.n = n
        self.u, self.v, self.x, self.b = u[order], v[order], x[order], b[order]
        self.keys = self.u * n + self.v
        self.indptr = np.searchsorted(self.u, np.arange(n + 1))

    def lookup(self, a, c):
        """Positions of edges ``(a, c)``; ``-1`` where absent."""
        keys = a * self.n + c
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos] == keys if len(self.keys) else np.zeros(len(keys), bool)
        return np.where(hit, pos, -1)


def _expand(E: _EdgeTable, C, X, B, Cap, vval, caps, alpha_max, windowed, chunk=1 << 22):
    """All cliques one vertex larger than the rows of ``C``, in chunks."""
    last = C[:, -1]
    deg = E.indptr[last + 1] - E.indptr[last]
    start = 0
    while start < len(C):
        stop = start + 1 + int(np.searchsorted(np.cumsum(deg[start:]), chunk))
        stop = min(stop, len(C))
        rows = np.repeat(np.arange(start, stop), deg[start:stop])
        if len(rows) == 0:
            start = stop
            continue
        offs = np.arange(len(rows)) - np.repeat(np.cumsum(deg[start:stop]) - deg[start:stop], deg[start:stop])
        w = E.v[np.repeat(E.indptr[last[start:stop]], deg[start:stop]) + offs]
        x = np.maximum(np.maximum(X[rows], vval[w]), E.x[E.indptr[last[rows]] + offs])
        b = np.maximum(B[rows], E.b[E.indptr[last[rows]] + offs])
        cap = np.minimum(Cap[rows], caps[w])
        ok = np.ones(len(rows), dtype=bool)
        for col in range(C.shape[1] - 1):
            pos = E.lookup(C[rows, col], w)
            ok &= pos >= 0
            pos = np.where(ok, pos, 0)
            x = np.maximum(x, E.x[pos])
            b = np.maximum(b, E.b[pos])
        ok &= x <= alpha_max
        if windowed:
            ok &= b <= cap
        yield np.column_stack([C[rows[ok]], w[ok]]), x[ok], b[ok], cap[ok]
        start = stop


def flag_levels(
    vertex_values: Sequence[float],
    edges,
    edge_values: Sequence[float],
    max_dim: int,
    alpha_max: float = math.inf,
    edge_births: Optional[Sequence[float]] = None,
    vertex_caps: Optional[Sequence[float]] = None,
    keep_top: bool = True,
):
    """Clique expansion of a filtered graph, level by level.

    Returns a list indexed by dimension of ``(simplices, values)`` arrays, or
    of counts for the top level when ``keep_top`` is false. A simplex takes
    the largest value among its vertices and edges. When ``edge_births`` and
    ``vertex_caps`` are given, a simplex is kept only if its largest edge
    birth does not exceed its smallest vertex cap; this is the single-scale
    window used by sparse complexes. Simplices with value above
    ``alpha_max`` are dropped together with their cofaces.
    """
    if max_dim < 0:
        raise FiltrationError("max_dim must be >= 0")
    vval = np.asarray(vertex_values, dtype=float)
    n = len(vval)
    windowed = edge_births is not None
    caps = np.full(n, math.inf) if vertex_caps is None else np.asarray(vertex_caps, dtype=float)
    vkeep = np.nonzero(vval <= alpha_max)[0]
    levels = [(vkeep[:, None], vval[vkeep])]
    if max_dim == 0:
        return levels

    E = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64).reshape(-1, 2)
    if np.any(E[:, 0] == E[:, 1]):
        raise FiltrationError("self loop")
    u, v = E.min(axis=1), E.max(axis=1)
    x = np.maximum(np.asarray(edge_values, dtype=float).reshape(-1), np.maximum(vval[u], vval[v]))
    b = np.asarray(edge_births, dtype=float).reshape(-1) if windowed else np.zeros(len(u))
    cap = np.minimum(caps[u], caps[v])
    ok = x <= alpha_max
    if windowed:
        ok &= b <= cap
    table = _EdgeTable(n, u[ok], v[ok], x[ok], b[ok])
    C = np.column_stack([table.u, table.v])
    X, B, Cap = table.x, table.b, np.minimum(caps[table.u], caps[table.v])
    levels.append((C, X))
    for dim in range(2, max_dim + 1):
        top = dim == max_dim and not keep_top
        parts = []
        count = 0
        for part in _expand(table, C, X, B, Cap, vval, caps, alpha_max, windowed):
            if top:
                count += len(part[0])
            else:
                parts.append(part)
        if top:
            levels.append(count)
            break
        if parts:
            C, X, B, Cap = (np.concatenate(p) for p in zip(*parts))
        else:
            C, X = np.empty((0, dim + 1), dtype=np.int64), np.empty(0)
            B, Cap = np.empty(0), np.empty(0)
        levels.append((C, X))
    return levels


def level_sizes(levels) -> List[int]:
    return [lv if isinstance(lv, (int, np.integer)) else len(lv[1]) for lv in levels]


def filtration_from_levels(levels, labels: Optional[np.ndarray] = None) -> Filtration:
    simplices, values = [], []
    for S, X in levels:
        if labels is not None:
            S = labels[S]
        simplices.extend(map(tuple, S.tolist()))
        values.extend(X.tolist())
    return Filtration(simplices, values)


def flag_filtration(
    vertex_values: Sequence[float],
    edges,
    edge_values: Sequence[float],
    max_dim: int,
    alpha_max: float = math.inf,
    edge_births: Optional[Sequence[float]] = None,
    vertex_caps: Optional[Sequence[float]] = None,
) -> Filtration:
    """Clique expansion of a filtered graph as a :class:`Filtration`; see :func:`flag_levels`."""
    return filtration_from_levels(
        flag_levels(vertex_values, edges, edge_values, max_dim, alpha_max, edge_births, vertex_caps)
    )
