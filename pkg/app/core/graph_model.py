"""Path graphs, generalized Laplacians and rank-one update descriptors.

Node labels are 1-based everywhere a user can see them (GraphSpec, text
format, update descriptors); arrays are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from app.core.errors import (
    DimensionMismatchError,
    InvalidGraphError,
    InvalidSizeError,
    InvalidUpdateError,
)


@dataclass(frozen=True)
class GraphSpec:
    n: int
    edges: tuple[tuple[int, int, float], ...] = ()
    self_loops: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise InvalidSizeError(f"graph needs n >= 2 vertices, got {self.n}")
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        loops = tuple((int(i), float(w)) for i, w in self.self_loops)
        seen: set[tuple[int, int]] = set()
        for i, j, _ in edges:
            if i == j:
                raise InvalidGraphError(f"edge ({i}, {j}) is a self-loop; list it under self_loops")
            if not 1 <= i < j <= self.n:
                raise InvalidGraphError(f"edge ({i}, {j}) out of range for n={self.n}")
            if (i, j) in seen:
                raise InvalidGraphError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        loop_nodes: set[int] = set()
        for i, _ in loops:
            if not 1 <= i <= self.n:
                raise InvalidGraphError(f"self-loop at node {i} out of range for n={self.n}")
            if i in loop_nodes:
                raise InvalidGraphError(f"duplicate self-loop at node {i}")
            loop_nodes.add(i)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "self_loops", loops)

    @classmethod
    def path(cls, n: int, weight: float = 1.0) -> "GraphSpec":
        if n < 2:
            raise InvalidSizeError(f"path graph needs n >= 2, got {n}")
        return cls(n=n, edges=tuple((i, i + 1, weight) for i in range(1, n)))


@dataclass(frozen=True)
class GeneralizedLaplacian:
    n: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.shape != (self.n, self.n):
            raise DimensionMismatchError(
                f"laplacian of size {self.n} needs a square matrix, got {matrix.shape}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class SelfLoop:
    node: int
    weight: float

    @property
    def label(self) -> str:
        return f"selfloop:{self.node}:{self.weight:g}"


@dataclass(frozen=True)
class EdgeDelta:
    i: int
    j: int
    weight: float

    @property
    def label(self) -> str:
        return f"edge:{self.i}:{self.j}:{self.weight:g}"


UpdateKind = Union[SelfLoop, EdgeDelta, None]


@dataclass(frozen=True)
class RankOneUpdate:
    rho: float
    v: np.ndarray = field(repr=False)
    kind: UpdateKind = None

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(v)) or not np.isfinite(self.rho):
            raise InvalidUpdateError("rank-one update must be finite")
        if self.rho == 0.0 or not np.any(v):
            raise InvalidUpdateError("rank-one update needs rho != 0 and v != 0")
        v.setflags(write=False)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return int(self.v.shape[0])

    @property
    def label(self) -> str:
        if self.kind is None:
            return f"general:{self.rho:g}"
        return self.kind.label

    @classmethod
    def self_loop(cls, n: int, node: int, weight: float) -> "RankOneUpdate":
        if not 1 <= node <= n:
            raise InvalidUpdateError(f"self-loop node {node} out of range for n={n}")
        v = np.zeros(n)
        v[node - 1] = 1.0
        return cls(rho=weight, v=v, kind=SelfLoop(node, float(weight)))

    @classmethod
    def edge(cls, n: int, i: int, j: int, weight: float) -> "RankOneUpdate":
        if not 1 <= i < j <= n:
            raise InvalidUpdateError(f"edge ({i}, {j}) must satisfy 1 <= i < j <= {n}")
        v = np.zeros(n)
        v[i - 1] = 1.0
        v[j - 1] = -1.0
        return cls(rho=weight, v=v, kind=EdgeDelta(i, j, float(weight)))

    @classmethod
    def general(cls, rho: float, v: Iterable[float]) -> "RankOneUpdate":
        return cls(rho=rho, v=np.fromiter(v, dtype=np.float64))


def path_laplacian(n: int) -> GeneralizedLaplacian:
    if n < 2:
        raise InvalidSizeError(f"path graph needs n >= 2, got {n}")
    diag = np.full(n, 2.0)
    diag[0] = diag[-1] = 1.0
    matrix = np.diag(diag) - np.eye(n, k=1) - np.eye(n, k=-1)
    return GeneralizedLaplacian(n, matrix)


def build_laplacian(g: GraphSpec) -> GeneralizedLaplacian:
    matrix = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        a, b = i - 1, j - 1
        matrix[a, a] += w
        matrix[b, b] += w
        matrix[a, b] -= w
        matrix[b, a] -= w
    for i, w in g.self_loops:
        matrix[i - 1, i - 1] += w
    return GeneralizedLaplacian(g.n, matrix)


def apply_rank_one(laplacian: GeneralizedLaplacian, update: RankOneUpdate) -> GeneralizedLaplacian:
    if update.n != laplacian.n:
        raise DimensionMismatchError(
            f"update has length {update.n}, laplacian has size {laplacian.n}"
        )
    return GeneralizedLaplacian(
        laplacian.n, laplacian.matrix + update.rho * np.outer(update.v, update.v)
    )


def graph_with_update(g: GraphSpec, update: RankOneUpdate) -> GraphSpec:
    kind = update.kind
    if isinstance(kind, SelfLoop):
        loops = dict(g.self_loops)
        loops[kind.node] = loops.get(kind.node, 0.0) + kind.weight
        return GraphSpec(g.n, g.edges, tuple(sorted(loops.items())))
    if isinstance(kind, EdgeDelta):
        edges = {(i, j): w for i, j, w in g.edges}
        key = (kind.i, kind.j)
        edges[key] = edges.get(key, 0.0) + kind.weight
        return GraphSpec(g.n, tuple((i, j, w) for (i, j), w in sorted(edges.items())), g.self_loops)
    raise InvalidUpdateError("only self-loop and edge updates map onto a graph")


def update_from_graph(g: GraphSpec) -> RankOneUpdate:
    """Recover the single self-loop or edge update separating ``g`` from the unit path."""
    path_edges = {(i, i + 1): 1.0 for i in range(1, g.n)}
    edges = {(i, j): w for i, j, w in g.edges}
    deltas: list[RankOneUpdate] = []
    for key in sorted(set(path_edges) | set(edges)):
        delta = edges.get(key, 0.0) - path_edges.get(key, 0.0)
        if delta != 0.0:
            deltas.append(RankOneUpdate.edge(g.n, key[0], key[1], delta))
    for node, w in g.self_loops:
        if w != 0.0:
            deltas.append(RankOneUpdate.self_loop(g.n, node, w))
    if len(deltas) != 1:
        raise InvalidGraphError(
            f"graph differs from the path by {len(deltas)} rank-one terms; expected exactly 1"
        )
    return deltas[0]


def baby_decomposition(g: GraphSpec) -> list[tuple[float, np.ndarray]]:
    terms: list[tuple[float, np.ndarray]] = []
    for i, j, w in g.edges:
        v = np.zeros(g.n)
        v[i - 1] = 1.0
        v[j - 1] = -1.0
        terms.append((w, v))
    for i, w in g.self_loops:
        v = np.zeros(g.n)
        v[i - 1] = 1.0
        terms.append((w, v))
    return terms


def quadratic_form(laplacian: GeneralizedLaplacian, s: np.ndarray) -> float:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (laplacian.n,):
        raise DimensionMismatchError(f"signal has shape {s.shape}, expected ({laplacian.n},)")
    return float(s @ laplacian.matrix @ s)


def path_quadratic_form(s: np.ndarray) -> float:
    s = np.asarray(s, dtype=np.float64)
    diff = np.diff(s)
    return float(diff @ diff)


def parse_graph_spec(text: str) -> GraphSpec:
    n: int | None = None
    edges: list[tuple[int, int, float]] = []
    loops: list[tuple[int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if n is None:
                if len(parts) != 1:
                    raise ValueError("first line must hold the vertex count")
                n = int(parts[0])
            elif parts[0] == "e" and len(parts) == 4:
                edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
            elif parts[0] == "s" and len(parts) == 3:
                loops.append((int(parts[1]), float(parts[2])))
            else:
                raise ValueError(f"unrecognized record {line!r}")
        except ValueError as exc:
            raise InvalidGraphError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise InvalidGraphError("graph text is empty")
    return GraphSpec(n=n, edges=tuple(edges), self_loops=tuple(loops))


def format_graph_spec(g: GraphSpec) -> str:
    lines = [str(g.n)]
    lines.extend(f"e {i} {j} {w!r}" for i, j, w in g.edges)
    lines.extend(f"s {i} {w!r}" for i, w in g.self_loops)
    return "\n".join(lines) + "\n"
