"""Interaction topologies.

Players see each other through an undirected, unweighted visual-coupling
graph. Four named constructors cover the structures used in the
experiments (complete, ring, path obtained by deleting one ring edge,
star) plus a generic constructor for arbitrary symmetric 0/1 matrices.

Node labels are 1-based in every public interface (player 1..n, matching
the report and CSV conventions); array indexing is 0-based internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "AdjacencyMatrix",
    "complete",
    "ring",
    "ring_minus_edge",
    "star",
    "custom",
]


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Symmetric 0/1 coupling structure over ``n`` players.

    Attributes
    ----------
    n : int
        Player count.
    a : ndarray, shape (n, n)
        Entries in {0, 1}; a[k, h] == a[h, k]; zero diagonal.
    label : str
        Human-readable name used in reports and file names.
    """

    n: int
    a: np.ndarray
    label: str = field(default="custom", compare=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if self.n < 1:
            raise ConfigurationError("n: need at least one player")
        if a.shape != (self.n, self.n):
            raise ConfigurationError(f"a: expected shape ({self.n}, {self.n}), got {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise ConfigurationError("a: entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ConfigurationError("a: coupling must be mutual (symmetric matrix)")
        if np.any(np.diag(a) != 0):
            raise ConfigurationError("a: diagonal must be zero (no self-coupling)")
        object.__setattr__(self, "a", a)
        self.a.setflags(write=False)

    @property
    def degrees(self) -> np.ndarray:
        return self.a.sum(axis=1).astype(int)

    @property
    def edge_count(self) -> int:
        return int(self.a.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edge list with 1-based labels, k < h."""
        ks, hs = np.nonzero(np.triu(self.a))
        return [(int(k) + 1, int(h) + 1) for k, h in zip(ks, hs)]

    def connected_pairs(self) -> list[tuple[int, int]]:
        return self.edges()

    def unconnected_pairs(self) -> list[tuple[int, int]]:
        """Non-adjacent unordered pairs, 1-based, k < h."""
        out = []
        for k in range(self.n):
            for h in range(k + 1, self.n):
                if self.a[k, h] == 0:
                    out.append((k + 1, h + 1))
        return out

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [[k, h] for k, h in self.edges()],
                           "label": self.label})

    @staticmethod
    def from_json(text: str) -> "AdjacencyMatrix":
        obj = json.loads(text)
        n = int(obj["n"])
        a = np.zeros((n, n))
        for k, h in obj["edges"]:
            if not (1 <= k <= n and 1 <= h <= n) or k == h:
                raise ConfigurationError(f"edges: bad edge [{k}, {h}] for n={n}")
            a[k - 1, h - 1] = 1
            a[h - 1, k - 1] = 1
        return AdjacencyMatrix(n, a, label=obj.get("label", "custom"))


def complete(n: int) -> AdjacencyMatrix:
    """All-to-all coupling: every player sees every other."""
    if n < 1:
        raise ConfigurationError("n: need at least one player")
    a = np.ones((n, n)) - np.eye(n)
    return AdjacencyMatrix(n, a, label="complete")


def ring(n: int) -> AdjacencyMatrix:
    """Cyclic coupling: player k sees players k-1 and k+1 (mod n)."""
    if n < 3:
        raise ConfigurationError("n: a cycle needs at least 3 players")
    a = np.zeros((n, n))
    for k in range(n):
        a[k, (k + 1) % n] = 1
        a[(k + 1) % n, k] = 1
    return AdjacencyMatrix(n, a, label="ring")


def ring_minus_edge(n: int, edge_index: int) -> AdjacencyMatrix:
    """Ring with the cyclic edge (edge_index, edge_index+1) removed.

    ``edge_index`` is 1-based: edge i joins players i and i+1, with edge n
    joining players n and 1. Removing edge n yields the chain
    1-2-...-n whose endpoints 1 and n become the external players.
    """
    if not (1 <= edge_index <= n):
        raise ConfigurationError(f"edge_index: must be in 1..{n}, got {edge_index}")
    g = ring(n)
    a = g.a.copy()
    k = edge_index - 1
    h = edge_index % n
    a[k, h] = 0
    a[h, k] = 0
    return AdjacencyMatrix(n, a, label=f"path[{edge_index}]" if edge_index != n else "path")


def path(n: int) -> AdjacencyMatrix:
    """Chain 1-2-...-n; the ring with the edge between players n and 1 removed."""
    return ring_minus_edge(n, n)


def star(n: int, center: int) -> AdjacencyMatrix:
    """Hub-and-leaves coupling: every player sees only the central one.

    ``center`` is the 1-based label of the hub.
    """
    if n < 2:
        raise ConfigurationError("n: a star needs at least 2 players")
    if not (1 <= center <= n):
        raise ConfigurationError(f"center: must be in 1..{n}, got {center}")
    a = np.zeros((n, n))
    ci = center - 1
    for k in range(n):
        if k != ci:
            a[k, ci] = 1
            a[ci, k] = 1
    return AdjacencyMatrix(n, a, label=f"star[{center}]")


def custom(matrix) -> AdjacencyMatrix:
    """Wrap an arbitrary symmetric 0/1 matrix, validating all invariants."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"matrix: expected a square matrix, got shape {a.shape}")
    return AdjacencyMatrix(a.shape[0], a, label="custom")
