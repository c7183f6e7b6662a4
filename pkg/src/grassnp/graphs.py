"""Undirected simple graphs, edge-list/JSON I/O, generators and exact oracles.

Vertices are ``1..n``; each undirected edge is stored once as ``(i, j)`` with
``i < j``. Formulas that sum over both orientations of an edge double the
stored-edge term explicitly.

The exact oracles (clique number, stability number, k-clique decision) are
exponential-time searches meant as ground truth at desk scale.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_ORACLE_VERTICES = 24


class GraphError(ValueError):
    """Invalid graph data or parameters."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        edges = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphError(f"edge {(i, j)} has an endpoint outside 1..{self.n}")
            edges.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def from_edges(cls, n, edges):
        """Build a graph, rejecting duplicate edges (in either orientation)."""
        seen = set()
        for i, j in edges:
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(edges))

    @property
    def m(self):
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def has_edge(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def adjacency(self):
        """0/1 adjacency matrix (symmetric, zero diagonal)."""
        A = np.zeros((self.n, self.n), dtype=int)
        for i, j in self.edges:
            A[i - 1, j - 1] = A[j - 1, i - 1] = 1
        return A

    def complement(self):
        pairs = itertools.combinations(range(1, self.n + 1), 2)
        return Graph(self.n, frozenset(p for p in pairs if p not in self.edges))

    def neighbor_masks(self):
        """Bitmask of neighbours per vertex, bit ``v-1`` for vertex ``v``."""
        masks = [0] * self.n
        for i, j in self.edges:
            masks[i - 1] |= 1 << (j - 1)
            masks[j - 1] |= 1 << (i - 1)
        return masks

    def is_clique(self, vertices):
        vs = list(vertices)
        return all(self.has_edge(a, b) for a, b in itertools.combinations(vs, 2))

    # -- serialization -------------------------------------------------------
    def to_json_dict(self):
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json_dict(cls, data):
        try:
            n = data["n"]
            edges = [tuple(e) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        for e in edges:
            if len(e) != 2 or not all(isinstance(v, int) for v in e):
                raise GraphError(f"malformed edge {list(e)!r}")
            if e[0] >= e[1] and e[0] != e[1]:
                raise GraphError(f"edge {list(e)!r} must be written with i < j")
        return cls.from_edges(n, edges)

    def to_edge_list(self):
        lines = [f"{self.n} {self.m}"]
        lines += [f"{i} {j}" for i, j in self.sorted_edges()]
        return "\n".join(lines) + "\n"


def parse_graph(text):
    """Parse the edge-list format: a header ``n m`` then ``m`` lines ``i j``."""
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty input: expected header line 'n m'")

    def ints(no, ln):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"line {no}: expected two integers, got {ln!r}")
        try:
            return int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {no}: expected two integers, got {ln!r}") from None

    n, m = ints(*lines[0])
    if n < 1 or m < 0:
        raise GraphError(f"line {lines[0][0]}: invalid header {lines[0][1]!r}")
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header announces {m} edges but {len(body)} edge lines follow")
    seen = set()
    for no, ln in body:
        i, j = ints(no, ln)
        if i == j:
            raise GraphError(f"line {no}: self-loop {i} {j}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"line {no}: endpoint out of range 1..{n} in {ln!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"line {no}: duplicate edge {i} {j}")
        seen.add(key)
    return Graph(n, frozenset(seen))


def load_graph(path):
    """Read a graph from ``.json`` or edge-list text."""
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: invalid JSON ({exc})") from exc
        return Graph.from_json_dict(data)
    return parse_graph(text)


# -- exact oracles -----------------------------------------------------------

def _check_oracle_size(g):
    if g.n > MAX_ORACLE_VERTICES:
        raise GraphError(
            f"exact oracles are capped at n <= {MAX_ORACLE_VERTICES} (got n={g.n})")


def _max_clique_mask(g):
    """Branch and bound over bitmasks; vertices tried in decreasing degree."""
    _check_oracle_size(g)
    nbr = g.neighbor_masks()
    order = sorted(range(g.n), key=lambda v: (-bin(nbr[v]).count("1"), v))
    best = [0, 0]  # size, mask

    def grow(size, mask, cand):
        if cand == 0:
            if size > best[0]:
                best[0], best[1] = size, mask
            return
        for v in order:
            if size + bin(cand).count("1") <= best[0]:
                return
            bit = 1 << v
            if not cand & bit:
                continue
            grow(size + 1, mask | bit, cand & nbr[v])
            cand &= ~bit

    grow(0, 0, (1 << g.n) - 1)
    return best[0], best[1]


def clique_number(g):
    """Size of a largest clique, by exhaustive search with degree pruning."""
    return _max_clique_mask(g)[0]


def max_clique(g):
    """A largest clique as a sorted tuple of vertices (deterministic)."""
    _, mask = _max_clique_mask(g)
    return tuple(v + 1 for v in range(g.n) if mask >> v & 1)


def stability_number(g):
    """Size of a largest independent set, i.e. the clique number of the complement."""
    return clique_number(g.complement())


def has_k_clique(g, k):
    if not 1 <= k <= g.n:
        raise GraphError(f"k must lie in 1..{g.n}, got {k}")
    _check_oracle_size(g)
    nbr = g.neighbor_masks()

    def search(need, cand):
        if need == 0:
            return True
        while cand:
            if bin(cand).count("1") < need:
                return False
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            if search(need - 1, cand & nbr[v]):
                return True
        return False

    return search(k, (1 << g.n) - 1)


def find_k_clique(g, k):
    """Some k-clique as a sorted tuple, or ``None``."""
    if not has_k_clique(g, k):
        return None
    for combo in itertools.combinations(range(1, g.n + 1), k):
        if g.is_clique(combo):
            return combo
    raise AssertionError("unreachable: has_k_clique disagrees with enumeration")


# -- generators --------------------------------------------------------------

FAMILIES = ("complete", "cycle", "path", "empty", "petersen", "gnp")


def _bernoulli_stream(seed, num, den):
    """Exact Bernoulli(num/den) draws from the PCG64 raw 64-bit stream.

    A draw is a success iff ``u * den < num * 2**64`` for the next raw word
    ``u``. PCG64's raw output is stable across numpy releases, so edge sets
    are bit-reproducible.
    """
    bitgen = np.random.PCG64(seed)
    threshold = num << 64
    while True:
        for u in bitgen.random_raw(64).tolist():
            yield u * den < threshold


def generate(family, n=None, p=None, seed=0):
    """Deterministic graph generator.

    ``gnp`` takes ``p`` as a rational (``Fraction``, ``"1/2"`` or a pair) and
    visits the pairs ``(i, j)``, ``i < j``, in lexicographic order, one draw
    each. Other families ignore ``p`` and ``seed``.
    """
    if family not in FAMILIES:
        raise GraphError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family == "petersen":
        outer = [(i, i % 5 + 1) for i in range(1, 6)]
        spokes = [(i, i + 5) for i in range(1, 6)]
        inner = [(i + 5, (i + 1) % 5 + 6) for i in range(1, 6)]
        return Graph(10, frozenset(outer + spokes + inner))
    if n is None or int(n) != n or n < 1:
        raise GraphError(f"family {family!r} needs a positive integer n, got {n!r}")
    n = int(n)
    if family == "complete":
        return Graph(n, frozenset(itertools.combinations(range(1, n + 1), 2)))
    if family == "empty":
        return Graph(n, frozenset())
    if family == "path":
        return Graph(n, frozenset((i, i + 1) for i in range(1, n)))
    if family == "cycle":
        if n < 3:
            raise GraphError(f"a cycle needs n >= 3, got {n}")
        return Graph(n, frozenset([(i, i + 1) for i in range(1, n)] + [(1, n)]))
    # gnp
    if p is None:
        raise GraphError("gnp needs an edge probability p")
    if isinstance(p, tuple):
        p = Fraction(*p)
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise GraphError(f"edge probability must lie in [0, 1], got {p}")
    if not 0 <= int(seed) < 2**64:
        raise GraphError(f"seed must be a 64-bit unsigned integer, got {seed}")
    draws = _bernoulli_stream(int(seed), p.numerator, p.denominator)
    pairs = itertools.combinations(range(1, n + 1), 2)
    return Graph(n, frozenset(e for e in pairs if next(draws)))
