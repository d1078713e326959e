"""Hard single-neuron instances built from vertex-coloured graphs.

Each vertex becomes a label-1 point on a rational unit circle placed in the
two coordinates owned by its colour. Each incompatible vertex pair (same
colour, or different colours without an edge) contributes its midpoint with
label 0 and a large multiplicity ``M``. A single ReLU reaches loss
``N - k`` on the instance exactly when the graph has a clique using one
vertex of every colour.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from ._numeric import int_root_ceil
from .core import Dataset, Label, LabeledPoint, Neuron, ReluNetwork, eval_network, rational

CLIQUE_SEARCH_BOUND = 10**6


@dataclass(frozen=True)
class ColoredGraph:
    """Vertices ``(id, colour)`` with colours ``1..k_colors``; undirected edges."""

    vertices: tuple
    edges: frozenset
    k_colors: int

    def __post_init__(self):
        verts = tuple((str(v), int(c)) for v, c in self.vertices)
        object.__setattr__(self, "vertices", verts)
        ids = [v for v, _ in verts]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vertex id")
        if self.k_colors < 1:
            raise ValueError("need at least one colour")
        for v, c in verts:
            if not 1 <= c <= self.k_colors:
                raise ValueError(f"vertex {v!r} has colour {c} outside 1..{self.k_colors}")
        edges = set()
        known = set(ids)
        for e in self.edges:
            u, v = (str(t) for t in e)
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in known or v not in known:
                raise ValueError(f"edge {u!r}-{v!r} mentions an unknown vertex")
            edges.add(frozenset((u, v)))
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def build(cls, colors: dict | list, edges, k_colors: int | None = None) -> "ColoredGraph":
        """``colors`` maps id -> colour (a list is read as ids 0..N-1)."""
        items = list(colors.items()) if isinstance(colors, dict) else list(enumerate(colors))
        k = k_colors if k_colors is not None else max(c for _, c in items)
        return cls(tuple(items), frozenset(frozenset(map(str, e)) for e in edges), k)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def color_of(self, v) -> int:
        return dict(self.vertices)[str(v)]

    def adjacent(self, u, v) -> bool:
        return frozenset((str(u), str(v))) in self.edges

    def classes(self) -> list:
        """Vertex ids per colour, in input order."""
        out = [[] for _ in range(self.k_colors)]
        for v, c in self.vertices:
            out[c - 1].append(v)
        return out

    def circle_index(self) -> dict:
        """Position (1-based) of every vertex inside its colour class."""
        idx = {}
        for cls_ in self.classes():
            for i, v in enumerate(cls_, start=1):
                idx[v] = i
        return idx

    def is_multicolored_clique(self, vs) -> bool:
        vs = [str(v) for v in vs]
        if len(vs) != self.k_colors or len(set(vs)) != len(vs):
            return False
        colors = dict(self.vertices)
        if any(v not in colors for v in vs):
            return False
        if sorted(colors[v] for v in vs) != list(range(1, self.k_colors + 1)):
            return False
        return all(self.adjacent(u, v) for u, v in combinations(vs, 2))


@dataclass(frozen=True)
class ReductionOutput:
    dataset: Dataset
    gamma: Fraction
    delta: Fraction
    m_copies: int
    p: Fraction
    decode_map: dict = field(default_factory=dict)  # point index -> vertex id
    graph: ColoredGraph | None = None


def circle_point(i: int) -> tuple:
    """The ``i``-th rational point ``((1-i^2)/(1+i^2), 2i/(1+i^2))`` on the unit circle."""
    if i < 1:
        raise ValueError("circle index starts at 1")
    q = 1 + i * i
    return Fraction(1 - i * i, q), Fraction(2 * i, q)


def compute_params(graph: ColoredGraph, p) -> tuple:
    """``(gamma, delta, M)`` for the instance built from ``graph`` at loss exponent ``p``.

    Both inequalities the construction relies on are re-checked exactly:
    ``(1-delta)^p (N-k+1) > gamma`` and ``M delta^p > gamma``. For ``p = a/b``
    they are compared after raising both sides to the power ``b``.
    """
    p = rational(p)
    if p < 0:
        raise ValueError("p must be non-negative")
    N, k = graph.n, graph.k_colors
    if N < k:
        raise ValueError(f"graph has {N} vertices but {k} colours")
    if any(not c for c in graph.classes()):
        raise ValueError("every colour class needs at least one vertex")
    gamma = Fraction(N - k)
    if p == 0:
        delta = Fraction(1, 2)
        M = N - k + 1
    else:
        pt = max(p, Fraction(1))
        delta = 1 / (2 * pt * (N - k + 1))
        a, b = p.numerator, p.denominator
        M = int_root_ceil(gamma ** b * (1 / delta) ** a, b) + 1
    _check_params(N, k, gamma, delta, M, p)
    return gamma, delta, M


def _check_params(N, k, gamma, delta, M, p):
    a, b = p.numerator, p.denominator
    if not (1 - delta) ** a * Fraction(N - k + 1) ** b > gamma ** b:
        raise AssertionError("(1-delta)^p (N-k+1) > gamma fails")
    if not Fraction(M) ** b * delta ** a > gamma ** b:
        raise AssertionError("M delta^p > gamma fails")
    # M grows like (N-k)(2(N-k+1) max(p,1))^p: polynomial in the graph size
    bound = (N + 1) * (2 * max(p, Fraction(1)) * (N + 1)) ** (a // b + 1) + 2
    if M > bound:
        raise AssertionError(f"multiplicity {M} is not polynomially bounded")


def _vertex_point(graph: ColoredGraph, color: int, i: int) -> tuple:
    x = [Fraction(0)] * (2 * graph.k_colors)
    cx, cy = circle_point(i)
    x[2 * (color - 1)] = cx
    x[2 * (color - 1) + 1] = cy
    return tuple(x)


def incompatible_pairs(graph: ColoredGraph) -> list:
    """Unordered vertex pairs that cannot both lie in a multicoloured clique."""
    colors = dict(graph.vertices)
    ids = [v for v, _ in graph.vertices]
    return [(u, v) for u, v in combinations(ids, 2)
            if colors[u] == colors[v] or not graph.adjacent(u, v)]


def generate_instance(graph: ColoredGraph, p) -> ReductionOutput:
    p = rational(p)
    gamma, delta, M = compute_params(graph, p)
    idx = graph.circle_index()
    pos = {}
    pts = []
    decode = {}
    for v, c in graph.vertices:
        pos[v] = _vertex_point(graph, c, idx[v])
        decode[len(pts)] = v
        pts.append(LabeledPoint(pos[v], Label.scalar(1), 1))
    for u, v in incompatible_pairs(graph):
        mid = tuple((a + b) / 2 for a, b in zip(pos[u], pos[v]))
        pts.append(LabeledPoint(mid, Label.scalar(0), M))
    data = Dataset(2 * graph.k_colors, tuple(pts))
    return ReductionOutput(data, gamma, delta, M, p, decode, graph)


def _epsilon(graph: ColoredGraph) -> Fraction:
    nmax = max(len(c) for c in graph.classes())
    if nmax == 1:
        return Fraction(1)
    pts = [circle_point(i) for i in range(1, nmax + 1)]
    top = max(a[0] * b[0] + a[1] * b[1] for a, b in combinations(pts, 2))
    return 1 - top


def witness_weights(graph: ColoredGraph, clique, p=1) -> ReluNetwork:
    """Single neuron reaching loss exactly ``N - k`` from a multicoloured clique."""
    clique = [str(v) for v in clique]
    if not graph.is_multicolored_clique(clique):
        raise ValueError("not a multicoloured clique of the graph")
    idx = graph.circle_index()
    colors = dict(graph.vertices)
    eps = _epsilon(graph)
    scale = 2 / eps
    w = [Fraction(0)] * (2 * graph.k_colors)
    for v in clique:
        c = colors[v]
        cx, cy = circle_point(idx[v])
        w[2 * (c - 1)] = scale * cx
        w[2 * (c - 1) + 1] = scale * cy
    return ReluNetwork((Neuron(w, 1 - scale, 1),))


def decode_clique(net: ReluNetwork, out: ReductionOutput) -> list:
    """Vertices whose point is predicted above ``delta``, in input order."""
    pts = out.dataset.points
    return [out.decode_map[i] for i in sorted(out.decode_map)
            if eval_network(net, pts[i].x) > out.delta]


def brute_force_multicolored_clique(graph: ColoredGraph, bound: int = CLIQUE_SEARCH_BOUND):
    """Some clique with one vertex per colour (ids in colour order), or ``None``."""
    classes = graph.classes()
    size = 1
    for c in classes:
        size *= len(c)
    if size > bound:
        raise ValueError(f"{size} colour combinations exceed the search bound {bound}")
    for combo in product(*classes):
        if all(graph.adjacent(u, v) for u, v in combinations(combo, 2)):
            return list(combo)
    return None
