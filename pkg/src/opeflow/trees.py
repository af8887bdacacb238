# -*- coding=utf-8 -*-
"""Weighted trees and their weight factors.

A tree is a :class:`networkx.Graph` whose nodes are external vertices
``("e", i)``, internal vertices ``("i", j)`` and at most one special vertex
``"s"``.  Momentum is conserved at every vertex except the special one, so
the momentum of a line is the sum of the external momenta behind it, seen
from the special vertex when there is one.

Weights per component::

    line                      sup(|q|, lam)**-2
    external vertex           sup(|q|, lam)**(3 - [v_e])
    internal vertex, valence  sup(|q|, lam)**(4 - k)
    special vertex, valence   sup(mu, lam)**-k
    particular                sup(|q|, mu, lam)**[v_p]
    derivatives               prod_i sup(eta_i, lam)**-|w_i|
"""
import itertools
import math

from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import InconsistentMomentumError, TreeFusionError
from .kinematics import Kinematics
from .misc import _get_logger
from .operators import AXES, MultiIndex

__all__ = [
    "SPECIAL",
    "WeightedTree",
    "external",
    "internal",
    "line_momenta",
    "weight_terms",
    "weight_factor",
    "tree_dimension",
    "closed_form_dimension",
    "classify",
    "reduce",
    "is_fully_reduced",
    "fuse",
    "amputate",
    "random_tree",
    "random_momenta",
    "fully_reduced_trees",
    "gs",
    "large_momentum_factor",
]

logger = _get_logger(__name__)

SPECIAL = "s"
EXTERNAL_DIMENSIONS = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3))


def external(i):
    return ("e", i)


def internal(j):
    return ("i", j)


def _kind(node):
    if node == SPECIAL:
        return "special"
    return "external" if node[0] == "e" else "internal"


class WeightedTree(object):
    """A weighted tree ``T`` or, with a special vertex, ``T*``.

    :param graph: The tree; external nodes must be ``("e", 0) ... ("e", n-1)``
    :param dimensions: ``[v_e]`` per external vertex, each in ``[1, 3]``
    :param derivatives: Multi-index ``w_i`` per external vertex
    :param particular: The particular dimension ``[v_p]``
    :param momenta: Optional ``(n, 4)`` external momenta carried by the tree
    """

    def __init__(self, graph, dimensions, derivatives=None, particular=0, momenta=None):
        self.graph = graph
        self.dimensions = tuple(Fraction(d) if not isinstance(d, float) else d for d in dimensions)
        n = len(self.dimensions)
        if derivatives is None:
            derivatives = [MultiIndex.zero()] * n
        self.derivatives = tuple(MultiIndex(w) for w in derivatives)
        self.particular = particular
        self.momenta = None if momenta is None else np.asarray(momenta, dtype=float).reshape(-1, AXES)
        self.validate()

    @property
    def externals(self):
        # type: () -> List[tuple]
        return [external(i) for i in range(len(self.dimensions))]

    @property
    def internals(self):
        return sorted(n for n in self.graph.nodes if _kind(n) == "internal")

    @property
    def has_special(self):
        # type: () -> bool
        return SPECIAL in self.graph

    @property
    def n_external(self):
        # type: () -> int
        return len(self.dimensions)

    @property
    def order(self):
        # type: () -> Tuple[int, int]
        return self.n_external, len(self.internals)

    def valence(self, node):
        # type: (object) -> int
        return self.graph.degree[node]

    def validate(self):
        graph = self.graph
        if len(self.derivatives) != self.n_external:
            raise ValueError("one derivative multi-index per external vertex is required")
        if not graph.number_of_nodes() or not nx.is_tree(graph):
            raise ValueError("weighted trees must be connected and acyclic")
        nodes = set(graph.nodes)
        if {n for n in nodes if _kind(n) == "external"} != set(self.externals):
            raise ValueError("external vertices must be numbered consecutively from 0")
        for node in self.externals:
            if graph.degree[node] != 1:
                raise ValueError("external vertex {0} must have valence 1".format(node))
            (neighbour,) = graph.neighbors(node)
            if _kind(neighbour) == "external":
                raise ValueError("external vertices may not be joined directly")
        for node in self.internals:
            if not 1 <= graph.degree[node] <= 4:
                raise ValueError("internal vertex {0} has valence outside 1..4".format(node))
        for d in self.dimensions:
            if not 1 <= d <= 3:
                raise ValueError("external dimensions must lie in [1, 3]")
        if not self.has_special:
            if not self.n_external or not self.internals:
                raise ValueError("trees without special vertex need an external and an internal vertex")
            if self.derivatives and self.derivatives[-1].order:
                raise ValueError("the last external vertex of a tree without special vertex carries no derivatives")
        if self.momenta is not None and len(self.momenta) != self.n_external:
            raise ValueError("one momentum per external vertex is required")

    def copy(self, **changes):
        # type: (...) -> WeightedTree
        params = {
            "graph": self.graph.copy(),
            "dimensions": self.dimensions,
            "derivatives": self.derivatives,
            "particular": self.particular,
            "momenta": self.momenta,
        }
        params.update(changes)
        return WeightedTree(**params)

    def with_momenta(self, momenta):
        # type: (Sequence) -> WeightedTree
        return self.copy(momenta=momenta)

    @property
    def derivative_order(self):
        # type: () -> int
        return sum(w.order for w in self.derivatives)

    def __repr__(self):
        return "WeightedTree(order={0}, special={1})".format(self.order, self.has_special)


def _resolve_momenta(tree, momenta):
    if momenta is None:
        momenta = tree.momenta
    if momenta is None:
        raise InconsistentMomentumError("no momenta given for the tree")
    q = np.asarray(momenta, dtype=float).reshape(-1, AXES)
    if len(q) != tree.n_external:
        raise InconsistentMomentumError(
            "expected {0} momenta, got {1}".format(tree.n_external, len(q))
        )
    if not tree.has_special and not Kinematics(q).is_conserving:
        raise InconsistentMomentumError(
            "external momenta of a tree without special vertex must add to zero"
        )
    return q


def line_momenta(tree, momenta=None):
    # type: (WeightedTree, Optional[Sequence]) -> Dict[frozenset, np.ndarray]
    """Momentum of every line, keyed by the frozenset of its end points."""
    q = _resolve_momenta(tree, momenta)
    root = SPECIAL if tree.has_special else next(iter(tree.internals))
    parent = dict(nx.dfs_predecessors(tree.graph, root))
    sums = {}
    for node in nx.dfs_postorder_nodes(tree.graph, root):
        total = q[node[1]].copy() if _kind(node) == "external" else np.zeros(AXES)
        for child in tree.graph.neighbors(node):
            if parent.get(child) == node:
                total += sums[child]
        sums[node] = total
    return {frozenset((child, up)): sums[child] for child, up in parent.items()}


def weight_terms(tree, momenta=None, mu=1.0, lam=0.0):
    # type: (WeightedTree, Optional[Sequence], float, float) -> List[Tuple[float, float]]
    """The ``(base, exponent)`` pairs whose product is the tree weight."""
    q = _resolve_momenta(tree, momenta)
    lines = {edge: float(np.linalg.norm(p)) for edge, p in line_momenta(tree, q).items()}
    graph = tree.graph
    terms = [(max(norm, lam), -2.0) for norm in lines.values()]
    for i in range(tree.n_external):
        terms.append((max(float(np.linalg.norm(q[i])), lam), float(3 - tree.dimensions[i])))
    for node in tree.internals:
        incident = [lines[frozenset((node, other))] for other in graph.neighbors(node)]
        terms.append((max(max(incident), lam), float(4 - graph.degree[node])))
    if tree.has_special:
        terms.append((max(mu, lam), -float(graph.degree[SPECIAL])))
    kinematics = Kinematics(q, mu)
    terms.append((max(kinematics.norm, mu, lam), float(tree.particular)))
    etas = kinematics.eta_bar_values if tree.has_special else kinematics.eta_values
    for w, value in zip(tree.derivatives, etas):
        terms.append((max(value, lam), -float(w.order)))
    return [(base, exponent) for base, exponent in terms if exponent]


def weight_factor(tree, momenta=None, mu=1.0, lam=0.0):
    # type: (WeightedTree, Optional[Sequence], float, float) -> float
    """The weight ``G^{T,w}(q; mu, lam)`` of a tree.

    A vanishing scale raised to a negative power gives ``inf``.

    :raises InconsistentMomentumError: If a tree without special vertex does
        not conserve momentum
    """
    log_weight = 0.0
    for base, exponent in weight_terms(tree, momenta, mu, lam):
        log_weight += exponent * (math.log(base) if base > 0 else -math.inf)
    if math.isnan(log_weight):
        return math.nan
    return math.exp(log_weight) if log_weight < 700 else math.inf


def tree_dimension(tree):
    """``[T]``: the sum of the exponents of all weight factors."""
    graph = tree.graph
    total = sum((3 - d for d in tree.dimensions), Fraction(0))
    total += sum(4 - graph.degree[n] for n in tree.internals)
    if tree.has_special:
        total -= graph.degree[SPECIAL]
    total += tree.particular - 2 * graph.number_of_edges() - tree.derivative_order
    return total


def closed_form_dimension(tree):
    """``[T] = 4 + [v_p] - sum [v_e] - |w|``, without the 4 for special trees."""
    base = 0 if tree.has_special else 4
    return base + tree.particular - sum(tree.dimensions, Fraction(0)) - tree.derivative_order


def classify(tree):
    # type: (WeightedTree) -> str
    dimension = tree_dimension(tree)
    if dimension > 0:
        return "relevant"
    if dimension < 0:
        return "irrelevant"
    return "marginal"


def _reduction_step(graph):
    """Apply one reduction in place; return whether anything changed."""
    for node in sorted((n for n in graph.nodes if _kind(n) == "internal"), key=str):
        neighbours = list(graph.neighbors(node))
        if len(neighbours) == 2:
            if all(_kind(n) == "external" for n in neighbours):
                continue
            graph.remove_node(node)
            graph.add_edge(*neighbours)
            return True
        if len(neighbours) == 1 and _kind(neighbours[0]) in ("internal", "special"):
            graph.remove_node(node)
            return True
    return False


def _relabel_internals(graph):
    mapping = {}
    for j, node in enumerate(sorted((n for n in graph.nodes if _kind(n) == "internal"), key=str)):
        mapping[node] = internal(j)
    return nx.relabel_nodes(graph, mapping)


def reduce(tree):
    # type: (WeightedTree) -> WeightedTree
    """Apply reductions until none is left.

    * drop an internal vertex of valence 2 and fuse its two lines, unless that
      would join two external vertices,
    * drop an internal vertex of valence 1 hanging off an internal or the
      special vertex, together with its line.
    """
    graph = tree.graph.copy()
    steps = 0
    while _reduction_step(graph):
        steps += 1
    logger.debug("reduced tree in %d steps", steps)
    return tree.copy(graph=_relabel_internals(graph))


def is_fully_reduced(tree):
    # type: (WeightedTree) -> bool
    return not _reduction_step(tree.graph.copy())


def _next_internal(tree):
    return 1 + max((node[1] for node in tree.internals), default=-1)


def _shift_nodes(graph, external_offset, internal_offset):
    mapping = {}
    for node in graph.nodes:
        kind = _kind(node)
        if kind == "external":
            mapping[node] = external(node[1] + external_offset)
        elif kind == "internal":
            mapping[node] = internal(node[1] + internal_offset)
    return nx.relabel_nodes(graph, mapping)


def _concat_momenta(first, second):
    if first.momenta is None or second.momenta is None:
        return None
    return np.vstack([first.momenta, second.momenta])


def _merge_special(first, second):
    if not (first.has_special and second.has_special):
        raise TreeFusionError("special merge needs two trees with special vertices")
    offset = _next_internal(first)
    other = _shift_nodes(second.graph, first.n_external, offset)
    graph = nx.compose(first.graph, other)
    return WeightedTree(
        graph,
        first.dimensions + second.dimensions,
        first.derivatives + second.derivatives,
        first.particular + second.particular,
        _concat_momenta(first, second),
    )


def _join_lines(first, second, left, right, atol):
    if first.has_special and second.has_special:
        raise TreeFusionError("line join needs at most one special vertex; use special merge")
    if left is None:
        left = first.n_external - 1
    if right is None:
        right = 0
    if not first.has_special and left != first.n_external - 1:
        raise TreeFusionError("without special vertex the joined vertex of the first tree must be its last")
    if not second.has_special and right != 0:
        raise TreeFusionError("without special vertex the joined vertex of the second tree must be its first")
    if first.momenta is None or second.momenta is None:
        raise TreeFusionError("line join needs momenta on both trees")
    k_left, k_right = first.momenta[left], second.momenta[right]
    if not np.allclose(k_left, -k_right, atol=atol):
        raise TreeFusionError(
            "momenta of the joined vertices do not match", left=k_left.tolist(), right=k_right.tolist()
        )
    if first.derivatives[left].order or second.derivatives[right].order:
        raise TreeFusionError("joined external vertices may not carry derivatives")
    (anchor_left,) = first.graph.neighbors(external(left))
    (anchor_right,) = second.graph.neighbors(external(right))
    g1 = first.graph.copy()
    g1.remove_node(external(left))
    g2 = second.graph.copy()
    g2.remove_node(external(right))
    keep_left = [i for i in range(first.n_external) if i != left]
    keep_right = [i for i in range(second.n_external) if i != right]
    mapping1 = {external(i): ("x", n) for n, i in enumerate(keep_left)}
    mapping2 = {external(i): ("x", len(keep_left) + n) for n, i in enumerate(keep_right)}
    mapping2.update({node: ("j", node[1]) for node in g2.nodes if _kind(node) == "internal"})
    g1 = nx.relabel_nodes(g1, mapping1)
    g2 = nx.relabel_nodes(g2, mapping2)
    anchor_left = mapping1.get(anchor_left, anchor_left)
    anchor_right = mapping2.get(anchor_right, anchor_right)
    graph = nx.compose(g1, g2)
    graph.add_edge(anchor_left, anchor_right)
    final = {}
    for node in graph.nodes:
        if node != SPECIAL and node[0] == "x":
            final[node] = external(node[1])
    offset = _next_internal(first)
    for node in graph.nodes:
        if node != SPECIAL and node[0] == "j":
            final[node] = internal(node[1] + offset)
    graph = nx.relabel_nodes(graph, final)
    return WeightedTree(
        graph,
        [first.dimensions[i] for i in keep_left] + [second.dimensions[i] for i in keep_right],
        [first.derivatives[i] for i in keep_left] + [second.derivatives[i] for i in keep_right],
        first.particular + second.particular,
        np.vstack([first.momenta[keep_left], second.momenta[keep_right]]),
    )


def fuse(first, second, mode="special-merge", left=None, right=None, atol=1e-9):
    # type: (WeightedTree, WeightedTree, str, Optional[int], Optional[int], float) -> WeightedTree
    """Fuse two trees.

    ``special-merge`` identifies the special vertices of two ``T*`` trees.
    ``line-join`` removes the external vertex ``left`` of ``first`` (momentum
    ``-k``) and ``right`` of ``second`` (momentum ``k``) and joins their lines.

    :raises TreeFusionError: If the trees are not compatible
    """
    if mode == "special-merge":
        return _merge_special(first, second)
    if mode == "line-join":
        return _join_lines(first, second, left, right, atol)
    raise ValueError("unknown fusion mode {0!r}".format(mode))


def amputate(tree, vertex):
    # type: (WeightedTree, int) -> WeightedTree
    """Remove external vertex ``vertex`` and its line, then reduce again."""
    if tree.n_external < 2:
        raise TreeFusionError("cannot amputate the only external vertex")
    if tree.momenta is not None and np.any(tree.momenta[vertex]):
        raise TreeFusionError("only external vertices with vanishing momentum can be amputated")
    graph = tree.graph.copy()
    graph.remove_node(external(vertex))
    keep = [i for i in range(tree.n_external) if i != vertex]
    graph = nx.relabel_nodes(graph, {external(i): external(n) for n, i in enumerate(keep)})
    momenta = None if tree.momenta is None else tree.momenta[keep]
    derivatives = [tree.derivatives[i] for i in keep]
    if not tree.has_special and derivatives[-1].order:
        raise TreeFusionError("the new last external vertex carries derivatives")
    amputated = WeightedTree(
        graph,
        [tree.dimensions[i] for i in keep],
        derivatives,
        tree.particular,
        momenta,
    )
    return reduce(amputated)


def random_momenta(rng, n, special=False, scale=1.0):
    """``n`` random momenta, conserving unless ``special``."""
    q = rng.normal(scale=scale, size=(n, AXES))
    if not special and n:
        q[-1] = -q[:-1].sum(axis=0)
    return q


def random_tree(
    rng,
    special=False,
    max_external=8,
    max_internal=6,
    max_derivative=0,
    particular=0,
    dimensions=None,
    max_attempts=1000,
):
    """A random valid weighted tree, by rejection sampling.

    The internal and special vertices form a random core tree; external
    vertices are attached to core vertices with free valence.
    """
    for _ in range(max_attempts):
        n_internal = int(rng.integers(0 if special else 1, max_internal + 1))
        n_external = int(rng.integers(0 if special else 1, max_external + 1))
        core = [internal(j) for j in range(n_internal)] + ([SPECIAL] if special else [])
        if not core:
            continue
        graph = nx.Graph()
        graph.add_nodes_from(core)
        if len(core) == 2:
            graph.add_edge(*core)
        elif len(core) > 2:
            sequence = [int(x) for x in rng.integers(0, len(core), size=len(core) - 2)]
            shape = nx.from_prufer_sequence(sequence)
            graph.add_edges_from((core[a], core[b]) for a, b in shape.edges)
        if any(graph.degree[n] > 4 for n in core if n != SPECIAL):
            continue
        failed = False
        for i in range(n_external):
            free = [n for n in core if n == SPECIAL or graph.degree[n] < 4]
            if not free:
                failed = True
                break
            graph.add_edge(external(i), free[int(rng.integers(len(free)))])
        if failed:
            continue
        if any(graph.degree[n] == 0 for n in core if n != SPECIAL):
            continue
        if dimensions is None:
            dims = [EXTERNAL_DIMENSIONS[int(k)] for k in rng.integers(0, len(EXTERNAL_DIMENSIONS), n_external)]
        else:
            dims = [dimensions] * n_external
        derivatives = []
        for i in range(n_external):
            order = int(rng.integers(0, max_derivative + 1))
            if not special and i == n_external - 1:
                order = 0
            comps = [0] * AXES
            for axis in rng.integers(0, AXES, order):
                comps[int(axis)] += 1
            derivatives.append(MultiIndex(comps))
        return WeightedTree(graph, dims, derivatives, particular)
    raise RuntimeError("no valid random tree after {0} attempts".format(max_attempts))


def _core_trees(size):
    # type: (int) -> Iterator[nx.Graph]
    if size == 1:
        graph = nx.Graph()
        graph.add_node(0)
        yield graph
        return
    for graph in nx.nonisomorphic_trees(size):
        yield graph


def _attachments(capacities, n_external):
    """Ways to hand out ``n_external`` lines given ``(low, high)`` per core vertex."""
    if not capacities:
        if n_external == 0:
            yield ()
        return
    (low, high), rest = capacities[0], capacities[1:]
    for count in range(low, min(high, n_external) + 1):
        for tail in _attachments(rest, n_external - count):
            yield (count,) + tail


def _labelled_attachments(core_nodes, counts, n_external):
    slots = [node for node, count in zip(core_nodes, counts) for _ in range(count)]
    seen = set()
    for perm in itertools.permutations(range(n_external)):
        assignment = tuple(sorted(zip(slots, perm), key=lambda item: item[1]))
        key = tuple(node for node, _ in assignment)
        if key in seen:
            continue
        seen.add(key)
        yield key


def _exceptional_trees(n_external):
    graph = nx.Graph()
    if n_external == 1:
        graph.add_edge(external(0), internal(0))
    else:
        graph.add_edge(external(0), internal(0))
        graph.add_edge(internal(0), external(1))
    return [graph]


def _same_tree(first, second):
    return nx.is_isomorphic(first, second, node_match=lambda a, b: a["label"] == b["label"])


def _labelled_graph(graph):
    labelled = graph.copy()
    for node in labelled.nodes:
        kind = _kind(node)
        labelled.nodes[node]["label"] = node if kind == "external" else kind
    return labelled


def fully_reduced_trees(n_external, special=False, dimensions=None):
    # type: (int, bool, Optional[Sequence]) -> List[WeightedTree]
    """The finite set of fully reduced trees with ``n_external`` labelled external vertices.

    Apart from the exceptional one- and two-vertex trees without special
    vertex, internal vertices have valence 3 or 4.
    """
    if dimensions is None:
        dimensions = [Fraction(1)] * n_external
    if not special and n_external in (1, 2):
        return [WeightedTree(g, dimensions) for g in _exceptional_trees(n_external)]
    if not special and n_external < 1:
        return []
    graphs = []  # type: List[nx.Graph]
    max_internal = n_external if special else n_external - 2
    for n_internal in range(0 if special else 1, max_internal + 1):
        size = n_internal + (1 if special else 0)
        if size == 0:
            continue
        for shape in _core_trees(size):
            specials = list(shape.nodes) if special else [None]
            for special_node in specials:
                names = {}
                j = 0
                for node in sorted(shape.nodes):
                    if node == special_node:
                        names[node] = SPECIAL
                    else:
                        names[node] = internal(j)
                        j += 1
                core = nx.relabel_nodes(shape, names)
                if any(core.degree[n] > 4 for n in core.nodes if n != SPECIAL):
                    continue
                core_nodes = sorted(core.nodes, key=str)
                capacities = []
                for node in core_nodes:
                    if node == SPECIAL:
                        capacities.append((0, n_external))
                    else:
                        degree = core.degree[node]
                        capacities.append((max(0, 3 - degree), max(0, 4 - degree)))
                for counts in _attachments(capacities, n_external):
                    for assignment in _labelled_attachments(core_nodes, counts, n_external):
                        graph = core.copy()
                        for i, node in enumerate(assignment):
                            graph.add_edge(external(i), node)
                        labelled = _labelled_graph(graph)
                        if any(_same_tree(labelled, other) for other in graphs):
                            continue
                        graphs.append(labelled)
    trees = []
    for graph in graphs:
        for node in graph.nodes:
            graph.nodes[node].pop("label", None)
        trees.append(WeightedTree(graph, dimensions))
    logger.debug(
        "%d fully reduced trees with %d externals (special=%s)", len(trees), n_external, special
    )
    return trees


def gs(s, dimension, r, w_abs):
    """``g^(s)([O], r, |w|) = ([O] + s)(r + 3s - 3) + sup([O] + s - |w|, 0)``.

    Broadcasts over numpy arrays; scalar arguments give a float.

    :raises ValueError: Unless ``s >= 1``, ``[O] >= 0`` and ``r >= 0``
    """
    s, dimension, r, w_abs = np.broadcast_arrays(
        *(np.asarray(value, dtype=float) for value in (s, dimension, r, w_abs))
    )
    if np.any(s < 1) or np.any(dimension < 0) or np.any(r < 0):
        raise ValueError("g^(s) is defined for s >= 1, [O] >= 0 and r >= 0")
    value = (dimension + s) * (r + 3 * s - 3) + np.maximum(dimension + s - w_abs, 0)
    return float(value) if value.ndim == 0 else value


def large_momentum_factor(momenta, mu, lam, exponent):
    """``sup(1, |q| / sup(mu, lam))**exponent``."""
    norm = Kinematics(momenta, mu).norm
    return max(1.0, norm / max(mu, lam)) ** exponent
