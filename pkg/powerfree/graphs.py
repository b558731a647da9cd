import itertools
import math
import random
from collections import deque

import networkx as nx
import sympy

from powerfree import arith
from powerfree import utils

"""
    Builders and certifiers of the graphs behind the constructions:
    projective-plane polarity and incidence graphs, Brown's K_{3,3}-free
    graph, greedy high-girth graphs, and the graph of a set of semiprimes.

    Graphs are networkx Graphs on nodes 0 .. V-1 with an optional node
    attribute 'label' (a prime for graphs on primes) and a graph attribute
    'certificates' holding only properties an exhaustive check confirmed.
"""

MAX_PLANE_ORDER = 101
MAX_BROWN_ORDER = 31
MAX_K33_VERTICES = 2000


def make_graph(vertex_count, edges, labels=None, name=None):
    """
        Simple graph on 0 .. vertex_count-1; repeated edges are merged and
        loops rejected
    """
    G = nx.Graph(name=name or "graph", certificates={})
    G.add_nodes_from(range(vertex_count))
    if labels is not None:
        if len(labels) != vertex_count:
            raise utils.InvalidArgumentError(
                "Invalid labels: need one label per vertex")
        nx.set_node_attributes(G, dict(enumerate(labels)), "label")
    for u, v in edges:
        if u == v:
            raise utils.InvalidArgumentError(f"Invalid edge ({u}, {v}): loop")
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise utils.InvalidArgumentError(
                f"Invalid edge ({u}, {v}): vertex out of range")
        G.add_edge(u, v)
    return G


def labels(G):
    return [G.nodes[v].get("label") for v in range(G.number_of_nodes())]


def certificates(G):
    return G.graph.setdefault("certificates", {})


def _neighbour_masks(G):
    masks = [0] * G.number_of_nodes()
    for u, v in G.edges():
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _check_prime(q, limit, odd=False):
    if not sympy.isprime(q) or (odd and q == 2):
        kind = "an odd prime" if odd else "a prime"
        raise utils.InvalidArgumentError(f"Invalid q '{q}': must be {kind}")
    if q > limit:
        raise utils.ResourceLimitError("q", limit, q)


def projective_points(q):
    """
        Points of PG(2, q) as normalised vectors (first nonzero entry 1)
    """
    points = [(1, a, b) for a in range(q) for b in range(q)]
    points += [(0, 1, b) for b in range(q)]
    points.append((0, 0, 1))
    return points


def _normalise(v, q):
    lead = next(c for c in v if c % q)
    inverse = pow(lead, -1, q)
    return tuple((c * inverse) % q for c in v)


def line_points(x, q):
    """
        The q + 1 points y of PG(2, q) with x.y = 0, for normalised x
    """
    if x[0]:
        _, a, b = x
        raw = [(-(a + b * t), 1, t) for t in range(q)] + [(-b, 0, 1)]
    elif x[1]:
        b = x[2]
        raw = [(1, -b * t, t) for t in range(q)] + [(0, -b, 1)]
    else:
        raw = [(1, t, 0) for t in range(q)] + [(0, 1, 0)]
    return [_normalise(y, q) for y in raw]


def polarity_graph(q):
    """
        Erdos-Renyi graph: points of PG(2, q), x ~ y iff x.y = 0 and x != y.
        It has triangles but no 4-cycle; the C4 certificate is checked
        exhaustively.
    """
    _check_prime(q, MAX_PLANE_ORDER)
    points = projective_points(q)
    index = {p: j for j, p in enumerate(points)}
    edges = []
    for j, x in enumerate(points):
        for y in line_points(x, q):
            k = index[y]
            if j < k:
                edges.append((j, k))
    G = make_graph(len(points), edges, name=f"polarity({q})")
    nx.set_node_attributes(G, dict(enumerate(points)), "point")
    if max_common_neighbours(G) <= 1:
        certificates(G)["c4_free"] = True
    return G


def incidence_graph_pg(q):
    """
        Point-line incidence graph of PG(2, q): points 0 .. V-1, lines
        V .. 2V-1; bipartite, (q+1)-regular and certified girth >= 6
    """
    _check_prime(q, MAX_PLANE_ORDER)
    points = projective_points(q)
    V = len(points)
    index = {p: j for j, p in enumerate(points)}
    edges = [(index[y], V + k) for k, line in enumerate(points)
             for y in line_points(line, q)]
    G = make_graph(2 * V, edges, name=f"incidence({q})")
    nx.set_node_attributes(G, {v: ("point" if v < V else "line")
                               for v in range(2 * V)}, "kind")
    certify_girth(G, 5)
    certificates(G)["bipartite"] = True
    return G


def max_common_neighbours(G):
    """
        Largest number of common neighbours over pairs of distinct
        vertices; at most 1 exactly when there is no 4-cycle
    """
    seen = {}
    best = 0
    for v in G.nodes():
        for a, b in itertools.combinations(sorted(G.neighbors(v)), 2):
            seen[(a, b)] = seen.get((a, b), 0) + 1
            best = max(best, seen[(a, b)])
    return best


def girth(G, limit=None):
    """
        Length of the shortest cycle by a breadth-first search from every
        vertex; math.inf for a forest. With limit, searches stop at depth
        limit/2 and any value above limit is reported as math.inf.
    """
    best = math.inf
    adjacency = {v: list(G.neighbors(v)) for v in G.nodes()}
    for root in adjacency:
        dist = {root: 0}
        parent = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            if limit is not None and 2 * dist[u] + 1 > limit:
                break
            for w in adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    if limit is not None and best > limit:
        return math.inf
    return best


def has_cycle_leq(G, L):
    return girth(G, limit=L) <= L


def certify_girth(G, L):
    """
        Records girth_gt: L when every cycle of G is longer than L

        Returns:
            certified (bool)
    """
    if has_cycle_leq(G, L):
        return False
    current = certificates(G).get("girth_gt", 0)
    certificates(G)["girth_gt"] = max(current, L)
    return True


def _shortest_distance_at_most(adjacency, u, v, depth):
    if u == v:
        return True
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if dist[x] == depth:
            continue
        for w in adjacency[x]:
            if w not in dist:
                if w == v:
                    return True
                dist[w] = dist[x] + 1
                queue.append(w)
    return False


def greedy_high_girth(t, g, seed=0, labels=None):
    """
        Random greedy graph of girth > g on t vertices: pairs are tried in
        a seeded random order and an edge is kept unless its endpoints are
        already joined by a path of length <= g - 1

        Parameters:
            t (int): number of vertices, at least 3
            g (int): forbidden cycle lengths are 3 .. g, at least 3
            seed (int): random seed
            labels (list): optional vertex labels

        Returns:
            G (nx.Graph): certified girth_gt g
    """
    if t < 3 or g < 3:
        raise utils.InvalidArgumentError(
            f"Invalid arguments t={t}, g={g}: need t >= 3 and g >= 3")
    pairs = list(itertools.combinations(range(t), 2))
    random.Random(seed).shuffle(pairs)
    adjacency = {v: [] for v in range(t)}
    edges = []
    for u, v in pairs:
        if _shortest_distance_at_most(adjacency, u, v, g - 1):
            continue
        adjacency[u].append(v)
        adjacency[v].append(u)
        edges.append((u, v))
    G = make_graph(t, edges, labels=labels,
                   name=f"greedy_girth({t}, {g}, seed={seed})")
    certify_girth(G, g)
    return G


def brown_radius(q):
    """
        Squared radius of the sphere in Brown's construction: a quadratic
        residue mod q when q = 3 mod 4, a non-residue when q = 1 mod 4
    """
    residues = {(x * x) % q for x in range(1, q)}
    want_residue = q % 4 == 3
    return min(a for a in range(1, q) if (a in residues) == want_residue)


def brown_graph(q, delta=None):
    """
        Brown's graph on F_q^3: x ~ y iff |x - y|^2 = delta. Certified
        K_{3,3}-free when it is small enough for the exhaustive check.
    """
    _check_prime(q, MAX_BROWN_ORDER, odd=True)
    delta = brown_radius(q) if delta is None else delta % q
    if delta == 0:
        raise utils.InvalidArgumentError("Invalid delta: must be nonzero mod q")
    points = list(itertools.product(range(q), repeat=3))
    sphere = [d for d in points
              if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) % q == delta]
    edges = []
    for j, x in enumerate(points):
        for d in sphere:
            y = ((x[0] + d[0]) % q, (x[1] + d[1]) % q, (x[2] + d[2]) % q)
            k = (y[0] * q + y[1]) * q + y[2]
            if j < k:
                edges.append((j, k))
    G = make_graph(len(points), edges, name=f"brown({q}, delta={delta})")
    G.graph["delta"] = delta
    if len(points) <= MAX_K33_VERTICES:
        certify_k33_free(G)
    return G


def is_k33_free(G):
    """
        Exhaustive check: G contains K_{3,3} iff some three vertices have
        at least three common neighbours
    """
    if G.number_of_nodes() > MAX_K33_VERTICES:
        raise utils.ResourceLimitError("vertex count", MAX_K33_VERTICES,
                                       G.number_of_nodes())
    masks = _neighbour_masks(G)
    for u in range(len(masks)):
        second = 0
        for a in _bits(masks[u]):
            second |= masks[a]
        second &= ~((1 << (u + 1)) - 1)
        for v in _bits(second):
            common = masks[u] & masks[v]
            if common.bit_count() < 3:
                continue
            third = 0
            for a in _bits(common):
                third |= masks[a]
            third &= ~((1 << (v + 1)) - 1)
            for w in _bits(third):
                if (common & masks[w]).bit_count() >= 3:
                    return False
    return True


def certify_k33_free(G):
    if is_k33_free(G):
        certificates(G)["k33_free"] = True
        return True
    return False


def bipartite_split(G, seed=0):
    """
        Crossing subgraph of a uniform half/half vertex split. Subgraph
        certificates (girth, K_{3,3}-freeness) carry over.
    """
    order = list(G.nodes())
    random.Random(seed).shuffle(order)
    side = {v: j < len(order) // 2 for j, v in enumerate(order)}
    H = make_graph(G.number_of_nodes(),
                   [(u, v) for u, v in G.edges() if side[u] != side[v]],
                   name=f"{G.graph.get('name', 'graph')} split {seed}")
    for v, data in G.nodes(data=True):
        H.nodes[v].update(data)
        H.nodes[v]["side"] = int(side[v])
    inherited = {key: value for key, value in certificates(G).items()
                 if key in ("girth_gt", "k33_free", "c4_free")}
    certificates(H).update(inherited)
    certificates(H)["bipartite"] = True
    return H


def semiprime_graph(values):
    """
        Graph on the primes dividing values with an edge p - q for every
        value pq (p != q)
    """
    pairs = set()
    for a in values:
        factors = arith.factor(a).factors if a > 1 else ()
        if len(factors) != 2 or any(e != 1 for _, e in factors):
            raise utils.InvalidArgumentError(
                f"Invalid value '{a}': not a product of two distinct primes")
        pairs.add((factors[0][0], factors[1][0]))
    primes = sorted({p for pair in pairs for p in pair})
    index = {p: j for j, p in enumerate(primes)}
    return make_graph(len(primes), [(index[p], index[q]) for p, q in pairs],
                      labels=primes, name="semiprimes")


def edge_products(G):
    """
        The semiprimes p*q over the edges of a graph labelled by primes
    """
    return sorted(G.nodes[u]["label"] * G.nodes[v]["label"]
                  for u, v in G.edges())


def graph_to_dict(G):
    return {"vertex_count": G.number_of_nodes(),
            "labels": labels(G),
            "edges": sorted([min(u, v), max(u, v)] for u, v in G.edges()),
            "certificates": dict(certificates(G))}


def graph_from_dict(data, source="<graph>"):
    """
        Inverse of graph_to_dict. Certificates are not trusted: they are
        re-checked and only the confirmed ones are kept.
    """
    try:
        vertex_count = int(data["vertex_count"])
        edges = [(int(u), int(v)) for u, v in data["edges"]]
        node_labels = data.get("labels")
    except (KeyError, TypeError, ValueError) as e:
        raise utils.MalformedInputError(source, f"bad graph record ({e})")
    if node_labels is not None and all(x is None for x in node_labels):
        node_labels = None
    try:
        G = make_graph(vertex_count, edges, labels=node_labels, name=source)
    except utils.InvalidArgumentError as e:
        raise utils.MalformedInputError(source, e.message)
    claimed = data.get("certificates") or {}
    if "girth_gt" in claimed:
        certify_girth(G, int(claimed["girth_gt"]))
    if claimed.get("k33_free"):
        certify_k33_free(G)
    if claimed.get("c4_free") and max_common_neighbours(G) <= 1:
        certificates(G)["c4_free"] = True
    return G


def to_dot(G):
    """
        Graphviz DOT text of G, vertices named by label when present
    """
    lines = [f'graph "{G.graph.get("name", "graph")}" {{']
    for v in G.nodes():
        label = G.nodes[v].get("label")
        if label is not None:
            lines.append(f'  {v} [label="{label}"];')
    lines.extend(f"  {u} -- {v};" for u, v in sorted(G.edges()))
    lines.append("}")
    return "\n".join(lines) + "\n"
