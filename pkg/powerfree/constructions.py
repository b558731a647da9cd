import bisect
import warnings
from dataclasses import dataclass, field
from math import ceil, floor, gcd, isqrt, log

import numpy as np
import pandas as pd
import sympy

from powerfree import arith
from powerfree import capset
from powerfree import constants
from powerfree import graphs
from powerfree import utils
from powerfree import verify

"""
    Generators of the explicit set families avoiding d-th power products,
    mostly for d = 3. Every generator returns a CandidateSet whose family
    and params are enough to rebuild it, so a set written to disk can be
    checked later with verify alone.
"""

# multipliers of the B u C families by k, for k = 12 .. 33 and 36 .. 69
BC_K_RANGE = tuple(range(12, 34, 3)) + tuple(range(36, 70, 3))
ALLOWED_MULTIPLIERS = (1, 2, 3, 5)
K4_TEST_EXPONENT = 1


@dataclass(frozen=True)
class CandidateSet:
    family: str
    k: int
    d: int
    n: int
    params: dict = field(default_factory=dict)
    elements: tuple = ()

    def __post_init__(self):
        elements = tuple(int(a) for a in self.elements)
        if any(b <= a for a, b in zip(elements, elements[1:])):
            raise utils.InvalidArgumentError(
                f"Invalid {self.family} set: elements not strictly sorted")
        if elements and (elements[0] < 1 or elements[-1] > self.n):
            raise utils.InvalidArgumentError(
                f"Invalid {self.family} set: elements outside [1, {self.n}]")
        object.__setattr__(self, "elements", elements)

    @property
    def size(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_dict(self):
        return {"family": self.family, "k": self.k, "d": self.d,
                "n": self.n, "params": dict(self.params),
                "elements": list(self.elements)}

    def to_lines(self):
        return [str(a) for a in self.elements]

    @classmethod
    def from_dict(cls, document, source="<set>"):
        try:
            return cls(family=document.get("family", "file"),
                       k=document.get("k"), d=document.get("d"),
                       n=int(document.get("n") or max(document["elements"],
                                                       default=1)),
                       params=document.get("params") or {},
                       elements=sorted(set(document["elements"])))
        except (KeyError, TypeError, ValueError) as e:
            raise utils.MalformedInputError(source, f"bad set record ({e})")


def _check_n(n, least=1):
    if int(n) != n or n < least:
        raise utils.InvalidArgumentError(
            f"Invalid n '{n}': must be an integer >= {least}")


def _squarefree(limit):
    # boolean mask over 0 .. limit
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in range(2, isqrt(limit) + 1):
        mask[p * p::p * p] = False
    return mask


def _strictly_above(x):
    # smallest integer > x; thresholds are compared with ties excluded
    return floor(x) + 1


def _strictly_below(x):
    return ceil(x) - 1


# k = 1 and small k < d


def k1_construction(n, d=3):
    """
        [n] without its d-th powers: the largest set with no element a
        perfect d-th power, of size n - floor(n^(1/d))
    """
    _check_n(n)
    if d < 2:
        raise utils.InvalidArgumentError(f"Invalid d '{d}': must be >= 2")
    powers = {x ** d for x in range(1, arith.nth_root(n, d) + 1)}
    return CandidateSet("k1", 1, d, n, {},
                        [a for a in range(1, n + 1) if a not in powers])


def divisor_removal_construction(n, k, d=3):
    """
        For 1 < k < d: [n] without every divisor of l^d for l <= n^(k/d).
        a is removed exactly when the least l with a | l^d, namely
        prod p^ceil(e/d), is at most n^(k/d).
    """
    _check_n(n)
    if not 1 < k < d:
        raise utils.InvalidArgumentError(
            f"Invalid k '{k}': need 1 < k < d = {d}")
    limit = arith.nth_root(n ** k, d)
    elements = []
    table = arith.prime_table(n) if n >= 2 else None
    for a in range(2, n + 1):
        least = 1
        for p, e in arith.factor(a, table).factors:
            least *= p ** (-(-e // d))
        if least > limit:
            elements.append(a)
    return CandidateSet("divisor_removal", k, d, n, {"limit": limit},
                        elements)


# k = 2


def k2_pairs(n):
    """
        The disjoint groups {a^2 b, a b^2} for squarefree a <= b < n^(1/3);
        each 2-element group multiplies to the cube (ab)^3 and a = b gives
        the singleton {a^3}. {1} is always included.

        Returns:
            groups (list of tuple): sorted by (b, a)
    """
    _check_n(n)
    groups = []
    b = 1
    while b == 1 or b ** 3 < n:
        if arith.is_squarefree(b):
            for a in range(1, b + 1):
                if arith.is_squarefree(a):
                    groups.append(tuple(sorted({a * a * b, a * b * b})))
        b += 1
    return groups


def _coprime_squarefree_pairs(n):
    # (u, v) with u < v, gcd 1, both squarefree and u v^2 <= n
    squarefree = _squarefree(max(n, 1))
    for v in range(2, isqrt(n) + 1):
        if not squarefree[v]:
            continue
        for u in range(1, min(v, n // (v * v) + 1)):
            if squarefree[u] and gcd(u, v) == 1:
                yield u, v


def k2_defect_formula(n):
    """
        sum over coprime squarefree u < v with u v^2 <= n of
        floor((n / (u v^2))^(1/3)), in exact integer arithmetic
    """
    _check_n(n)
    return sum(arith.nth_root(n // (u * v * v), 3)
               for u, v in _coprime_squarefree_pairs(n))


def k2_extremal(n, mode="f"):
    """
        Largest subset of [n] with no a1 a2 = x^3. Elements fall into
        classes by cubefree part u v^2; class u v^2 pairs with class
        u^2 v and the cubes pair with themselves. Mode f keeps the larger
        class of each pair (u > v) and drops every cube; mode F, where
        a * a is allowed, adds back the largest cube.
    """
    _check_n(n)
    if mode not in ("f", "F"):
        raise utils.InvalidArgumentError(
            f"Invalid mode '{mode}': must be one of: f, F")
    table = arith.prime_table(n) if n >= 2 else None
    elements = []
    for a in range(2, n + 1):
        parts = arith.cubefree_decompose(a, table)
        if parts.u > parts.v:
            elements.append(a)
    if mode == "F":
        bisect.insort(elements, arith.nth_root(n, 3) ** 3)
    return CandidateSet("k2", 2, 3, n, {"mode": mode}, elements)


# k = 3


def _rough_squarefree(n, r):
    mask = _squarefree(n)
    for p in arith.first_primes(r):
        mask[::p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def k3_construction(n, r=2, weighted=False, threads=1):
    """
        Union over p_{r+1}-rough squarefree a' <= n of a' times an optimal
        cap-free witness for floor(n / a'). Witnesses are shared by every
        a' whose floor(n / a') lies in the same threshold band.

        Parameters:
            n (int): range bound
            r (int): number of small primes, 1 .. 8 (4 and below are
            practical)
            weighted (bool): take the S_r witnesses, which also contain
            8s next to s, giving a set with property P_{3,3} instead of
            gamma_{3,3}
            threads (int): worker processes for the cap searches

        Returns:
            candidate (CandidateSet)
    """
    _check_n(n)
    bands = capset.threshold_bands(r, weighted, i_max=n, threads=threads)
    rough = _rough_squarefree(n, r)
    quotients = n // rough
    starts = [band.i_lo for band in bands]
    pieces = []
    for j, band in enumerate(bands):
        upper = starts[j + 1] if j + 1 < len(bands) else n + 1
        chosen = rough[(quotients >= band.i_lo) & (quotients < upper)]
        if len(chosen) == 0:
            continue
        values = np.array(band.witness.values, dtype=np.int64)
        pieces.append(np.multiply.outer(chosen, values).ravel())
    elements = np.unique(np.concatenate(pieces)) if pieces else []
    return CandidateSet("k3", 3, 3, n, {"r": r, "weighted": weighted},
                        [int(a) for a in elements])


# k = 4


def k4_construction(n, exponent=verify.K4_WINDOW_EXPONENT):
    """
        The a in [n / log n, n] whose square divisors all have root at
        most log n and which have no factorisation a = uvw with u, v, w
        inside (n^(1/3) / log^E n, n^(1/3) log^E n). For small n the
        default E = 16 makes the window cover [1, n] and the set is empty.
    """
    _check_n(n, 16)
    log_n = log(n)
    lo = n ** (1 / 3) / log_n ** exponent
    hi = n ** (1 / 3) * log_n ** exponent
    params = {"exponent": exponent}
    if lo < 1 and hi > n:
        return CandidateSet("k4", 4, 3, n, params, [])
    lo, hi = max(_strictly_above(lo), 1), _strictly_below(hi)
    table = arith.prime_table(n)
    elements = []
    for a in range(ceil(n / log_n), n + 1):
        factors = arith.factor(a, table).factors
        root = 1
        for p, e in factors:
            root *= p ** (e // 2)
        if root > log_n:
            continue
        if lo <= hi and arith.balanced_triple_factorization(a, lo, hi):
            continue
        elements.append(a)
    return CandidateSet("k4", 4, 3, n, params, elements)


# graph families, k = 3k', 6, 9 and the B u C sets


def _check_prime_labels(graph, lo, hi):
    for p in graphs.labels(graph):
        if p is None or not lo < p <= hi or not sympy.isprime(p):
            raise utils.InvalidArgumentError(
                f"Invalid label '{p}': vertices must be primes in "
                f"({lo}, {hi}]")


def k3k_f_construction(n, k, graph):
    """
        Primes in (sqrt n, n] together with the products p*q over the edges
        of a graph on primes up to sqrt n with no cycle of length 3 .. 2k;
        such a set is in gamma_{3k,3}
    """
    _check_n(n, 4)
    if k < 2:
        raise utils.InvalidArgumentError(f"Invalid k '{k}': must be >= 2")
    if graphs.certificates(graph).get("girth_gt", 0) < 2 * k:
        raise utils.UncertifiedGraphError(f"girth_gt >= {2 * k}")
    elements = verify.lemma_k6l1_set(graph, n)
    return CandidateSet("k3kf", 3 * k, 3, n,
                        {"graph": graph.graph.get("name", "graph")},
                        elements)


def k6_F_construction(n):
    """
        The semiprimes m = pq with n / log n < m <= n and p < q / log n
    """
    _check_n(n, 16)
    log_n = log(n)
    elements = set()
    for p in arith.primes_in_range(1, isqrt(n)):
        # q > p log n and pq > n / log n
        q_lo = max(p * log_n, n / (p * log_n))
        for q in arith.primes_in_range(floor(q_lo), n // p):
            if q > q_lo:
                elements.add(p * q)
    return CandidateSet("k6F", 6, 3, n, {}, sorted(elements))


def _brown_order(side):
    # smallest odd prime q whose Brown graph has side vertices per class
    for q in sympy.primerange(3, graphs.MAX_BROWN_ORDER + 1):
        if q ** 3 // 2 >= side:
            return q
    raise utils.ResourceLimitError("Brown graph class size",
                                   graphs.MAX_BROWN_ORDER ** 3 // 2, side)


def k33_free_prime_graph(n, seed=0):
    """
        K_{3,3}-free bipartite graph between S and T, an equal split of
        the primes up to sqrt n (the largest dropped when their number is
        odd). It is the subgraph of a split Brown graph induced by side
        vertices from each class, relabelled by S and T.
    """
    primes = arith.primes_in_range(1, isqrt(n))
    side = len(primes) // 2
    S, T = primes[:side], primes[side:2 * side]
    if side == 0:
        G = graphs.make_graph(0, [], labels=[], name="k33free(empty)")
        graphs.certificates(G).update({"k33_free": True, "bipartite": True})
        return G
    q = _brown_order(side)
    split = graphs.bipartite_split(graphs.brown_graph(q), seed)
    classes = ([], [])
    for v, data in split.nodes(data=True):
        classes[data["side"]].append(v)
    index = {v: j for j, v in enumerate(sorted(classes[0])[:side])}
    index.update({v: side + j
                  for j, v in enumerate(sorted(classes[1])[:side])})
    edges = [(index[u], index[v]) for u, v in split.edges()
             if u in index and v in index]
    G = graphs.make_graph(2 * side, edges, labels=S + T,
                          name=f"brown({q}) split {seed} on primes")
    graphs.certificates(G)["bipartite"] = True
    graphs.certify_k33_free(G)
    return G


def k9_F_construction(n, seed=0, graph=None):
    """
        A0 u A1 with A0 the primes in (sqrt n, n] and their doubles up to
        n, and A1 the products st over the edges of a certified
        K_{3,3}-free bipartite graph on primes up to sqrt n. The default
        graph comes from k33_free_prime_graph(n, seed).
    """
    _check_n(n, 100)
    if graph is None:
        graph = k33_free_prime_graph(n, seed)
    found = graphs.certificates(graph)
    if not found.get("k33_free"):
        raise utils.UncertifiedGraphError("k33_free")
    if not found.get("bipartite"):
        raise utils.UncertifiedGraphError("bipartite")
    root = isqrt(n)
    _check_prime_labels(graph, 1, root)
    large = arith.primes_in_range(root, n)
    elements = set(large)
    elements.update(2 * p for p in large if 2 * p <= n)
    elements.update(graphs.edge_products(graph))
    return CandidateSet("k9F", 9, 3, n,
                        {"seed": seed,
                         "graph": graph.graph.get("name", "graph")},
                        sorted(elements))


def bc_family(k):
    """
        Multipliers and forbidden cycle bound of the B u C set for k

        Returns:
            family (dict): multipliers (tuple) and girth_bound (int)
    """
    if k not in BC_K_RANGE:
        raise utils.InvalidArgumentError(
            f"Invalid k '{k}': must be a multiple of 3 in 12 .. 33 or "
            "36 .. 69")
    third = k // 3
    if third % 3 == 0:
        multipliers = (1, 2)
    elif k == 15:
        multipliers = (1, 2, 3, 5)
    else:
        multipliers = (1, 2, 3)
    return {"multipliers": multipliers, "girth_bound": third}


def multiplier_girth_construction(n, multipliers, girth_bound, graph):
    """
        B u C with B = {j p : j in multipliers, sqrt n < p <= n / j} and C
        the products over the edges of a graph on primes in
        (max multiplier, sqrt n] with no cycle of length 3 .. girth_bound

        Parameters:
            n (int): range bound
            multipliers (iterable of int): subset of {1, 2, 3, 5}
            girth_bound (int): certified girth_gt the graph must carry
            graph (nx.Graph): labelled by primes

        Returns:
            candidate (CandidateSet)
    """
    _check_n(n, 4)
    multipliers = tuple(sorted(set(multipliers)))
    if not multipliers or not set(multipliers) <= set(ALLOWED_MULTIPLIERS):
        raise utils.InvalidArgumentError(
            f"Invalid multipliers {multipliers}: must be drawn from "
            f"{ALLOWED_MULTIPLIERS}")
    if graphs.certificates(graph).get("girth_gt", 0) < girth_bound:
        raise utils.UncertifiedGraphError(f"girth_gt >= {girth_bound}")
    root = isqrt(n)
    _check_prime_labels(graph, multipliers[-1], root)
    elements = set()
    for j in multipliers:
        elements.update(j * p for p in arith.primes_in_range(root, n // j))
    elements.update(graphs.edge_products(graph))
    return CandidateSet("multiplier_girth", None, 3, n,
                        {"multipliers": list(multipliers),
                         "girth_bound": girth_bound,
                         "graph": graph.graph.get("name", "graph")},
                        sorted(elements))


def bc_graph(n, girth_bound, smallest, seed=0):
    """
        Greedy graph of girth > girth_bound on the primes in
        (smallest, sqrt n]
    """
    primes = arith.primes_in_range(smallest, isqrt(n))
    if len(primes) >= 3 and girth_bound >= 3:
        return graphs.greedy_high_girth(len(primes), girth_bound, seed,
                                        labels=primes)
    G = graphs.make_graph(len(primes), [], labels=primes,
                          name="bc(empty)")
    graphs.certify_girth(G, girth_bound)
    return G


def bc_construction(n, k, seed=0):
    family = bc_family(k)
    graph = bc_graph(n, family["girth_bound"], max(family["multipliers"]),
                     seed)
    built = multiplier_girth_construction(n, family["multipliers"],
                                          family["girth_bound"], graph)
    params = dict(built.params, seed=seed)
    return CandidateSet("bc", k, 3, n, params, built.elements)


# general k, d


def alpha_construction(n, alpha, k, d=3):
    """
        The a <= n with exactly one prime divisor p > n^alpha, where
        p^2 does not divide a. In gamma_{k,d} whenever d does not divide k.

        Parameters:
            n (int): range bound
            alpha (float): in [1/3, 1/2]
            k (int): number of factors, not a multiple of d
            d (int): power

        Returns:
            candidate (CandidateSet)
    """
    _check_n(n)
    if not 1 / 3 <= alpha <= 1 / 2:
        raise utils.InvalidArgumentError(
            f"Invalid alpha '{alpha}': must lie in [1/3, 1/2]")
    if d < 2 or k < 1 or k % d == 0:
        raise utils.InvalidArgumentError(
            f"Invalid k '{k}': must not be a multiple of d = {d}")
    params = {"alpha": alpha}
    if n < 2:
        return CandidateSet("alpha", k, d, n, params, [])
    threshold = n ** alpha
    lpf = arith.largest_prime_factor_table(n)
    values = np.arange(n + 1, dtype=np.int64)
    values[0] = 1
    cofactor = values // lpf
    # the largest prime is the only one above the threshold, exactly once
    keep = (lpf > threshold) & (lpf[cofactor] <= threshold)
    keep[:2] = False
    return CandidateSet("alpha", k, d, n, params,
                        [int(a) for a in np.nonzero(keep)[0]])


def monotonicity_check(n, m, threads=1):
    """
        f_{3m+3,3}(n) <= f_{3m,3}(n) on the exact oracle; vacuous for n < 3
    """
    if m < 1:
        raise utils.InvalidArgumentError(f"Invalid m '{m}': must be >= 1")
    if n < 3:
        return True
    larger = verify.oracle_f(n, 3 * m + 3, 3, threads)
    smaller = verify.oracle_f(n, 3 * m, 3, threads)
    return larger.value <= smaller.value


# registry used by the command line


FAMILIES = {
    "k1": lambda n, d=3, **_: k1_construction(n, d),
    "k2": lambda n, mode="f", **_: k2_extremal(n, mode),
    "k3": lambda n, r=2, weighted=False, threads=1, **_:
        k3_construction(n, r, weighted, threads),
    "k4": lambda n, exponent=verify.K4_WINDOW_EXPONENT, **_:
        k4_construction(n, exponent),
    "k6F": lambda n, **_: k6_F_construction(n),
    "k9F": lambda n, seed=0, **_: k9_F_construction(n, seed),
    "k3kf": lambda n, k=2, q=None, seed=0, **_:
        k3k_f_construction(n, k, k3kf_graph(n, k, q, seed)),
    "bc": lambda n, k=12, seed=0, **_: bc_construction(n, k, seed),
    "alpha": lambda n, alpha=None, k=4, d=3, **_:
        alpha_construction(n, float(constants.alpha_star())
                           if alpha is None else alpha, k, d),
    "divisor_removal": lambda n, k=2, d=3, **_:
        divisor_removal_construction(n, k, d),
}


def build(family, n, **params):
    """
        Runs the generator registered under family with the given
        parameters; unknown parameters are ignored
    """
    if family not in FAMILIES:
        raise utils.InvalidArgumentError(
            f"Invalid family '{family}': must be one of: "
            f"{', '.join(FAMILIES)}")
    return FAMILIES[family](n, **params)


def incidence_prime_graph(n, q=None):
    """
        Incidence graph of PG(2, q) relabelled by the primes up to sqrt n,
        girth 6, so no cycle of length 3 .. 4 (q defaults to the largest
        prime that fits). Vertices without a prime label are dropped.
    """
    primes = arith.primes_in_range(1, isqrt(n))
    if q is None:
        fitting = [p for p in sympy.primerange(2, graphs.MAX_PLANE_ORDER + 1)
                   if 2 * (p * p + p + 1) <= len(primes)]
        if not fitting:
            G = graphs.make_graph(len(primes), [], labels=primes,
                                  name="incidence(empty)")
            graphs.certify_girth(G, 5)
            return G
        q = fitting[-1]
    H = graphs.incidence_graph_pg(q)
    count = min(H.number_of_nodes(), len(primes))
    G = graphs.make_graph(count, [(u, v) for u, v in H.edges()
                                  if u < count and v < count],
                          labels=primes[:count],
                          name=f"incidence({q}) on primes")
    graphs.certify_girth(G, 5)
    return G


def k3kf_graph(n, k, q=None, seed=0):
    """
        Default graph for k3k_f_construction: the incidence graph on
        primes for k = 2, otherwise a seeded greedy graph of girth > 2k
        on the primes up to sqrt n
    """
    if k == 2:
        return incidence_prime_graph(n, q)
    if q is not None:
        raise utils.InvalidArgumentError(
            f"Invalid q '{q}': the incidence graph only serves k = 2")
    primes = arith.primes_in_range(1, isqrt(n))
    if len(primes) < 3:
        G = graphs.make_graph(len(primes), [], labels=primes,
                              name="greedy(empty)")
        graphs.certify_girth(G, 2 * k)
        return G
    return graphs.greedy_high_girth(len(primes), 2 * k, seed, labels=primes)


# soft density trends


def _density_row(family, n, size, statistic, value, threshold):
    return {"family": family, "n": n, "size": size, "statistic": statistic,
            "value": value, "threshold": threshold,
            "meets": bool(value >= threshold)}


def density_report(family, n, threads=1):
    """
        Desk-scale density statistics of a family against the soft
        thresholds they are expected to clear; below-threshold rows are
        warned about, never raised

        Returns:
            df (pd.DataFrame): family, n, size, statistic, value,
            threshold, meets
    """
    log_n = log(n)
    if family == "k6F":
        size = k6_F_construction(n).size
        row = _density_row(family, n, size, "size*log(n)/(n*loglog(n))",
                           size * log_n / (n * log(log_n)), 0.5)
        row["meets"] = bool(row["meets"] and row["value"] <= 1.5)
    elif family == "alpha":
        size = alpha_construction(n, float(constants.alpha_star()), 4).size
        row = _density_row(family, n, size, "size/n", size / n, 0.79)
    elif family == "k3":
        size = k3_construction(n, 4, threads=threads).size
        beta = float(constants.PUBLISHED["beta"][0])
        row = _density_row(family, n, size, "size/n", size / n, beta - 0.02)
    elif family == "k2":
        size = len(k2_pairs(n))
        row = _density_row(family, n, size, "groups/n^(2/3)",
                           size / n ** (2 / 3), 0.18)
    elif family == "k9F":
        size = k9_F_construction(n).size
        row = _density_row(family, n, size, "size-(pi(n)+pi(n/2))",
                           size - arith.prime_pi(n) - arith.prime_pi(n // 2),
                           1)
    elif family == "k3kf":
        graph = k3kf_graph(n, 2)
        size = k3k_f_construction(n, 2, graph).size
        scale = n ** 0.75 / log_n ** 1.5
        row = _density_row(family, n, size, "(size-pi(n))/(n^(3/4)/log^1.5 n)",
                           (size - arith.prime_pi(n)) / scale, 0)
        row["meets"] = bool(row["value"] > 0)
        row["graph"] = graph.graph["name"]
    else:
        raise utils.InvalidArgumentError(
            f"Invalid family '{family}': must be one of: k6F, alpha, k3, "
            "k2, k9F, k3kf")
    if not row["meets"]:
        warnings.warn(f"{family} at n={n}: {row['statistic']} = "
                      f"{row['value']:.6g} misses {row['threshold']}")
    return pd.DataFrame([row])
