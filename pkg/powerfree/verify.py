import itertools
import random
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt, log, prod

import sympy

from powerfree import arith
from powerfree import graphs
from powerfree import mwis
from powerfree import utils

"""
    Ground-truth engines: d-th power product detection, the property
    P_{k,d} and gamma_{k,d} checkers and the exact oracles for F_{k,d}(n)
    and f_{k,d}(n) on small n.

    A multiset of size k is a nontrivial solution exactly when reducing
    every multiplicity modulo d leaves a nonempty multiset whose product
    is still a d-th power. The gamma checkers therefore search multisets
    with multiplicities in [1, d-1] and sizes k, k-d, k-2d, ... >= 1, and
    pad a reduced solution back to size k with d copies of one element.
"""

MODES = ("P", "gamma")
METHODS = ("search", "closing", "naive")
# (largest k, largest n) pairs, tried in order
ORACLE_BUDGETS = ((3, 60), (6, 30), (12, 20))
# combinations a single prime elimination may enumerate
ELIMINATION_LIMIT = 20000
K4_WINDOW_EXPONENT = 16


@dataclass(frozen=True)
class SolutionWitness:
    """
        k elements (sorted, with repetition) whose product is x^d
    """
    elements: tuple
    x: int
    d: int
    trivial: bool

    def to_dict(self):
        return {"elements": list(self.elements), "x": self.x, "d": self.d,
                "trivial": self.trivial}


@dataclass(frozen=True)
class OracleResult:
    n: int
    k: int
    d: int
    mode: str
    value: int
    witness_set: tuple
    certified: bool
    vacuous: bool = False

    def to_dict(self):
        return {"n": self.n, "k": self.k, "d": self.d, "mode": self.mode,
                "value": self.value, "witness_set": list(self.witness_set),
                "certified": self.certified, "vacuous": self.vacuous}


def _check_parameters(k, d):
    if d < 2:
        raise utils.InvalidArgumentError(
            f"Invalid d '{d}': must be at least 2")
    if k < 1:
        raise utils.InvalidArgumentError(
            f"Invalid k '{k}': must be at least 1")


def _check_mode(mode):
    if mode not in MODES:
        raise utils.InvalidArgumentError(
            f"Invalid mode '{mode}': must be one of: {', '.join(MODES)}")


def _elements(A):
    elements = sorted({int(a) for a in A})
    if elements and elements[0] < 1:
        raise utils.InvalidArgumentError(
            f"Invalid element '{elements[0]}': sets hold positive integers")
    return elements


def _sizes(k, d, mode):
    """
        Admissible sizes of a reduced solution and the multiplicity cap
    """
    if mode == "P":
        return (k,), 1
    return tuple(range(k, 0, -d)), d - 1


def _add(residual, key, d, times=1):
    updated = dict(residual)
    for p, r in key:
        value = (updated.get(p, 0) + times * r) % d
        if value:
            updated[p] = value
        else:
            updated.pop(p, None)
    return updated


def _residue_key(a, d, times=1):
    return tuple((p, times * r % d) for p, r in
                 arith.residue_vector(a, d).entries if times * r % d)


def _missing_mass(residual, d):
    # least total residue that must still be added to close every prime
    return sum(d - r for r in residual.values())


def product_is_dth_power(elements, d):
    """
        Decides whether the product of elements is a perfect d-th power
        from the summed exponent vectors

        Parameters:
            elements (iterable of int): nonempty multiset of positive
            integers
            d (int): exponent, at least 2

        Returns:
            x (int) with product = x^d, or None
    """
    elements = list(elements)
    if not elements:
        raise utils.InvalidArgumentError("Invalid multiset: empty")
    if d < 2:
        raise utils.InvalidArgumentError(
            f"Invalid d '{d}': must be at least 2")
    exponents = Counter()
    for a in elements:
        for p, e in arith.factor(a).factors:
            exponents[p] += e
    if any(e % d for e in exponents.values()):
        return None
    return prod((p ** (e // d) for p, e in exponents.items()), start=1)


def is_trivial_solution(elements, d):
    """
        True when the multiset splits into d-tuples of equal values
    """
    return all(m % d == 0 for m in Counter(elements).values())


def _make_witness(counts, k, d):
    elements = sorted(Counter(counts).elements())
    elements += [elements[0]] * (k - len(elements))
    elements.sort()
    return SolutionWitness(tuple(elements), product_is_dth_power(elements, d),
                           d, is_trivial_solution(elements, d))


def reverify(witness, A, k, d, mode):
    """
        Re-checks a witness by raw integer arithmetic, independently of the
        searches

        Returns:
            valid (bool)
    """
    _check_mode(mode)
    elements = witness.elements
    if len(elements) != k or not set(elements) <= set(A):
        return False
    if prod(elements) != witness.x ** d:
        return False
    if mode == "P":
        return len(set(elements)) == k
    return not is_trivial_solution(elements, d)


class _ClosingSearch:
    """
        Exhaustive depth-first search over the elements ordered by
        decreasing largest prime factor, d-th powers last. Each element
        takes a multiplicity in [0, cap]. Once the last element carrying a
        prime is decided the prime's residue must be zero, and the residue
        still missing must fit into the remaining slots (the Omega-sum
        cut). pruning=False keeps only the final check.
    """
    def __init__(self, elements, k, d, mode, pruning=True):
        self.d = d
        self.sizes, self.cap = _sizes(k, d, mode)
        self.top = max(self.sizes)
        self.bottom = min(self.sizes)
        self.pruning = pruning
        rows = []
        for a in elements:
            key = _residue_key(a, d)
            rows.append((max((p for p, _ in key), default=0), a, key))
        rows.sort(key=lambda row: (-row[0], row[1]))
        self.order = [a for _, a, _ in rows]
        self.keys = [key for _, _, key in rows]
        last = {}
        for i, key in enumerate(self.keys):
            for p, _ in key:
                last[p] = i
        self.closing = [[] for _ in self.order]
        for p, i in last.items():
            self.closing[i].append(p)
        self.mass_after = [0] * (len(self.order) + 1)
        for i in range(len(self.order) - 1, -1, -1):
            mass = sum(r for _, r in self.keys[i])
            self.mass_after[i] = max(mass, self.mass_after[i + 1])

    def solutions(self):
        """
            Yields every reduced solution as a dict element -> multiplicity
        """
        counts = [0] * len(self.order)
        yield from self._extend(0, 0, {}, counts)

    def _feasible(self, i, size, residual):
        if size + (len(self.order) - i) * self.cap < self.bottom:
            return False
        slots = self.top - size
        return _missing_mass(residual, self.d) <= slots * self.mass_after[i]

    def _extend(self, i, size, residual, counts):
        if i == len(self.order):
            if size in self.sizes and not residual:
                yield {self.order[j]: c for j, c in enumerate(counts) if c}
            return
        if self.pruning and not self._feasible(i, size, residual):
            return
        for m in range(self.cap + 1):
            if size + m > self.top:
                break
            updated = _add(residual, self.keys[i], self.d, m) if m \
                else residual
            if self.pruning and any(p in updated for p in self.closing[i]):
                continue
            counts[i] = m
            yield from self._extend(i + 1, size + m, updated, counts)
        counts[i] = 0


class _EliminationSearch:
    """
        Existence search by prime elimination. Every member offers a list
        of options (residue key, size, atoms) and contributes at most one
        of them. Eliminating a prime p replaces all members mentioning p by
        a single member whose options are the combinations with zero
        p-residue; combinations with equal residue and size are merged.
        Primes whose elimination would enumerate more than
        ELIMINATION_LIMIT combinations are left to a closing-order search
        over members grouped into interchangeable types.
    """
    def __init__(self, elements, k, d, mode):
        self.d = d
        self.sizes, cap = _sizes(k, d, mode)
        self.top = max(self.sizes)
        self.bottom = min(self.sizes)
        members = [[(_residue_key(a, d, m), m, ((a, m),))
                    for m in range(1, cap + 1)] for a in elements]
        members = self._eliminate(members)
        free = [member for member in members
                if all(not key for key, _, _ in member)]
        self.reach = self._free_sizes(free)
        self._build_types([member for member in members
                           if any(key for key, _, _ in member)])

    @staticmethod
    def _primes(member):
        return {p for key, _, _ in member for p, _ in key}

    def _eliminate(self, members):
        primes = sorted(set().union(*map(self._primes, members)),
                        reverse=True) if members else []
        for p in primes:
            group = [member for member in members if p in self._primes(member)]
            if prod(len(member) + 1 for member in group) > ELIMINATION_LIMIT:
                continue
            rest = [member for member in members
                    if p not in self._primes(member)]
            combined = self._combine(group, p)
            members = rest + [combined] if combined else rest
        return members

    def _combine(self, group, p):
        options = {}

        def walk(j, residual, size, atoms):
            if j == len(group):
                if size and p not in residual:
                    key = tuple(sorted(residual.items()))
                    options.setdefault((key, size), atoms)
                return
            walk(j + 1, residual, size, atoms)
            for key, s, more in group[j]:
                if size + s <= self.top:
                    walk(j + 1, _add(residual, key, self.d), size + s,
                         atoms + more)

        walk(0, {}, 0, ())
        return [(key, size, atoms) for (key, size), atoms in options.items()]

    def _free_sizes(self, free):
        # sizes reachable from residue-free members, with their atoms
        reach = {0: ()}
        for member in free:
            extended = dict(reach)
            for s, atoms in reach.items():
                for _, size, more in member:
                    if s + size <= self.top and s + size not in extended:
                        extended[s + size] = atoms + more
            reach = extended
        return reach

    def _build_types(self, members):
        by_signature = {}
        for member in members:
            signature = tuple(sorted((key, size) for key, size, _ in member))
            by_signature.setdefault(signature, []).append(
                {(key, size): atoms for key, size, atoms in member})
        types = sorted(by_signature.items(),
                       key=lambda item: -max(p for key, _ in item[0]
                                             for p, _ in key))
        self.types = types
        last = {}
        for t, (signature, _) in enumerate(types):
            for key, _ in signature:
                for p, _ in key:
                    last[p] = t
        self.closing = [[] for _ in types]
        for p, t in last.items():
            self.closing[t].append(p)
        self.ratio_after = [Fraction(0)] * (len(types) + 1)
        self.capacity_after = [0] * (len(types) + 1)
        for t in range(len(types) - 1, -1, -1):
            signature, group = types[t]
            ratio = max(Fraction(sum(r for _, r in key), size)
                        for key, size in signature)
            self.ratio_after[t] = max(ratio, self.ratio_after[t + 1])
            self.capacity_after[t] = self.capacity_after[t + 1] + \
                len(group) * max(size for _, size in signature)
        self.free_top = max(self.reach)

    @staticmethod
    def _distributions(sizes, count, slots):
        """
            Count vectors over the options with sum <= count and total
            size <= slots
        """
        if not sizes:
            yield ()
            return
        for c in range(min(count, slots // sizes[0]) + 1):
            for rest in _EliminationSearch._distributions(
                    sizes[1:], count - c, slots - c * sizes[0]):
                yield (c,) + rest

    def _feasible(self, t, size, residual):
        if size + self.capacity_after[t] + self.free_top < self.bottom:
            return False
        slots = self.top - size
        return _missing_mass(residual, self.d) <= slots * self.ratio_after[t]

    def _dfs(self, t, size, residual, picks):
        if t == len(self.types):
            for target in self.sizes:
                fill = self.reach.get(target - size)
                if fill is not None:
                    return picks + [fill]
            return None
        if not self._feasible(t, size, residual):
            return None
        signature, group = self.types[t]
        sizes = [size_o for _, size_o in signature]
        for counts in self._distributions(sizes, len(group), self.top - size):
            updated = residual
            added = 0
            for (key, size_o), c in zip(signature, counts):
                if c:
                    updated = _add(updated, key, self.d, c)
                    added += c * size_o
            if any(p in updated for p in self.closing[t]):
                continue
            chosen = []
            members = iter(group)
            for option, c in zip(signature, counts):
                for member in itertools.islice(members, c):
                    chosen.extend(member[option])
            found = self._dfs(t + 1, size + added, updated,
                              picks + [tuple(chosen)])
            if found is not None:
                return found
        return None

    def find(self):
        """
            Returns a reduced solution as a dict element -> multiplicity,
            or None
        """
        picks = self._dfs(0, 0, {}, [])
        if picks is None:
            return None
        counts = Counter()
        for atoms in picks:
            for a, m in atoms:
                counts[a] += m
        return dict(counts)


def naive_property_P(A, k, d):
    """
        Unpruned scan over all k-subsets of A
    """
    _check_parameters(k, d)
    for combo in itertools.combinations(_elements(A), k):
        x = product_is_dth_power(combo, d)
        if x is not None:
            return SolutionWitness(combo, x, d, False)
    return None


def naive_property_gamma(A, k, d):
    """
        Unpruned scan over all k-multisets of A, skipping trivial ones
    """
    _check_parameters(k, d)
    for combo in itertools.combinations_with_replacement(_elements(A), k):
        if is_trivial_solution(combo, d):
            continue
        x = product_is_dth_power(combo, d)
        if x is not None:
            return SolutionWitness(combo, x, d, False)
    return None


def _find(A, k, d, mode, method):
    _check_parameters(k, d)
    if method not in METHODS:
        raise utils.InvalidArgumentError(
            f"Invalid method '{method}': must be one of: {', '.join(METHODS)}")
    if method == "naive":
        return naive_property_P(A, k, d) if mode == "P" \
            else naive_property_gamma(A, k, d)
    elements = _elements(A)
    if mode == "P" and k > len(elements):
        return None
    if method == "closing":
        counts = next(_ClosingSearch(elements, k, d, mode).solutions(), None)
    else:
        counts = _EliminationSearch(elements, k, d, mode).find()
    return None if counts is None else _make_witness(counts, k, d)


def has_property_P(A, k, d, method="search"):
    """
        Looks for k distinct elements of A whose product is a d-th power

        Parameters:
            A (iterable of int): positive integers
            k (int): number of factors
            d (int): exponent
            method (str): 'search' (prime elimination), 'closing'
            (closing-order depth-first search) or 'naive'

        Returns:
            witness (SolutionWitness) or None when A has property P_{k,d}
    """
    return _find(A, k, d, "P", method)


def has_property_gamma(A, k, d, method="search"):
    """
        Looks for a nontrivial k-multiset of A whose product is a d-th
        power; None means A is in gamma_{k,d}
    """
    return _find(A, k, d, "gamma", method)


def bad_supports(A, k, d, mode, pruning=True):
    """
        Supports of the solutions in A. In gamma mode only the inclusion
        minimal supports are kept; in P mode every support has k elements.

        Returns:
            supports (list of tuple): sorted by size, then lexicographically
    """
    _check_parameters(k, d)
    _check_mode(mode)
    elements = _elements(A)
    if mode == "P" and k > len(elements):
        return []
    index = {a: j for j, a in enumerate(elements)}
    masks = set()
    for counts in _ClosingSearch(elements, k, d, mode, pruning).solutions():
        masks.add(sum(1 << index[a] for a in counts))
    ordered = sorted(masks, key=lambda mask: (mask.bit_count(), mask))
    kept = []
    for mask in ordered:
        if mode == "gamma" and any(edge & ~mask == 0 for edge in kept):
            continue
        kept.append(mask)
    supports = [tuple(a for j, a in enumerate(elements) if mask >> j & 1)
                for mask in kept]
    return sorted(supports, key=lambda s: (len(s), s))


def _check_budget(n, k):
    for largest_k, limit in ORACLE_BUDGETS:
        if k <= largest_k:
            if n > limit:
                raise utils.ResourceLimitError("n", limit, n)
            return
    raise utils.ResourceLimitError("k", ORACLE_BUDGETS[-1][0], k)


def oracle(n, k, d, mode, threads=1, pruning=True):
    """
        Largest subset of [n] with the property of the given mode, by
        branch-and-bound maximum independent set over the hypergraph of
        bad supports (vertex i stands for the integer i + 1)

        Parameters:
            n (int): size of the ground set, within ORACLE_BUDGETS
            k (int): number of factors
            d (int): exponent
            mode (str): 'P' for F_{k,d}(n), 'gamma' for f_{k,d}(n)
            threads (int): worker processes for the branch-and-bound
            pruning (bool): False enumerates bad supports without cuts

        Returns:
            result (OracleResult)
    """
    _check_parameters(k, d)
    _check_mode(mode)
    if n < 1:
        raise utils.InvalidArgumentError(f"Invalid n '{n}': must be >= 1")
    _check_budget(n, k)
    universe = tuple(range(1, n + 1))
    if mode == "P" and k > n:
        warnings.warn(f"k = {k} exceeds n = {n}: every subset of [{n}] "
                      "has property P vacuously")
        return OracleResult(n, k, d, mode, n, universe, True, vacuous=True)
    edges = [[a - 1 for a in support] for support in
             bad_supports(universe, k, d, mode, pruning)]
    result = mwis.HypergraphMWIS(n, edges).solve(threads=threads)
    chosen = tuple(v + 1 for v in result.chosen)
    return OracleResult(n, k, d, mode, len(chosen), chosen, certified=True)


def oracle_F(n, k, d, threads=1):
    return oracle(n, k, d, "P", threads)


def oracle_f(n, k, d, threads=1):
    return oracle(n, k, d, "gamma", threads)


def oracle_k1(n, d, mode="P"):
    """
        F_{1,d}(n) = f_{1,d}(n) = n - floor(n^(1/d)) in closed form. For
        k = 1 both modes exclude exactly the d-th powers, so the extremal
        set is the same; mode is recorded in the result.

        Returns:
            result (OracleResult): witness_set is [n] minus the d-th powers
    """
    _check_mode(mode)
    if n < 1:
        raise utils.InvalidArgumentError(f"Invalid n '{n}': must be >= 1")
    if d < 2:
        raise utils.InvalidArgumentError(
            f"Invalid d '{d}': must be at least 2")
    powers = {x ** d for x in range(1, arith.nth_root(n, d) + 1)}
    chosen = tuple(a for a in range(1, n + 1) if a not in powers)
    return OracleResult(n, 1, d, mode, len(chosen), chosen, certified=True)


def lemma_k6l1_set(graph, n):
    """
        The primes in (sqrt n, n] together with the products p*q over the
        edges of a graph labelled by primes up to sqrt n
    """
    root = isqrt(n)
    for p in graphs.labels(graph):
        if p > root or not sympy.isprime(p):
            raise utils.InvalidArgumentError(
                f"Invalid label '{p}': vertices are primes <= sqrt({n})")
    return sorted(arith.primes_in_range(root, n) + graphs.edge_products(graph))


def check_lemma_k6l1(graph, n, k, require_certificate=True, method="search"):
    """
        Checks that the set built by lemma_k6l1_set is in gamma_{3k,3}

        Parameters:
            graph (nx.Graph): labelled by primes <= sqrt n, certified
            girth_gt >= 2k
            n (int): range bound
            k (int): at least 2
            require_certificate (bool): False checks graphs with short
            cycles too

        Returns:
            holds (bool)
    """
    if k < 2:
        raise utils.InvalidArgumentError(f"Invalid k '{k}': must be >= 2")
    if require_certificate and \
            graphs.certificates(graph).get("girth_gt", 0) < 2 * k:
        raise utils.UncertifiedGraphError(f"girth_gt >= {2 * k}")
    S = lemma_k6l1_set(graph, n)
    return has_property_gamma(S, 3 * k, 3, method) is None


def check_lemma_k4l1(a_list, n, exponent=K4_WINDOW_EXPONENT):
    """
        For a_1..a_4 in [n / log n, n] whose square divisors are at most
        log n and whose product is a cube, checks that every a_i is u*v*w
        with u, v, w in (n^(1/3) / log^E n, n^(1/3) log^E n)

        Returns:
            True, False, or utils.PRECONDITION_FAILED when the hypotheses
            do not hold
    """
    a_list = [int(a) for a in a_list]
    if len(a_list) != 4:
        raise utils.InvalidArgumentError(
            f"Invalid quadruple: expected 4 integers, got {len(a_list)}")
    if n < 3:
        raise utils.InvalidArgumentError(f"Invalid n '{n}': must be >= 3")
    log_n = log(n)
    if any(not n / log_n <= a <= n for a in a_list):
        return utils.PRECONDITION_FAILED
    for a in a_list:
        square_root = prod(p ** (e // 2) for p, e in arith.factor(a).factors)
        if square_root > log_n:
            return utils.PRECONDITION_FAILED
    if product_is_dth_power(a_list, 3) is None:
        return utils.PRECONDITION_FAILED
    lo = n ** (1 / 3) / log_n ** exponent
    hi = n ** (1 / 3) * log_n ** exponent
    if lo < 1 and hi > n:
        return True
    lo, hi = max(floor(lo) + 1, 1), ceil(hi) - 1
    if lo > hi:
        return False
    return all(arith.balanced_triple_factorization(a, lo, hi) is not None
               for a in a_list)


def check_semiprime_cube_law(values, k):
    """
        3k distinct products of two distinct primes whose graph has no
        cycle of length 3..k never multiply to a cube

        Returns:
            True when the product is not a cube, False when it is, or
            utils.PRECONDITION_FAILED when the graph has a short cycle
    """
    values = [int(a) for a in values]
    if k < 4:
        raise utils.InvalidArgumentError(f"Invalid k '{k}': must be >= 4")
    if len(set(values)) != 3 * k or len(values) != 3 * k:
        raise utils.InvalidArgumentError(
            f"Invalid values: expected {3 * k} distinct semiprimes")
    if graphs.has_cycle_leq(graphs.semiprime_graph(values), k):
        return utils.PRECONDITION_FAILED
    return product_is_dth_power(values, 3) is None


def semiprime_cube_law_trials(k, trials=100, seed=0):
    """
        Runs check_semiprime_cube_law on random edge sets of seeded greedy
        graphs of girth > k labelled by the first primes

        Returns:
            summary (dict): trials, law_holds and cubes counts
    """
    if trials < 1:
        raise utils.InvalidArgumentError(
            f"Invalid trials '{trials}': must be >= 1")
    rng = random.Random(seed)
    t = 4 * k
    primes = list(arith.first_primes(t))
    holds = 0
    for _ in range(trials):
        G = graphs.greedy_high_girth(t, k, seed=rng.randrange(2**32),
                                     labels=primes)
        values = rng.sample(graphs.edge_products(G), 3 * k)
        if check_semiprime_cube_law(values, k) is True:
            holds += 1
    return {"k": k, "trials": trials, "seed": seed, "law_holds": holds,
            "cubes": trials - holds}
