import bisect
import itertools
import threading
from dataclasses import dataclass
from functools import lru_cache
from math import prod

import pandas as pd

from powerfree import arith
from powerfree import mwis
from powerfree import utils

"""
    Exact maximum (weighted) cap-free subsets of the exponent vectors
    {0,1,2}^r of p_r-smooth cubefree integers up to i, i.e. s_r(i) and
    S_r(i), and their threshold tables.

    Three distinct vectors x, y, z in F_3^r form a 3AP (x + z = 2y) exactly
    when x + y + z = 0, so the forbidden configurations are the affine
    lines of F_3^r.
"""

MAX_DIMENSION = 8
ENGINES = ("auto", "bnb", "cpsat")
# cap numbers of F_3^r for r <= 6, only used to decide when to certify
# saturation; the certified value comes from max_cap
CAP_NUMBER_HINTS = (1, 2, 4, 9, 20, 45, 112)
# published breakpoints of s_4 and S_4: the value at i is the number of
# breakpoints <= i
REFERENCE_BREAKPOINTS = {
    (4, False): (1, 2, 3, 5, 6, 7, 10, 14, 15, 21, 25, 30, 35, 42, 60, 70,
                 105, 175, 210, 315),
    (4, True): (1, 2, 3, 5, 6, 7, 8, 10, 14, 15, 16, 21, 24, 30, 35, 40, 42,
                48, 56, 60, 70, 80, 98, 105, 120, 140, 168, 200, 210, 240,
                280, 392, 480, 525, 560, 784, 840, 1400, 1680, 2520),
}


@dataclass(frozen=True, eq=False)
class SmoothVectorSpace:
    """
        All 3^r exponent vectors with their exact values prod p_j^a_j,
        sorted by value
    """
    r: int
    primes: tuple
    vectors: tuple
    values: tuple

    @property
    def full_bound(self):
        return prod(self.primes) ** 2

    def index_of_value(self, value):
        j = bisect.bisect_left(self.values, value)
        if j < len(self.values) and self.values[j] == value:
            return j
        return None


@dataclass(frozen=True, eq=False)
class CapInstance:
    """
        Vectors of value <= bound. In weighted mode a vector of value s
        weighs 2 when 8s <= bound (both s and 8s can be taken), else 1.
    """
    space: SmoothVectorSpace
    bound: int
    weighted: bool
    eligible: tuple
    weights: tuple

    @property
    def values(self):
        return tuple(self.space.values[j] for j in self.eligible)


@dataclass(frozen=True)
class CapSolution:
    chosen: tuple
    values: tuple
    total: int
    optimal: bool

    def to_dict(self):
        return {"chosen": [list(v) for v in self.chosen],
                "values": list(self.values), "total": self.total,
                "optimal": self.optimal}


@dataclass(frozen=True)
class Band:
    """
        value holds for i_lo <= i <= i_hi (i_hi None: every larger i).
        witness is the optimum at i_lo whose sorted vector encodings are
        lexicographically least.
    """
    i_lo: int
    i_hi: object
    value: int
    witness: CapSolution


def third_point(x, y):
    return tuple((-a - b) % 3 for a, b in zip(x, y))


@lru_cache(maxsize=None)
def smooth_vector_space(r):
    if not 1 <= r <= MAX_DIMENSION:
        raise utils.InvalidArgumentError(
            f"Invalid r '{r}': must be between 1 and {MAX_DIMENSION}")
    primes = arith.first_primes(r)
    pairs = sorted((prod(p ** a for p, a in zip(primes, alpha)), alpha)
                   for alpha in itertools.product(range(3), repeat=r))
    return SmoothVectorSpace(r=r, primes=primes,
                             vectors=tuple(alpha for _, alpha in pairs),
                             values=tuple(value for value, _ in pairs))


def enumerate_L(r, i):
    """
        Exponent vectors alpha in {0,1,2}^r with prod p_j^alpha_j <= i,
        sorted by value. Eligibility is an exact integer comparison.
    """
    space = smooth_vector_space(r)
    return list(space.vectors[:bisect.bisect_right(space.values, i)])


def make_instance(r, i, weighted=False):
    if i < 1:
        raise utils.InvalidArgumentError(f"Invalid i '{i}': must be >= 1")
    space = smooth_vector_space(r)
    eligible = tuple(range(bisect.bisect_right(space.values, i)))
    # A cube-product relation that used both s and 8s of one class would
    # need a third element of the same class, since 2v + u = 0 forces
    # u = v in F_3; distinct elements make that impossible, so the pair
    # counts as weight 2 on a single vertex.
    if weighted:
        weights = tuple(2 if 8 * space.values[j] <= i else 1
                        for j in eligible)
    else:
        weights = (1,) * len(eligible)
    return CapInstance(space=space, bound=i, weighted=weighted,
                       eligible=eligible, weights=weights)


def is_cap(vectors):
    """
        Exhaustive check that no three distinct vectors sum to zero mod 3
    """
    points = sorted(set(tuple(v) for v in vectors))
    for x, y, z in itertools.combinations(points, 3):
        if all((a + b + c) % 3 == 0 for a, b, c in zip(x, y, z)):
            return False
    return True


def lines(vectors):
    """
        Index triples (a < b < c) of the given vectors lying on a line
    """
    position = {v: j for j, v in enumerate(vectors)}
    triples = []
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            c = position.get(third_point(vectors[a], vectors[b]))
            if c is not None and c > b:
                triples.append((a, b, c))
    return triples


def hyperplane_blocks(vectors, cap):
    """
        For every direction, the parallel hyperplane classes restricted to
        vectors, each holding at most cap points of a cap
    """
    r = len(vectors[0])
    blocks = []
    for direction in itertools.product(range(3), repeat=r):
        # one representative per projective point
        nonzero = [a for a in direction if a]
        if not nonzero or nonzero[0] != 1:
            continue
        classes = [[], [], []]
        for j, v in enumerate(vectors):
            classes[sum(a * b for a, b in zip(direction, v)) % 3].append(j)
        blocks.extend((block, cap) for block in classes if len(block) > cap)
    return blocks


def resolve_engine(r, engine):
    if engine not in ENGINES:
        raise utils.InvalidArgumentError(
            f"Invalid engine '{engine}': must be one of: {', '.join(ENGINES)}")
    if engine == "auto":
        return "bnb" if r <= 3 else "cpsat"
    return engine


def _solve_vectors(vectors, weights, initial=(), target=None, max_size=None,
                   threads=1, engine="bnb", forbidden=()):
    # a singleton edge keeps its vertex out of every solution
    edges = lines(vectors) + [(j,) for j in forbidden]
    r = len(vectors[0])
    if engine == "cpsat":
        blocks = hyperplane_blocks(vectors, cap_number(r - 1)) \
            if 2 <= r <= 4 else ()
        return mwis.cpsat_solve(len(vectors), edges, weights, initial=initial,
                                target=target, blocks=blocks,
                                max_size=max_size, threads=threads)
    solver = mwis.HypergraphMWIS(len(vectors), edges, weights,
                                 max_size=max_size)
    return solver.solve(initial=initial, target=target, threads=threads)


@lru_cache(maxsize=None)
def _max_cap(r, engine):
    space = smooth_vector_space(r)
    vectors = space.vectors
    if r == 1:
        return CapSolution(vectors[:2], space.values[:2], 2, True)
    previous = _max_cap(r - 1, engine)
    # A cap larger than cap(r-1) lies in no hyperplane, so it contains an
    # affine basis, which an affine map sends to {0, e_1, .., e_r}.
    basis = [vectors.index(tuple(int(j == k) for j in range(r)))
             for k in range(-1, r)]
    result = _solve_vectors(vectors, [1] * len(vectors), initial=basis,
                            threads=1, engine=engine)
    if result is not None and result.weight > previous.total:
        chosen = tuple(vectors[j] for j in result.chosen)
    else:
        chosen = tuple(v + (0,) for v in previous.chosen)
    values = tuple(space.values[vectors.index(v)] for v in chosen)
    return CapSolution(chosen, values, len(chosen), True)


def max_cap(r, engine="auto"):
    """
        Largest cap in all of F_3^r with a witness
    """
    if r == 0:
        return CapSolution(((),), (1,), 1, True)
    return _max_cap(r, resolve_engine(r, engine))


def cap_number(r, engine="auto"):
    return max_cap(r, engine).total


def _lex_least(vectors, weights, total, seed=None, max_size=None, threads=1,
               engine="bnb"):
    """
        The cap-free subset of weight total whose sorted vector encodings
        are lexicographically least. Vertices are fixed in encoding order;
        one is kept when some solution of weight total still contains
        every kept vertex and avoids every rejected one.

        Parameters:
            seed (MWISResult): any solution of weight total, used to skip
            searches whose answer it already shows
    """
    position = {v: j for j, v in enumerate(vectors)}
    kept, rejected = [], []
    kept_set = set()
    weight = 0
    # invariant: last contains kept and avoids rejected
    last = set(seed.chosen) if seed is not None else None
    for j in sorted(range(len(vectors)), key=vectors.__getitem__):
        if weight >= total:
            break
        if last is not None and j in last:
            feasible = True
        elif any(position.get(third_point(vectors[a], vectors[j]))
                 in kept_set for a in kept):
            feasible = False
        else:
            result = _solve_vectors(vectors, weights, initial=kept + [j],
                                    target=total, max_size=max_size,
                                    threads=threads, engine=engine,
                                    forbidden=rejected)
            feasible = result is not None
            if feasible:
                last = set(result.chosen)
        if feasible:
            kept.append(j)
            kept_set.add(j)
            weight += weights[j]
        else:
            rejected.append(j)
    return mwis.MWISResult(tuple(sorted(kept)), weight, 0)


def _witness(instance, vectors, result):
    values = []
    for j in result.chosen:
        value = instance.values[j]
        values.append(value)
        if instance.weights[j] == 2:
            values.append(8 * value)
    return CapSolution(tuple(vectors[j] for j in result.chosen),
                       tuple(sorted(values)), result.weight, True)


class _ThresholdState:
    """
        Incremental computation of a threshold table. Between consecutive
        breakpoints nothing changes; at a breakpoint exactly one vertex
        appears (a smooth value) or is upgraded to weight 2 (8 times a
        smooth value; a cubefree value is never divisible by 8). Either
        raises the optimum by at most 1, and any improvement uses that
        vertex, so one decision search per breakpoint suffices.
    """
    def __init__(self, r, weighted, engine):
        self.r = r
        self.weighted = weighted
        self.engine = engine
        self.space = smooth_vector_space(r)
        events = {value: j for j, value in enumerate(self.space.values)}
        if weighted:
            events.update({8 * value: j for j, value in
                           enumerate(self.space.values)})
        self.events = sorted(events.items())
        self.position = 0
        self.value = 0
        self.bands = []
        self.saturation = None
        self.lock = threading.Lock()

    def _saturation_value(self):
        if self.saturation is None:
            factor = 2 if self.weighted else 1
            if self.r < len(CAP_NUMBER_HINTS):
                trigger = CAP_NUMBER_HINTS[self.r]
            else:
                trigger = cap_number(self.r - 1, self.engine) + 1
            if self.value >= factor * trigger:
                self.saturation = factor * cap_number(self.r, self.engine)
        return self.saturation

    def saturated(self):
        return self.value == self._saturation_value()

    def extend(self, i_max, threads=1):
        while self.position < len(self.events):
            i, changed = self.events[self.position]
            if i > i_max or self.saturated():
                break
            self.position += 1
            instance = make_instance(self.r, i, self.weighted)
            vectors = [self.space.vectors[j] for j in instance.eligible]
            max_size = cap_number(self.r, self.engine) \
                if self.saturation is not None else None
            result = _solve_vectors(vectors, list(instance.weights),
                                    initial=[changed], target=self.value + 1,
                                    max_size=max_size, threads=threads,
                                    engine=self.engine)
            if result is None:
                continue
            self.value += 1
            least = _lex_least(vectors, list(instance.weights), self.value,
                               result, max_size, threads, self.engine)
            self.bands.append((i, self.value,
                               _witness(instance, vectors, least)))

    def bands_until(self, i_max):
        bands = [band for band in self.bands if band[0] <= i_max]
        out = []
        for j, (i_lo, value, witness) in enumerate(bands):
            if j + 1 < len(bands):
                i_hi = bands[j + 1][0] - 1
            elif self.saturation is not None and value == self.saturation:
                i_hi = None
            else:
                i_hi = i_max
            out.append(Band(i_lo, i_hi, value, witness))
        return out


_THRESHOLD_STATES = {}
_STATES_LOCK = threading.Lock()


def _threshold_state(r, weighted, engine):
    key = (r, weighted, engine)
    with _STATES_LOCK:
        if key not in _THRESHOLD_STATES:
            _THRESHOLD_STATES[key] = _ThresholdState(r, weighted, engine)
        return _THRESHOLD_STATES[key]


def threshold_bands(r, weighted=False, i_max=None, threads=1, engine="auto"):
    """
        Step function of s_r (or S_r in weighted mode) on [1, i_max].

        Parameters:
            r (int): number of primes, 1 .. 8
            weighted (bool): compute S_r instead of s_r
            i_max (int): last i covered, defaults to (p_1...p_r)^2, or
            8(p_1...p_r)^2 in weighted mode
            threads (int): worker processes for the searches
            engine (str): 'bnb', 'cpsat' or 'auto' (bnb for r <= 3)

        Returns:
            bands (list of Band): contiguous, strictly increasing values;
            the last band has i_hi None once the value has reached the
            cap number (2x the cap number in weighted mode), since it then
            holds for every larger i
    """
    engine = resolve_engine(r, engine)
    state = _threshold_state(r, weighted, engine)
    if i_max is None:
        i_max = state.space.full_bound * (8 if weighted else 1)
    if i_max < 1:
        raise utils.InvalidArgumentError(
            f"Invalid i_max '{i_max}': must be >= 1")
    with state.lock:
        state.extend(i_max, threads)
        return state.bands_until(i_max)


def threshold_table(r, weighted=False, i_max=None, threads=1, engine="auto"):
    """
        Threshold table as a DataFrame with columns i_lo, i_hi, value
        (i_hi is missing for the open-ended saturated band)
    """
    bands = threshold_bands(r, weighted, i_max, threads, engine)
    df = pd.DataFrame({"i_lo": [b.i_lo for b in bands],
                       "i_hi": [b.i_hi for b in bands],
                       "value": [b.value for b in bands]})
    df["i_hi"] = df["i_hi"].astype("Int64")
    return df


def _solution_at(instance, threads, engine):
    bands = threshold_bands(instance.space.r, instance.weighted,
                            instance.bound, threads, engine)
    return bands[-1].witness


def max_capfree(instance, threads=1, engine="auto"):
    """
        s_r(i) for an unweighted instance with an optimal witness
    """
    if instance.weighted:
        raise utils.InvalidArgumentError(
            "max_capfree needs an unweighted instance; use "
            "max_capfree_weighted")
    return _solution_at(instance, threads, engine)


def max_capfree_weighted(instance, threads=1, engine="auto"):
    """
        S_r(i) for a weighted instance with an optimal witness
    """
    if not instance.weighted:
        raise utils.InvalidArgumentError(
            "max_capfree_weighted needs a weighted instance")
    return _solution_at(instance, threads, engine)


def solve_instance(instance, threads=1, engine="bnb"):
    """
        Solves a single instance from scratch, without the incremental
        table; used to cross-check the tables at small r
    """
    vectors = [instance.space.vectors[j] for j in instance.eligible]
    engine = resolve_engine(instance.space.r, engine)
    weights = list(instance.weights)
    result = _solve_vectors(vectors, weights, threads=threads, engine=engine)
    least = _lex_least(vectors, weights, result.weight, result,
                       threads=threads, engine=engine)
    return _witness(instance, vectors, least)


def saturation_report(r, weighted=False, threads=1, engine="auto"):
    """
        Where the table actually reaches its final value, next to the
        point N (or 8N) from which it is claimed constant
    """
    bands = threshold_bands(r, weighted, None, threads, engine)
    space = smooth_vector_space(r)
    claimed = space.full_bound * (8 if weighted else 1)
    last = bands[-1]
    report = {"r": r, "weighted": weighted, "saturation_value": last.value,
              "saturation_point": last.i_lo, "claimed_point": claimed,
              "saturates_by_claimed_point": last.i_lo <= claimed}
    reference = REFERENCE_BREAKPOINTS.get((r, weighted))
    if reference is not None:
        report["matches_reference"] = \
            tuple(b.i_lo for b in bands) == reference
    return report
