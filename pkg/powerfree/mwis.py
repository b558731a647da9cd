import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ortools.sat.python import cp_model

from powerfree import utils

"""
    Exact maximum weight independent set in a hypergraph by bitset
    branch-and-bound. A set is independent when it contains no edge
    entirely. Vertices are 0 .. n-1 and sets are python int bitmasks.
"""


@dataclass(frozen=True)
class MWISResult:
    chosen: tuple
    weight: int
    nodes: int


class _SearchState:
    def __init__(self, best, target=None, upper=None):
        self.best = best
        self.best_mask = None
        self.target = target
        self.upper = upper
        self.done = False
        self.nodes = 0

    def record(self, mask, weight):
        self.best = weight
        self.best_mask = mask
        if self.target is not None and weight >= self.target:
            self.done = True
        if self.upper is not None and weight >= self.upper:
            self.done = True


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class HypergraphMWIS:
    """
        Branch-and-bound solver. Each node keeps the chosen set K and the
        candidate set C of vertices that can still join K without
        completing an edge. The upper bound is w(K) + w(C) minus a
        greedy matching of forced deletions: disjoint live edges whose
        remaining vertices all lie in C each cost at least their
        lightest vertex.

        Parameters:
            vertex_count (int): number of vertices
            edges (iterable): hyperedges as iterables of vertex indices;
            a singleton edge forbids its vertex
            weights (list of int): positive vertex weights, default 1
            max_size (int): optional bound on the size of any
            independent set, used as an extra cardinality bound
    """
    def __init__(self, vertex_count, edges, weights=None, max_size=None):
        self.vertex_count = vertex_count
        self.weights = list(weights) if weights is not None \
            else [1] * vertex_count
        if len(self.weights) != vertex_count or \
                any(w < 1 for w in self.weights):
            raise utils.InvalidArgumentError(
                "Invalid weights: need one positive integer per vertex")
        self.max_size = max_size
        self.incident = [[] for _ in range(vertex_count)]
        self.forbidden = 0
        seen = set()
        for edge in edges:
            mask = 0
            for v in edge:
                mask |= 1 << v
            if mask in seen:
                continue
            seen.add(mask)
            if mask & (mask - 1) == 0:
                self.forbidden |= mask
                continue
            for v in _bits(mask):
                self.incident[v].append(mask & ~(1 << v))
        self.edge_count = len(seen)
        self.static_degree = [len(rests) for rests in self.incident]
        levels = set(self.weights)
        self._unit = levels <= {1}
        self._two_level = levels <= {1, 2}
        self._heavy = sum(1 << v for v in range(vertex_count)
                          if self.weights[v] == 2)

    # weight helpers

    def _mask_weight(self, mask):
        if self._unit:
            return mask.bit_count()
        if self._two_level:
            return mask.bit_count() + (mask & self._heavy).bit_count()
        return sum(self.weights[v] for v in _bits(mask))

    def _min_weight(self, mask):
        if self._unit:
            return 1
        if self._two_level:
            return 2 if mask & ~self._heavy == 0 else 1
        return min(self.weights[v] for v in _bits(mask))

    def _top_weight(self, mask, slots):
        if slots <= 0:
            return 0
        if self._unit:
            return min(mask.bit_count(), slots)
        if self._two_level:
            heavy = min((mask & self._heavy).bit_count(), slots)
            return 2 * heavy + min(mask.bit_count() - heavy, slots - heavy)
        return sum(sorted((self.weights[v] for v in _bits(mask)),
                          reverse=True)[:slots])

    # search primitives

    def _include(self, v, K, C):
        bit = 1 << v
        K = K | bit
        C = C & ~bit
        for rest in self.incident[v]:
            r = rest & ~K
            if r & (r - 1) == 0:
                C &= ~r
        return K, C

    def _examine(self, K, C, wK, wC, size, best):
        """
            Returns the vertex to branch on, or None if the node cannot
            beat best
        """
        total = wK + wC
        if total <= best:
            return None
        if self.max_size is not None and \
                wK + self._top_weight(C, self.max_size - size) <= best:
            return None
        incident = self.incident
        deduction = 0
        matched = 0
        counts = {}
        for k in _bits(K):
            for rest in incident[k]:
                r = rest & ~K
                if r & ~C:
                    continue
                for v in _bits(r):
                    counts[v] = counts.get(v, 0) + 1
                if not r & matched:
                    matched |= r
                    deduction += self._min_weight(r)
        if total - deduction <= best:
            return None
        free = C & ~matched
        for v in _bits(free):
            bit = 1 << v
            if not free & bit:
                continue
            for rest in incident[v]:
                if rest & ~free == 0:
                    free &= ~(rest | bit)
                    deduction += self._min_weight(rest | bit)
                    break
        if total - deduction <= best:
            return None
        weights = self.weights
        static = self.static_degree
        if counts:
            return max(counts, key=lambda v: (counts[v], weights[v],
                                              static[v], -v))
        return max(_bits(C), key=lambda v: (weights[v], static[v], -v))

    def _search(self, K, C, wK, wC, size, state):
        state.nodes += 1
        if state.done:
            return
        if wK > state.best:
            state.record(K, wK)
            if state.done:
                return
        if C == 0:
            return
        v = self._examine(K, C, wK, wC, size, state.best)
        if v is None:
            return
        K_in, C_in = self._include(v, K, C)
        self._search(K_in, C_in, wK + self.weights[v],
                     wC - self._mask_weight(C & ~C_in), size + 1, state)
        if state.done:
            return
        bit = 1 << v
        self._search(K, C & ~bit, wK, wC - self.weights[v], size, state)

    def _root(self, initial):
        K = 0
        C = ((1 << self.vertex_count) - 1) & ~self.forbidden
        for v in initial:
            if not C & (1 << v):
                return None
            K, C = self._include(v, K, C)
        return K, C

    def _greedy(self, K, C):
        weights = self.weights
        while C:
            v = max(_bits(C), key=lambda u: (weights[u], -u))
            K, C = self._include(v, K, C)
        return K

    def _subproblems(self, K, C):
        """
            Splits the root into 'include v_j, exclude v_1 .. v_{j-1}'
            in a fixed vertex order
        """
        weights = self.weights
        static = self.static_degree
        order = sorted(_bits(C), key=lambda v: (-weights[v], -static[v], v))
        tasks = []
        excluded = 0
        for v in order:
            remaining = C & ~excluded
            K_in, C_in = self._include(v, K, remaining)
            tasks.append((v, K_in, C_in, remaining))
            excluded |= 1 << v
        return tasks

    def solve(self, initial=(), target=None, upper=None, threads=1):
        """
            Finds a maximum weight independent set containing initial.

            Parameters:
                initial (iterable of int): vertices forced into the set
                target (int): if given, stop at the first independent
                set of weight >= target, or return None if there is none
                upper (int): known upper bound on the optimum, the search
                stops once it is reached
                threads (int): worker processes for the root subproblems;
                the result does not depend on it

            Returns:
                result (MWISResult) or None
        """
        sys.setrecursionlimit(max(sys.getrecursionlimit(),
                                  4 * self.vertex_count + 100))
        root = self._root(initial)
        if root is None:
            return None
        K, C = root
        wK = self._mask_weight(K)
        if target is not None:
            state = _SearchState(target - 1, target=target, upper=upper)
            if wK >= target:
                state.record(K, wK)
        else:
            greedy = self._greedy(K, C)
            state = _SearchState(self._mask_weight(greedy), upper=upper)
            state.best_mask = greedy
            if upper is not None and state.best >= upper:
                state.done = True
        size = K.bit_count()
        if not state.done:
            tasks = self._subproblems(K, C)
            if threads > 1 and len(tasks) > 1:
                self._solve_parallel(tasks, K, wK, size, state, threads)
            else:
                for v, K_in, C_in, remaining in tasks:
                    if state.done or self._examine(
                            K, remaining, wK, self._mask_weight(remaining),
                            size, state.best) is None:
                        break
                    self._search(K_in, C_in, wK + self.weights[v],
                                 self._mask_weight(C_in), size + 1, state)
        if state.best_mask is None:
            return None
        chosen = tuple(_bits(state.best_mask))
        return MWISResult(chosen, self._mask_weight(state.best_mask),
                          state.nodes)

    def _solve_parallel(self, tasks, K, wK, size, state, threads):
        jobs = [(self, v, K_in, C_in, wK, size, state.best, state.target,
                 state.upper) for v, K_in, C_in, _ in tasks]
        with ProcessPoolExecutor(max_workers=threads) as executor:
            outcomes = list(executor.map(_run_subproblem, jobs))
        # the first subproblem in the fixed order wins ties
        for best, mask, nodes in outcomes:
            state.nodes += nodes
            if mask is not None and best > state.best:
                state.record(mask, best)
                if state.done:
                    break


def _run_subproblem(job):
    solver, v, K_in, C_in, wK, size, best, target, upper = job
    state = _SearchState(best, target=target, upper=upper)
    solver._search(K_in, C_in, wK + solver.weights[v],
                   solver._mask_weight(C_in), size + 1, state)
    return state.best, state.best_mask, state.nodes


def _cpsat_run(vertex_count, edges, weights, initial, target, blocks,
               max_size, workers, time_limit):
    model = cp_model.CpModel()
    x = [model.NewBoolVar(f"x_{v}") for v in range(vertex_count)]
    for edge in edges:
        edge = sorted(set(edge))
        model.Add(sum(x[v] for v in edge) <= len(edge) - 1)
    for block, cap in blocks:
        model.Add(sum(x[v] for v in block) <= cap)
    if max_size is not None:
        model.Add(sum(x) <= max_size)
    for v in initial:
        model.Add(x[v] == 1)
    objective = sum(w * xv for w, xv in zip(weights, x))
    if target is None:
        model.Maximize(objective)
    else:
        model.Add(objective >= target)
    solver = cp_model.CpSolver()
    solver.parameters.num_search_workers = workers
    solver.parameters.random_seed = 0
    if time_limit is not None:
        solver.parameters.max_time_in_seconds = time_limit
    status = solver.Solve(model)
    if status == cp_model.INFEASIBLE:
        return None
    if status == cp_model.OPTIMAL or \
            (target is not None and status == cp_model.FEASIBLE):
        chosen = tuple(v for v in range(vertex_count) if solver.Value(x[v]))
        return MWISResult(chosen, sum(weights[v] for v in chosen), 0)
    raise utils.ResourceLimitError("CP-SAT time limit (s)", time_limit,
                                   "exceeded")


def cpsat_solve(vertex_count, edges, weights=None, initial=(), target=None,
                blocks=(), max_size=None, threads=1, time_limit=None):
    """
        Same contract as HypergraphMWIS.solve but decided by the OR-Tools
        CP-SAT solver. Each edge e becomes sum(x_v, v in e) <= |e| - 1;
        blocks are extra valid constraints sum(x_v, v in block) <= cap.

        Witnesses always come from a single-worker feasibility run at the
        optimal (or target) weight, so they do not depend on threads.

        Returns:
            result (MWISResult) or None if no set reaches target
    """
    weights = list(weights) if weights is not None else [1] * vertex_count
    args = (vertex_count, edges, weights, initial)
    extra = (blocks, max_size)
    if target is None:
        optimum = _cpsat_run(*args, None, *extra, threads, time_limit)
        if optimum is None:
            return None
        target = optimum.weight
    elif threads > 1:
        if _cpsat_run(*args, target, *extra, threads, time_limit) is None:
            return None
    return _cpsat_run(*args, target, *extra, 1, time_limit)
