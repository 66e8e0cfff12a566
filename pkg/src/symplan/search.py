"""Optimal search: A* over ground tasks with LM-cut / h_max, plus a blind
breadth-first oracle used for cross-validation and dataset audits.

The heuristics exist twice: jitted kernels in ``_kernels`` (used when numba
is importable and the task is nontrivial) and pure-Python twins below, kept
deliberately simple so they can serve as a reference in tests.  Setting
SYMPLAN_PURE=1 forces the pure path.
"""

from __future__ import annotations

import heapq
import math
import os
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _astar_core, _kernels
from .grounding import GroundAction, GroundTask, State

INF = int(_kernels.INF)

DEFAULT_EXPANSION_CAP = 5_000_000
DEFAULT_TIME_LIMIT = 60.0

SOLVED = "solved"
UNSOLVABLE = "unsolvable"
RESOURCE_LIMIT = "resource_limit"


@dataclass(frozen=True, slots=True)
class SearchResult:
    status: str  # solved | unsolvable | resource_limit
    plan: tuple[GroundAction, ...] | None
    cost: int | None
    expansions: int
    wall_time: float
    sampled_states: tuple[State, ...] = ()

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def _use_kernels() -> bool:
    return _kernels.NUMBA_AVAILABLE and os.environ.get("SYMPLAN_PURE") != "1"


class CompiledTask:
    """Flat-array form of a GroundTask shared by the heuristic evaluators.

    Appends an artificial init atom to every action's preconditions and an
    artificial zero-cost goal action whose single add effect is the artificial
    goal atom."""

    def __init__(self, task: GroundTask):
        self.task = task
        n = len(task.atoms)
        self.n_atoms = n
        self.goal_atom = n
        self.init_atom = n + 1
        self.n_total = n + 2
        self.nbytes = max(1, (n + 7) // 8)

        pres, adds = [], []
        for action in task.actions:
            pres.append(sorted(action.pre_pos) + [self.init_atom])
            adds.append(sorted(action.add))
        pres.append(sorted(task.goal) + [self.init_atom])
        adds.append([self.goal_atom])
        n_actions = len(pres)

        self.pre_ptr, self.pre_idx = _csr(pres, n_actions)
        self.add_ptr, self.add_idx = _csr(adds, n_actions)
        self.pre_occ_ptr, self.pre_occ_idx = _transpose(pres, self.n_total)
        self.add_occ_ptr, self.add_occ_idx = _transpose(adds, self.n_total)
        costs = np.ones(n_actions, np.int64)
        costs[-1] = 0
        self.base_costs = costs

    def state_bools(self, mask: int) -> np.ndarray:
        raw = np.frombuffer(mask.to_bytes(self.nbytes, "little"), np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n_atoms].astype(np.bool_)

    @property
    def packed(self):
        """Word-packed masks for the jitted A* core, built on first use."""
        if not hasattr(self, "_packed"):
            task = self.task
            n_words = max(1, (self.n_atoms + 63) // 64)

            def words(mask: int) -> np.ndarray:
                out = np.zeros(n_words, np.uint64)
                for w in range(n_words):
                    out[w] = (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
                return out

            m = len(task.actions)
            pre_w = np.zeros((m, n_words), np.uint64)
            preneg_w = np.zeros((m, n_words), np.uint64)
            del_w = np.zeros((m, n_words), np.uint64)
            add_w = np.zeros((m, n_words), np.uint64)
            for i, action in enumerate(task.actions):
                pre_w[i] = words(action.pre_mask)
                preneg_w[i] = words(action.preneg_mask)
                del_w[i] = words(action.del_mask)
                add_w[i] = words(action.add_mask)
            self._packed = (
                n_words, words(task.init.mask), words(task.goal_mask),
                pre_w, preneg_w, del_w, add_w,
            )
        return self._packed


def _csr(rows, n_rows):
    ptr = np.zeros(n_rows + 1, np.int32)
    for i, row in enumerate(rows):
        ptr[i + 1] = ptr[i] + len(row)
    idx = np.empty(ptr[-1], np.int32)
    k = 0
    for row in rows:
        for v in row:
            idx[k] = v
            k += 1
    return ptr, idx


def _transpose(rows, n_cols):
    counts = np.zeros(n_cols + 1, np.int32)
    for row in rows:
        for v in row:
            counts[v + 1] += 1
    ptr = np.cumsum(counts).astype(np.int32)
    idx = np.empty(ptr[-1], np.int32)
    fill = ptr[:-1].copy()
    for a, row in enumerate(rows):
        for v in row:
            idx[fill[v]] = a
            fill[v] += 1
    return ptr, idx


# ---------------------------------------------------------------------------
# Pure-Python twins of the jitted kernels


def _hmax_pass_py(ct: CompiledTask, state_mask: int, costs):
    dist = [INF] * ct.n_total
    remaining = [int(ct.pre_ptr[a + 1] - ct.pre_ptr[a]) for a in range(len(costs))]
    heap = []
    mask = state_mask
    i = 0
    while mask:
        if mask & 1:
            dist[i] = 0
            heap.append((0, i))
        mask >>= 1
        i += 1
    dist[ct.init_atom] = 0
    heap.append((0, ct.init_atom))
    heapq.heapify(heap)
    settled = [False] * ct.n_total
    pre_occ_ptr, pre_occ_idx = ct.pre_occ_ptr, ct.pre_occ_idx
    add_ptr, add_idx = ct.add_ptr, ct.add_idx
    while heap:
        d, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        for k in range(pre_occ_ptr[u], pre_occ_ptr[u + 1]):
            a = pre_occ_idx[k]
            remaining[a] -= 1
            if remaining[a] == 0:
                ready = d + costs[a]
                for j in range(add_ptr[a], add_ptr[a + 1]):
                    q = add_idx[j]
                    if ready < dist[q]:
                        dist[q] = ready
                        heapq.heappush(heap, (ready, q))
    return dist, remaining


def _hmax_py(ct: CompiledTask, state_mask: int) -> int:
    dist, _ = _hmax_pass_py(ct, state_mask, list(ct.base_costs))
    return dist[ct.goal_atom]


def _lmcut_py(ct: CompiledTask, state_mask: int, members=None) -> int:
    costs = list(ct.base_costs)
    n_actions = len(costs)
    if members is not None:
        members[:] = [0] * n_actions
    dist, remaining = _hmax_pass_py(ct, state_mask, costs)
    if dist[ct.goal_atom] >= INF:
        return INF

    pre_ptr, pre_idx = ct.pre_ptr, ct.pre_idx
    add_ptr, add_idx = ct.add_ptr, ct.add_idx
    add_occ_ptr, add_occ_idx = ct.add_occ_ptr, ct.add_occ_idx

    total = 0
    while dist[ct.goal_atom] > 0:
        pcf = [-1] * n_actions
        for a in range(n_actions):
            if remaining[a] != 0:
                continue
            best, best_d = -1, -1
            for k in range(pre_ptr[a], pre_ptr[a + 1]):
                p = pre_idx[k]
                if dist[p] > best_d:
                    best_d = dist[p]
                    best = p
            pcf[a] = best

        zone = [False] * ct.n_total
        zone[ct.goal_atom] = True
        stack = [ct.goal_atom]
        while stack:
            q = stack.pop()
            for k in range(add_occ_ptr[q], add_occ_ptr[q + 1]):
                a = add_occ_idx[k]
                if costs[a] == 0 and pcf[a] >= 0 and not zone[pcf[a]]:
                    zone[pcf[a]] = True
                    stack.append(pcf[a])

        by_pcf: dict[int, list[int]] = {}
        for a in range(n_actions):
            if pcf[a] >= 0:
                by_pcf.setdefault(pcf[a], []).append(a)

        visited = [False] * ct.n_total
        stack = []
        mask = state_mask
        i = 0
        while mask:
            if mask & 1 and not zone[i]:
                visited[i] = True
                stack.append(i)
            mask >>= 1
            i += 1
        if not zone[ct.init_atom]:
            visited[ct.init_atom] = True
            stack.append(ct.init_atom)
        cut = []
        while stack:
            p = stack.pop()
            for a in by_pcf.get(p, ()):
                effects = add_idx[add_ptr[a] : add_ptr[a + 1]]
                if any(zone[q] for q in effects):
                    cut.append(a)
                else:
                    for q in effects:
                        if not zone[q] and not visited[q]:
                            visited[q] = True
                            stack.append(q)

        if not cut:  # defensive: cannot happen for 0 < h_max < inf
            break
        lam = min(costs[a] for a in cut)
        total += lam
        for a in cut:
            costs[a] -= lam
            if members is not None:
                members[a] += lam
        dist, remaining = _hmax_pass_py(ct, state_mask, costs)
    return total


# ---------------------------------------------------------------------------
# Evaluators


class HmaxEvaluator:
    name = "hmax"

    def __init__(self, task: GroundTask, compiled: CompiledTask | None = None):
        self.task = task
        self.ct = compiled or CompiledTask(task)
        self._fast = _use_kernels()
        if self._fast:
            self._ws = _kernels.make_workspace(
                self.ct.n_total, len(self.ct.base_costs), len(self.ct.add_idx)
            )

    def __call__(self, state_mask: int) -> int:
        if self.task.unsolvable:
            return INF
        ct = self.ct
        if self._fast:
            return int(
                _kernels.hmax_kernel(
                    ct.state_bools(state_mask), ct.n_total, ct.goal_atom, ct.init_atom,
                    ct.pre_ptr, ct.pre_idx, ct.add_ptr, ct.add_idx,
                    ct.pre_occ_ptr, ct.pre_occ_idx, ct.base_costs, self._ws,
                )
            )
        return _hmax_py(ct, state_mask)


class LmcutEvaluator:
    name = "lmcut"

    def __init__(self, task: GroundTask, compiled: CompiledTask | None = None):
        self.task = task
        self.ct = compiled or CompiledTask(task)
        self._fast = _use_kernels()
        self._members = np.zeros(len(self.ct.base_costs), np.int64)
        if self._fast:
            self._ws = _kernels.make_workspace(
                self.ct.n_total, len(self.ct.base_costs), len(self.ct.add_idx)
            )

    def __call__(self, state_mask: int) -> int:
        return self.with_members(state_mask)[0]

    def with_members(self, state_mask: int):
        """(value, per-action landmark weight).  A cut that does not contain
        the applied action stays a landmark for the successor, so
        value - members[action] is an admissible successor bound.  The
        returned array is reused by the next call."""
        if self.task.unsolvable:
            return INF, self._members
        ct = self.ct
        if self._fast:
            cut_id = self._ws[15]
            value = int(
                _kernels.lmcut_kernel(
                    ct.state_bools(state_mask), ct.n_total, ct.goal_atom, ct.init_atom,
                    ct.pre_ptr, ct.pre_idx, ct.add_ptr, ct.add_idx,
                    ct.pre_occ_ptr, ct.pre_occ_idx, ct.add_occ_ptr, ct.add_occ_idx,
                    ct.base_costs, self._ws, cut_id,
                )
            )
            self._members[:] = cut_id != 0  # unit costs: one cut, weight 1
        else:
            value = _lmcut_py(ct, state_mask, self._members)
        return value, self._members


class BlindEvaluator:
    name = "blind"

    def __init__(self, task: GroundTask, compiled=None):
        self.task = task
        self.goal_mask = task.goal_mask

    def __call__(self, state_mask: int) -> int:
        return 0 if state_mask & self.goal_mask == self.goal_mask else 1


HEURISTICS = {"lmcut": LmcutEvaluator, "hmax": HmaxEvaluator, "blind": BlindEvaluator}


def _as_value(raw: int) -> int | float:
    return math.inf if raw >= INF else raw


def h_max(task: GroundTask, state: State) -> int | float:
    """Delete-relaxation fixed-point cost of the most expensive goal atom."""
    return _as_value(HmaxEvaluator(task)(state.mask))


def h_lmcut(task: GroundTask, state: State) -> int | float:
    """LM-cut: accumulated costs of disjunctive landmarks found by cuts in the
    justification graph; dominates h_max and never exceeds the optimal cost."""
    return _as_value(LmcutEvaluator(task)(state.mask))


# ---------------------------------------------------------------------------
# Searches


def _extract_plan(task, parents, end_mask):
    plan = []
    cur = end_mask
    while cur in parents:
        prev, ai = parents[cur]
        plan.append(task.actions[ai])
        cur = prev
    plan.reverse()
    return tuple(plan)


def _astar_fast(task, max_expansions, time_limit, sample_expanded):
    """Route an LM-cut search through the jitted core."""
    start = time.perf_counter()
    ct = CompiledTask(task)
    n_words, init_words, goal_words, pre_w, preneg_w, del_w, add_w = ct.packed
    workspace = _kernels.make_workspace(ct.n_total, len(ct.base_costs), len(ct.add_idx))
    status, cost, plan_ids, expansions, samples = _astar_core.astar_core(
        init_words, goal_words, n_words, ct.n_atoms,
        pre_w, preneg_w, del_w, add_w,
        ct.n_total, ct.goal_atom, ct.init_atom,
        ct.pre_ptr, ct.pre_idx, ct.add_ptr, ct.add_idx,
        ct.pre_occ_ptr, ct.pre_occ_idx, ct.add_occ_ptr, ct.add_occ_idx,
        ct.base_costs, workspace,
        max_expansions, time.time() + time_limit,
        97, sample_expanded,
    )
    wall = time.perf_counter() - start
    sampled = tuple(
        State(sum(int(row[w]) << (64 * w) for w in range(n_words)))
        for row in samples
    )
    if status == _astar_core.STATUS_SOLVED:
        plan = tuple(task.actions[i] for i in plan_ids)
        return SearchResult(SOLVED, plan, int(cost), expansions, wall, sampled)
    if status == _astar_core.STATUS_UNSOLVABLE:
        return SearchResult(UNSOLVABLE, None, None, expansions, wall, sampled)
    return SearchResult(RESOURCE_LIMIT, None, None, expansions, wall, sampled)


def astar_plan(
    task: GroundTask,
    heuristic: str = "lmcut",
    max_expansions: int = DEFAULT_EXPANSION_CAP,
    time_limit: float = DEFAULT_TIME_LIMIT,
    sample_expanded: int = 0,
) -> SearchResult:
    """A* with deterministic tie-breaking (lower f, then higher g, then FIFO).

    With an admissible heuristic the returned plan has minimum length.  The
    heuristic is evaluated lazily: successors enter the open list under the
    admissible bound max(h(parent) - 1, 0) and get their real value only when
    popped; if the corrected f is larger the entry is re-queued.  Since every
    queue key underestimates the true f of its state, a goal popped first
    still carries minimal g.  LM-cut is not consistent, so cheaper
    rediscoveries of closed states re-enter the open list via the g check."""
    start = time.perf_counter()
    if task.unsolvable:
        return SearchResult(UNSOLVABLE, None, None, 0, time.perf_counter() - start)
    if heuristic == "lmcut" and _use_kernels():
        return _astar_fast(task, max_expansions, time_limit, sample_expanded)

    evaluator = HEURISTICS[heuristic](task)
    with_members = hasattr(evaluator, "with_members")
    init_mask = task.init.mask
    goal_mask = task.goal_mask

    h0 = evaluator(init_mask)
    if h0 >= INF:
        return SearchResult(UNSOLVABLE, None, None, 0, time.perf_counter() - start)

    act_masks = [(a.pre_mask, a.preneg_mask, a.del_mask, a.add_mask)
                 for a in task.actions]
    g_best = {init_mask: 0}
    parents: dict[int, tuple[int, int]] = {}
    h_cache = {init_mask: h0}  # real heuristic values only
    open_heap = [(h0, 0, 0, init_mask)]
    tick = 0
    expansions = 0
    sampled: list[State] = []
    sample_stride = 97  # prime stride gives a spread-out deterministic sample

    while open_heap:
        f, neg_g, _, mask = heapq.heappop(open_heap)
        g = -neg_g
        if g > g_best[mask]:
            continue  # stale entry
        if mask & goal_mask == goal_mask:
            plan = _extract_plan(task, parents, mask)
            return SearchResult(
                SOLVED, plan, len(plan), expansions,
                time.perf_counter() - start, tuple(sampled),
            )
        members = None
        h = h_cache.get(mask)
        if h is None:
            h, members = evaluator.with_members(mask) if with_members \
                else (evaluator(mask), None)
            h_cache[mask] = h
        if h >= INF:
            continue
        if g + h > f:  # the entry was queued under an optimistic estimate
            tick += 1
            heapq.heappush(open_heap, (g + h, neg_g, tick, mask))
            continue

        expansions += 1
        if sample_expanded and len(sampled) < sample_expanded and \
                expansions % sample_stride == 1:
            sampled.append(State(mask))
        if expansions >= max_expansions:
            return SearchResult(RESOURCE_LIMIT, None, None, expansions,
                                time.perf_counter() - start, tuple(sampled))
        if expansions % 1024 == 0 and time.perf_counter() - start > time_limit:
            return SearchResult(RESOURCE_LIMIT, None, None, expansions,
                                time.perf_counter() - start, tuple(sampled))

        if with_members and members is None and h > 0:
            _, members = evaluator.with_members(mask)

        ng = g + 1
        fallback_bound = h - 1 if h > 1 else 0
        for ai, (pre, neg, dele, add) in enumerate(act_masks):
            if mask & pre != pre or mask & neg:
                continue
            succ = (mask & ~dele) | add
            old = g_best.get(succ)
            if old is not None and old <= ng:
                continue
            g_best[succ] = ng
            parents[succ] = (mask, ai)
            hs = h_cache.get(succ)
            if hs is None:
                if members is not None:
                    hs = h - members[ai]
                    if hs < 0:
                        hs = 0
                else:
                    hs = fallback_bound
            if hs >= INF:
                continue
            tick += 1
            heapq.heappush(open_heap, (ng + hs, -ng, tick, succ))

    return SearchResult(UNSOLVABLE, None, None, expansions,
                        time.perf_counter() - start, tuple(sampled))


def bfs_oracle(
    task: GroundTask,
    max_expansions: int = 2_000_000,
    time_limit: float = DEFAULT_TIME_LIMIT,
) -> SearchResult:
    """Breadth-first search; optimal under unit costs.  Used in tests and
    dataset audits as the oracle the heuristic search is checked against."""
    start = time.perf_counter()
    if task.unsolvable:
        return SearchResult(UNSOLVABLE, None, None, 0, time.perf_counter() - start)

    init_mask = task.init.mask
    goal_mask = task.goal_mask
    if init_mask & goal_mask == goal_mask:
        return SearchResult(SOLVED, (), 0, 0, time.perf_counter() - start)

    act_masks = [(a.pre_mask, a.preneg_mask, a.del_mask, a.add_mask) for a in task.actions]
    parents: dict[int, tuple[int, int]] = {}
    seen = {init_mask}
    frontier = deque([init_mask])
    expansions = 0
    while frontier:
        mask = frontier.popleft()
        expansions += 1
        if expansions >= max_expansions:
            return SearchResult(RESOURCE_LIMIT, None, None, expansions,
                                time.perf_counter() - start)
        if expansions % 4096 == 0 and time.perf_counter() - start > time_limit:
            return SearchResult(RESOURCE_LIMIT, None, None, expansions,
                                time.perf_counter() - start)
        for ai, (pre, neg, dele, add) in enumerate(act_masks):
            if mask & pre != pre or mask & neg:
                continue
            succ = (mask & ~dele) | add
            if succ in seen:
                continue
            seen.add(succ)
            parents[succ] = (mask, ai)
            if succ & goal_mask == goal_mask:
                plan = _extract_plan(task, parents, succ)
                return SearchResult(SOLVED, plan, len(plan), expansions,
                                    time.perf_counter() - start)
            frontier.append(succ)
    return SearchResult(UNSOLVABLE, None, None, expansions, time.perf_counter() - start)


def reachable_state_count(task: GroundTask, cap: int = 1_000_000) -> int:
    """Number of states reachable from init (capped); used by isomorphism checks."""
    act_masks = [(a.pre_mask, a.preneg_mask, a.del_mask, a.add_mask) for a in task.actions]
    seen = {task.init.mask}
    frontier = deque([task.init.mask])
    while frontier:
        mask = frontier.popleft()
        for pre, neg, dele, add in act_masks:
            if mask & pre != pre or mask & neg:
                continue
            succ = (mask & ~dele) | add
            if succ not in seen:
                seen.add(succ)
                if len(seen) >= cap:
                    return cap
                frontier.append(succ)
    return len(seen)
