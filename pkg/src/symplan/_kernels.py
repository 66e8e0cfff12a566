"""Compiled heuristic kernels (numba).

The h_max and LM-cut inner loops run per generated search node, so they are
jitted over flat CSR arrays.  `search.py` falls back to pure-Python twins with
identical semantics when numba is unavailable; tests cross-check the two.

Atom ids: 0..n_atoms-1 are fluents, then the artificial goal atom, then the
artificial init atom (appended to every action's preconditions so each action
has a well-defined precondition-choice).  The artificial goal action is the
last action and the only one with cost 0.

Performance notes:
- the full h_max pass uses a Dial (bucket) queue; distances are bounded by
  the total remaining action cost, so buckets beat a binary heap here;
- between cut rounds h_max is restored incrementally: cost reductions only
  lower distances, so a small label-correcting pass seeded from the cut
  actions' effects suffices, and only actions behind changed atoms get their
  precondition-choice recomputed;
- `lmcut_seeded` continues a parent's cost partition: every cut that does not
  contain the action leading to the child remains a landmark for the child,
  so the child's value is the parent's value plus whatever new cuts the
  residual cost function still yields (usually none).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


INF = np.int64(1) << 40


def make_workspace(n_total: int, n_actions: int, n_adds: int):
    """Reusable scratch arrays so per-call allocation cost disappears."""
    entry_cap = n_total + n_adds + 64
    return (
        np.empty(n_total, np.int64),  # 0 dist
        np.empty(n_actions, np.int32),  # 1 remaining
        np.empty(n_actions, np.int64),  # 2 costs working copy
        np.empty(n_actions, np.int32),  # 3 pcf
        np.empty(n_total, np.bool_),  # 4 zone
        np.empty(n_total, np.bool_),  # 5 cut-side visited
        np.empty(n_total, np.int32),  # 6 stack
        np.empty(n_total + 1, np.int32),  # 7 pcf_ptr
        np.empty(n_actions, np.int32),  # 8 pcf_items
        np.empty(n_actions, np.int32),  # 9 cut list
        np.empty(n_actions, np.bool_),  # 10 pcf dirty flags
        np.empty(n_actions + 3, np.int32),  # 11 dial bucket heads
        np.empty(entry_cap, np.int32),  # 12 dial entry next
        np.empty(entry_cap, np.int32),  # 13 dial entry atom
        np.empty(entry_cap, np.int64),  # 14 decrease heap
        np.empty(n_actions, np.int32),  # 15 cut ids per action
    )


@njit(cache=True)
def _hmax_full(
    state, n_total, init_atom,
    pre_ptr, pre_idx, add_ptr, add_idx, pre_occ_ptr, pre_occ_idx,
    costs, dist, remaining, bucket_head, entry_next, entry_atom,
):
    """Generalized Dijkstra over the delete relaxation with a Dial queue."""
    n_actions = len(costs)
    n_buckets = len(bucket_head)
    for i in range(n_total):
        dist[i] = INF
    for b in range(n_buckets):
        bucket_head[b] = -1
    for a in range(n_actions):
        remaining[a] = pre_ptr[a + 1] - pre_ptr[a]

    n_entries = 0
    for i in range(len(state)):
        if state[i]:
            dist[i] = 0
            entry_atom[n_entries] = i
            entry_next[n_entries] = bucket_head[0]
            bucket_head[0] = n_entries
            n_entries += 1
    dist[init_atom] = 0
    entry_atom[n_entries] = init_atom
    entry_next[n_entries] = bucket_head[0]
    bucket_head[0] = n_entries
    n_entries += 1

    pending = n_entries
    d = 0
    while pending > 0 and d < n_buckets:
        e = bucket_head[d]
        if e == -1:
            d += 1
            continue
        bucket_head[d] = entry_next[e]
        pending -= 1
        u = entry_atom[e]
        if dist[u] != d:  # stale entry, atom settled at a smaller distance
            continue
        for k in range(pre_occ_ptr[u], pre_occ_ptr[u + 1]):
            a = pre_occ_idx[k]
            remaining[a] -= 1
            if remaining[a] == 0:
                ready = d + costs[a]
                for j in range(add_ptr[a], add_ptr[a + 1]):
                    q = add_idx[j]
                    if ready < dist[q]:
                        dist[q] = ready
                        entry_atom[n_entries] = q
                        entry_next[n_entries] = bucket_head[ready]
                        bucket_head[ready] = n_entries
                        n_entries += 1
                        pending += 1


@njit(cache=True)
def _heap_push(heap, size, item):
    heap[size] = item
    i = size
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        small = left
        right = left + 1
        if right < size and heap[right] < heap[left]:
            small = right
        if heap[i] <= heap[small]:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top, size


@njit(cache=True)
def _maxpre(a, pre_ptr, pre_idx, dist):
    best = np.int64(0)
    for k in range(pre_ptr[a], pre_ptr[a + 1]):
        d = dist[pre_idx[k]]
        if d > best:
            best = d
    return best


@njit(cache=True)
def _hmax_decrease(
    cut, n_cut,
    pre_ptr, pre_idx, add_ptr, add_idx, pre_occ_ptr, pre_occ_idx,
    costs, dist, remaining, heap, dirty,
):
    """Restore the h_max fixpoint after lowering the cut actions' costs.
    Marks actions whose max-precondition distance may have changed."""
    size = 0
    for c in range(n_cut):
        a = cut[c]
        if remaining[a] != 0:
            continue
        ready = costs[a] + _maxpre(a, pre_ptr, pre_idx, dist)
        for j in range(add_ptr[a], add_ptr[a + 1]):
            q = add_idx[j]
            if ready < dist[q]:
                dist[q] = ready
                size = _heap_push(heap, size, (ready << 32) | np.int64(q))
    while size > 0:
        item, size = _heap_pop(heap, size)
        u = np.int64(item & 0xFFFFFFFF)
        d = item >> 32
        if d > dist[u]:
            continue
        for k in range(pre_occ_ptr[u], pre_occ_ptr[u + 1]):
            a = pre_occ_idx[k]
            if remaining[a] != 0:
                continue
            dirty[a] = True
            ready = costs[a] + _maxpre(a, pre_ptr, pre_idx, dist)
            for j in range(add_ptr[a], add_ptr[a + 1]):
                q = add_idx[j]
                if ready < dist[q]:
                    dist[q] = ready
                    size = _heap_push(heap, size, (ready << 32) | np.int64(q))


@njit(cache=True)
def _set_pcf(a, pre_ptr, pre_idx, dist, pcf):
    best = np.int32(-1)
    best_d = np.int64(-1)
    for k in range(pre_ptr[a], pre_ptr[a + 1]):
        p = pre_idx[k]
        if dist[p] > best_d:  # ties resolve to the lowest atom index
            best_d = dist[p]
            best = p
    pcf[a] = best


@njit(cache=True)
def hmax_kernel(
    state, n_total, goal_atom, init_atom,
    pre_ptr, pre_idx, add_ptr, add_idx, pre_occ_ptr, pre_occ_idx,
    base_costs, workspace,
):
    dist, remaining = workspace[0], workspace[1]
    bucket_head, entry_next, entry_atom = workspace[11], workspace[12], workspace[13]
    _hmax_full(
        state, n_total, init_atom, pre_ptr, pre_idx, add_ptr, add_idx,
        pre_occ_ptr, pre_occ_idx, base_costs, dist, remaining,
        bucket_head, entry_next, entry_atom,
    )
    return dist[goal_atom]


@njit(cache=True)
def _lmcut_rounds(
    state, n_total, goal_atom, init_atom,
    pre_ptr, pre_idx, add_ptr, add_idx,
    pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
    costs, cut_id, next_id, workspace,
):
    """Run cut rounds under the (already initialized) cost function.

    Returns the accumulated landmark cost, or INF if the goal is unreachable.
    `costs` is consumed; every action that lands in a cut gets that cut's id
    in `cut_id` (cuts are disjoint under unit costs, so one id per action)."""
    (dist, remaining, _costs_unused, pcf, zone, visited, stack,
     pcf_ptr, pcf_items, cut, dirty, bucket_head, entry_next, entry_atom,
     dec_heap, _cid_unused) = workspace
    n_actions = len(costs)

    _hmax_full(
        state, n_total, init_atom, pre_ptr, pre_idx, add_ptr, add_idx,
        pre_occ_ptr, pre_occ_idx, costs, dist, remaining,
        bucket_head, entry_next, entry_atom,
    )
    if dist[goal_atom] >= INF:
        return INF

    for a in range(n_actions):
        if remaining[a] == 0:
            _set_pcf(a, pre_ptr, pre_idx, dist, pcf)
        else:
            pcf[a] = -1

    total = np.int64(0)
    while dist[goal_atom] > 0:
        # goal zone: atoms reaching the goal atom through zero-cost actions
        for i in range(n_total):
            zone[i] = False
        zone[goal_atom] = True
        top = 0
        stack[top] = goal_atom
        top += 1
        while top > 0:
            top -= 1
            q = stack[top]
            for k in range(add_occ_ptr[q], add_occ_ptr[q + 1]):
                a = add_occ_idx[k]
                if costs[a] == 0 and pcf[a] >= 0:
                    p = pcf[a]
                    if not zone[p]:
                        zone[p] = True
                        stack[top] = p
                        top += 1

        # group applicable actions by their pcf atom
        for i in range(n_total + 1):
            pcf_ptr[i] = 0
        for a in range(n_actions):
            if pcf[a] >= 0:
                pcf_ptr[pcf[a] + 1] += 1
        for i in range(n_total):
            pcf_ptr[i + 1] += pcf_ptr[i]
        for a in range(n_actions):
            if pcf[a] >= 0:
                p = pcf[a]
                pcf_items[pcf_ptr[p]] = a
                pcf_ptr[p] += 1
        for i in range(n_total, 0, -1):
            pcf_ptr[i] = pcf_ptr[i - 1]
        pcf_ptr[0] = 0

        # forward sweep from the initial side; actions crossing into the goal
        # zone form the cut
        for i in range(n_total):
            visited[i] = False
        top = 0
        for i in range(len(state)):
            if state[i] and not zone[i]:
                visited[i] = True
                stack[top] = i
                top += 1
        if not zone[init_atom]:
            visited[init_atom] = True
            stack[top] = init_atom
            top += 1
        n_cut = 0
        while top > 0:
            top -= 1
            p = stack[top]
            for k in range(pcf_ptr[p], pcf_ptr[p + 1]):
                a = pcf_items[k]
                crosses = False
                for j in range(add_ptr[a], add_ptr[a + 1]):
                    if zone[add_idx[j]]:
                        crosses = True
                        break
                if crosses:
                    cut[n_cut] = a
                    n_cut += 1
                else:
                    for j in range(add_ptr[a], add_ptr[a + 1]):
                        q = add_idx[j]
                        if not zone[q] and not visited[q]:
                            visited[q] = True
                            stack[top] = q
                            top += 1

        if n_cut == 0:  # defensive: cannot happen for 0 < h_max < inf
            break
        lam = costs[cut[0]]
        for c in range(1, n_cut):
            if costs[cut[c]] < lam:
                lam = costs[cut[c]]
        total += lam
        for c in range(n_cut):
            costs[cut[c]] -= lam
            cut_id[cut[c]] = next_id
        next_id += 1

        for a in range(n_actions):
            dirty[a] = False
        _hmax_decrease(
            cut, n_cut, pre_ptr, pre_idx, add_ptr, add_idx,
            pre_occ_ptr, pre_occ_idx, costs, dist, remaining, dec_heap, dirty,
        )
        for a in range(n_actions):
            if dirty[a] and remaining[a] == 0:
                _set_pcf(a, pre_ptr, pre_idx, dist, pcf)
    return total


@njit(cache=True)
def lmcut_kernel(
    state, n_total, goal_atom, init_atom,
    pre_ptr, pre_idx, add_ptr, add_idx,
    pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
    base_costs, workspace, cut_id,
):
    costs = workspace[2]
    n_actions = len(base_costs)
    for a in range(n_actions):
        costs[a] = base_costs[a]
        cut_id[a] = 0
    return _lmcut_rounds(
        state, n_total, goal_atom, init_atom,
        pre_ptr, pre_idx, add_ptr, add_idx,
        pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
        costs, cut_id, np.int32(1), workspace,
    )


@njit(cache=True)
def lmcut_seeded(
    state, n_total, goal_atom, init_atom,
    pre_ptr, pre_idx, add_ptr, add_idx,
    pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
    base_costs, workspace, cut_id,
    parent_cid, via,
):
    """Continue a parent's cost partition on the successor reached by `via`.

    Every parent cut not containing `via` stays a landmark for the successor
    (unit costs, each action in at most one cut).  Those cuts keep their cost
    reductions and ids; the cut containing `via`, if any, is refunded.  The
    return value counts only the NEW cuts; the caller adds the kept total."""
    costs = workspace[2]
    n_actions = len(base_costs)
    via_cid = parent_cid[via]
    for a in range(n_actions):
        pc = parent_cid[a]
        if pc != 0 and pc != via_cid:
            costs[a] = 0
            cut_id[a] = pc
        else:
            costs[a] = base_costs[a]
            cut_id[a] = 0
    return _lmcut_rounds(
        state, n_total, goal_atom, init_atom,
        pre_ptr, pre_idx, add_ptr, add_idx,
        pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
        costs, cut_id, np.int32(300), workspace,
    )
