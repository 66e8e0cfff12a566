"""Jitted A* core over bit-packed states.

States are W-word uint64 vectors (W = ceil(n_atoms/64)).  The open list is a
binary heap of packed keys (f, 65535-g, push tick) so ties break toward lower
f, then higher g, then FIFO; the closed/g table is an open-addressing hash map
from state words to node ids.  The heuristic is LM-cut, evaluated once per
expanded node; successors are queued under the admissible landmark bound
h(parent) - members[action], so nodes that never justify their optimistic key
are simply popped, re-evaluated, and expanded in their correct order.

Node, heap, and hash storage grow by doubling inside the loop.
"""

from __future__ import annotations

import time
from contextlib import contextmanager

import numpy as np

from ._kernels import INF, NUMBA_AVAILABLE, lmcut_kernel, lmcut_seeded, njit

MAX_SLOT_CUTS = 255  # compacted cut ids must fit uint8; larger h falls back

if NUMBA_AVAILABLE:
    from numba import objmode
else:  # pragma: no cover - the core is only invoked when numba is present

    @contextmanager
    def objmode(**kwargs):
        yield


def _now() -> float:
    return time.time()

STATUS_SOLVED = 0
STATUS_UNSOLVABLE = 1
STATUS_LIMIT = 2

_EMPTY = np.int32(-1)


@njit(cache=True, inline="always")
def _mix(words, row, W):
    h = np.uint64(0x9E3779B97F4A7C15)
    for w in range(W):
        h ^= words[row, w] + np.uint64(0x9E3779B97F4A7C15) + (h << np.uint64(6)) + (h >> np.uint64(2))
        h *= np.uint64(0xBF58476D1CE4E5B9)
        h ^= h >> np.uint64(31)
    return h


@njit(cache=True)
def _probe(table, states, row_words, W, node_states):
    """Find row_words (a row in `states`) in the table; returns (slot, node)."""
    cap = np.uint64(len(table))
    idx = _mix(states, row_words, W) % cap
    while True:
        node = table[idx]
        if node == _EMPTY:
            return idx, _EMPTY
        same = True
        for w in range(W):
            if node_states[node, w] != states[row_words, w]:
                same = False
                break
        if same:
            return idx, node
        idx = (idx + np.uint64(1)) % cap


@njit(cache=True)
def astar_core(
    init_words,
    goal_words,
    W,
    n_atoms,
    pre_w,
    preneg_w,
    del_w,
    add_w,
    n_total,
    goal_atom,
    init_atom,
    pre_ptr,
    pre_idx,
    add_ptr,
    add_idx,
    pre_occ_ptr,
    pre_occ_idx,
    add_occ_ptr,
    add_occ_idx,
    base_costs,
    workspace,
    max_expansions,
    deadline,
    sample_every,
    sample_cap,
):
    n_actions = len(pre_w)
    n_costed = len(base_costs)
    cut_id = workspace[15]
    remap = np.zeros(66000, np.int32)
    state_bool = np.zeros(n_atoms, np.bool_)

    cap = 1 << 14
    node_states = np.zeros((cap, W), np.uint64)
    node_g = np.empty(cap, np.int32)
    node_h = np.empty(cap, np.int32)
    node_parent = np.empty(cap, np.int32)
    node_via = np.empty(cap, np.int32)
    node_slot = np.full(cap, -1, np.int32)

    slot_cap = 1 << 12
    slot_cid = np.zeros((slot_cap, n_costed), np.uint8)
    n_slots = 0

    hcap = np.uint64(cap * 2)
    table = np.full(int(hcap), _EMPTY, np.int32)

    heap_cap = 1 << 16
    heap_key = np.empty(heap_cap, np.uint64)
    heap_node = np.empty(heap_cap, np.int32)
    heap_size = 0

    samples = np.zeros((sample_cap if sample_cap > 0 else 1, W), np.uint64)
    n_samples = 0

    succ = np.zeros((1, W), np.uint64)  # 2-d so _probe can take a row index

    # node 0 = init
    for w in range(W):
        node_states[0, w] = init_words[w]
    for i in range(n_atoms):
        state_bool[i] = (init_words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1) != 0
    h0 = lmcut_kernel(
        state_bool, n_total, goal_atom, init_atom, pre_ptr, pre_idx, add_ptr,
        add_idx, pre_occ_ptr, pre_occ_idx, add_occ_ptr, add_occ_idx,
        base_costs, workspace, cut_id,
    )
    if h0 >= INF:
        return STATUS_UNSOLVABLE, np.int64(-1), np.empty(0, np.int32), 0, samples[:0]
    node_g[0] = 0
    node_h[0] = np.int32(h0)
    node_parent[0] = -1
    node_via[0] = -1
    n_nodes = 1
    slot, _ = _probe(table, node_states, 0, W, node_states)
    table[slot] = 0

    tick = np.uint64(0)
    heap_key[0] = (np.uint64(h0) << np.uint64(48)) | (np.uint64(65535) << np.uint64(32))
    heap_node[0] = 0
    heap_size = 1
    expansions = 0

    while heap_size > 0:
        # pop min
        key = heap_key[0]
        idx = heap_node[0]
        heap_size -= 1
        heap_key[0] = heap_key[heap_size]
        heap_node[0] = heap_node[heap_size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= heap_size:
                break
            small = left
            right = left + 1
            if right < heap_size and heap_key[right] < heap_key[left]:
                small = right
            if heap_key[i] <= heap_key[small]:
                break
            heap_key[i], heap_key[small] = heap_key[small], heap_key[i]
            heap_node[i], heap_node[small] = heap_node[small], heap_node[i]
            i = small
        g_pop = np.int32(65535 - ((key >> np.uint64(32)) & np.uint64(0xFFFF)))
        if g_pop > node_g[idx]:
            continue  # stale
        g = node_g[idx]

        is_goal = True
        for w in range(W):
            if node_states[idx, w] & goal_words[w] != goal_words[w]:
                is_goal = False
                break
        if is_goal:
            length = 0
            walk = idx
            while node_parent[walk] >= 0:
                length += 1
                walk = node_parent[walk]
            plan = np.empty(length, np.int32)
            walk = idx
            pos = length - 1
            while node_parent[walk] >= 0:
                plan[pos] = node_via[walk]
                pos -= 1
                walk = node_parent[walk]
            return STATUS_SOLVED, np.int64(g), plan, expansions, samples[:n_samples]

        for i in range(n_atoms):
            state_bool[i] = (node_states[idx, i >> 6] >> np.uint64(i & 63)) & np.uint64(1) != 0
        # continue the parent's cost partition: cuts not containing the
        # arriving action stay landmarks here, so only the refunded cut (if
        # any) and genuinely new cuts need to be recomputed
        par = node_parent[idx]
        seeded = False
        if par >= 0:
            pslot = node_slot[par]
            if pslot >= 0:
                via = node_via[idx]
                extra = lmcut_seeded(
                    state_bool, n_total, goal_atom, init_atom, pre_ptr,
                    pre_idx, add_ptr, add_idx, pre_occ_ptr, pre_occ_idx,
                    add_occ_ptr, add_occ_idx, base_costs, workspace,
                    cut_id, slot_cid[pslot], via,
                )
                if extra >= INF:
                    hv = INF
                else:
                    kept = np.int64(node_h[par])
                    if slot_cid[pslot, via] != 0:
                        kept -= 1
                    hv = kept + extra
                seeded = True
        if not seeded:
            hv = lmcut_kernel(
                state_bool, n_total, goal_atom, init_atom, pre_ptr, pre_idx,
                add_ptr, add_idx, pre_occ_ptr, pre_occ_idx, add_occ_ptr,
                add_occ_idx, base_costs, workspace, cut_id,
            )
        if hv >= INF:
            continue
        node_h[idx] = np.int32(hv)

        # compact raw cut ids to 1..k and store them for this node's children
        if n_slots >= slot_cap:
            slot_cap *= 2
            new_cid = np.zeros((slot_cap, n_costed), np.uint8)
            new_cid[:n_slots] = slot_cid[:n_slots]
            slot_cid = new_cid
        k = 0
        ok_slot = True
        for a in range(n_costed):
            c = cut_id[a]
            if c != 0:
                if remap[c] == 0:
                    k += 1
                    if k > MAX_SLOT_CUTS:
                        ok_slot = False
                        break
                    remap[c] = k
                slot_cid[n_slots, a] = np.uint8(remap[c])
            else:
                slot_cid[n_slots, a] = 0
        for a in range(n_costed):
            c = cut_id[a]
            if c != 0:
                remap[c] = 0
        if ok_slot:
            node_slot[idx] = n_slots
            n_slots += 1
        else:
            for a in range(n_costed):
                slot_cid[n_slots, a] = 0

        expansions += 1
        if sample_cap > 0 and n_samples < sample_cap and expansions % sample_every == 1:
            for w in range(W):
                samples[n_samples, w] = node_states[idx, w]
            n_samples += 1
        if expansions >= max_expansions:
            return STATUS_LIMIT, np.int64(-1), np.empty(0, np.int32), expansions, samples[:n_samples]
        if expansions % 4096 == 0:
            with objmode(now="float64"):
                now = _now()
            if now > deadline:
                return STATUS_LIMIT, np.int64(-1), np.empty(0, np.int32), expansions, samples[:n_samples]

        ng = g + 1
        for ai in range(n_actions):
            ok = True
            for w in range(W):
                s = node_states[idx, w]
                if s & pre_w[ai, w] != pre_w[ai, w] or s & preneg_w[ai, w] != 0:
                    ok = False
                    break
            if not ok:
                continue
            for w in range(W):
                succ[0, w] = (node_states[idx, w] & ~del_w[ai, w]) | add_w[ai, w]

            slot, node = _probe(table, succ, 0, W, node_states)
            if node != _EMPTY and node_g[node] <= ng:
                continue
            if node == _EMPTY:
                if n_nodes >= cap:  # grow node store, then re-derive the slot
                    cap *= 2
                    new_states = np.zeros((cap, W), np.uint64)
                    new_states[:n_nodes] = node_states[:n_nodes]
                    node_states = new_states
                    node_g = np.concatenate((node_g, np.empty(n_nodes, np.int32)))
                    node_h = np.concatenate((node_h, np.empty(n_nodes, np.int32)))
                    node_parent = np.concatenate((node_parent, np.empty(n_nodes, np.int32)))
                    node_via = np.concatenate((node_via, np.empty(n_nodes, np.int32)))
                    node_slot = np.concatenate((node_slot, np.full(n_nodes, -1, np.int32)))
                node = n_nodes
                n_nodes += 1
                for w in range(W):
                    node_states[node, w] = succ[0, w]
                node_h[node] = -1
                table[slot] = node
                if np.uint64(n_nodes * 2) >= hcap:  # keep load factor under 1/2
                    hcap *= np.uint64(2)
                    table = np.full(int(hcap), _EMPTY, np.int32)
                    for nd in range(n_nodes):
                        s2, _ = _probe(table, node_states, nd, W, node_states)
                        table[s2] = nd
            node_g[node] = ng
            node_parent[node] = idx
            node_via[node] = ai

            if node_h[node] >= 0:
                hs = np.int64(node_h[node])
            else:
                hs = hv - 1 if cut_id[ai] != 0 else hv
                if hs < 0:
                    hs = 0
            if hs >= INF:
                continue
            tick += np.uint64(1)
            nf = np.uint64(ng + hs)
            nkey = (nf << np.uint64(48)) | (np.uint64(65535 - ng) << np.uint64(32)) | (tick & np.uint64(0xFFFFFFFF))
            if heap_size >= heap_cap:
                heap_cap *= 2
                heap_key = np.concatenate((heap_key, np.empty(heap_size, np.uint64)))
                heap_node = np.concatenate((heap_node, np.empty(heap_size, np.int32)))
            heap_key[heap_size] = nkey
            heap_node[heap_size] = node
            i = heap_size
            heap_size += 1
            while i > 0:
                parent = (i - 1) >> 1
                if heap_key[parent] <= heap_key[i]:
                    break
                heap_key[parent], heap_key[i] = heap_key[i], heap_key[parent]
                heap_node[parent], heap_node[i] = heap_node[i], heap_node[parent]
                i = parent

    return STATUS_UNSOLVABLE, np.int64(-1), np.empty(0, np.int32), expansions, samples[:n_samples]
