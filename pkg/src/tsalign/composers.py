"""Composers: select a conflict-free, model-consistent subset of the candidates.

Four strategies share one contract: maximize the summed tuple weight over
pairwise non-conflicting candidates, subject to the model-consistency bound.

* ``compose_exact`` enumerates conflict-free subsets (guarded at 24
  candidates) and is the optimality oracle for the others.
* ``compose_setpacking`` runs ratio-improving local search over replacement
  sets of at most m tuples, branching on ties.
* ``compose_greedy`` emits the heaviest member of each maximal run of
  mutually conflicting candidates.
* ``compose_expectation`` does the same but credits each group member with
  the weight of later compatible candidates it would keep available.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass

import numpy as np

from .candidate import CandidateSet
from .consistency import ConsistencyReport, delta_report
from .core import AlignedTuple, ConstraintConfig, SeriesTable, WeightParams, batch_weights
from .errors import SizeError

EXACT_GUARD = 24
BRANCH_CAP = 64
DEFAULT_MAX_RETRIES = 16


@dataclass(frozen=True)
class Alignment:
    """A pairwise non-conflicting tuple set with its score and consistency report."""

    tuples: tuple[AlignedTuple, ...]
    total_weight: float
    report: ConsistencyReport
    strategy: str
    retries_used: int = 0
    exhausted: bool = False
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.tuples)


def _weights(rc: CandidateSet, t: SeriesTable, w: WeightParams) -> list[float]:
    slot_rows = np.array([r.slots for r in rc.tuples], dtype=np.intp).reshape(len(rc), t.m)
    return batch_weights(t, slot_rows, w).tolist()


def _conflict_masks(rc: CandidateSet) -> list[int]:
    """Bitmask per candidate of the candidates it conflicts with (self included)."""
    k = len(rc)
    by_cell: dict[tuple[int, int], list[int]] = {}
    for i, r in enumerate(rc.tuples):
        for series, row in enumerate(r.slots):
            by_cell.setdefault((series, row), []).append(i)
    masks = [0] * k
    for indices in by_cell.values():
        cell_mask = 0
        for i in indices:
            cell_mask |= 1 << i
        for i in indices:
            masks[i] |= cell_mask
    return masks


def _finish(indices, rc, t, weights, strategy, retries_used=0, exhausted=False,
            truncated=False, report=None) -> Alignment:
    chosen = sorted(rc.tuples[i] for i in indices)
    if report is None:
        report = delta_report(chosen, t)
    total = float(sum(weights[i] for i in sorted(indices)))
    return Alignment(tuple(chosen), total, report, strategy,
                     retries_used=retries_used, exhausted=exhausted, truncated=truncated)


def compose_exact(rc: CandidateSet, cfg: ConstraintConfig, t: SeriesTable,
                  w: WeightParams) -> Alignment:
    """Maximum-weight conflict-free subset satisfying the model constraint.

    Ties are broken toward the lexicographically smallest sorted tuple list.
    Raises SizeError beyond 24 candidates; use an approximation there.
    """
    k = len(rc)
    if k > EXACT_GUARD:
        raise SizeError(f"|R_c| = {k} > {EXACT_GUARD}: exact enumeration refused, "
                        "use setpacking/greedy/expectation")
    weights = _weights(rc, t, w)
    conflict = _conflict_masks(rc)
    check_delta = math.isfinite(cfg.delta)

    best_w = 0.0
    best_sel: tuple[int, ...] = ()
    best_key = ()
    empty_report = delta_report([], t)
    best_report = empty_report

    suffix = [0.0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]

    def visit(selection: tuple[int, ...], total: float) -> None:
        nonlocal best_w, best_sel, best_key, best_report
        if total < best_w:
            return
        report = None
        if check_delta:
            report = delta_report([rc.tuples[i] for i in selection], t)
            if report.delta > cfg.delta:
                return
        key = tuple(sorted(rc.tuples[i].slots for i in selection))
        if total > best_w or key < best_key:
            best_w, best_sel, best_key = total, selection, key
            best_report = report

    visit((), 0.0)

    def search(start: int, avail: int, selection: tuple[int, ...], total: float) -> None:
        if not check_delta and total + suffix[start] < best_w:
            return
        for i in range(start, k):
            if not (avail >> i) & 1:
                continue
            sub = selection + (i,)
            visit(sub, total + weights[i])
            search(i + 1, avail & ~conflict[i], sub, total + weights[i])

    search(0, (1 << k) - 1, (), 0.0)
    return _finish(best_sel, rc, t, weights, "exact", report=best_report)


def _group_pass(rc: CandidateSet, weights: list[float], rng: random.Random,
                score_fn=None) -> list[int]:
    """One grouped selection scan; returns the chosen candidate indices.

    A group grows while every new candidate conflicts with all current
    members; when that breaks, the argmax (by ``score_fn`` or plain weight)
    is emitted and the breaking candidate starts the next group unless it
    now conflicts with the partial result.  The trailing group is flushed,
    otherwise its members would be dropped silently.
    """
    m = len(rc.tuples[0].slots) if len(rc) else 0
    used: list[set[int]] = [set() for _ in range(m)]
    chosen: list[int] = []
    group: list[int] = []

    def emit() -> None:
        if score_fn is None:
            scores = [weights[g] for g in group]
        else:
            scores = [score_fn(g, group) for g in group]
        top = max(scores)
        tied = [g for g, s in zip(group, scores) if s == top]
        pick = tied[0] if len(tied) == 1 else rng.choice(tied)
        chosen.append(pick)
        for series, row in enumerate(rc.tuples[pick].slots):
            used[series].add(row)

    for i, r in enumerate(rc.tuples):
        if any(row in used[series] for series, row in enumerate(r.slots)):
            continue
        if not group or all(_share_slot(r, rc.tuples[g]) for g in group):
            group.append(i)
            continue
        emit()
        group = []
        if not any(row in used[series] for series, row in enumerate(r.slots)):
            group = [i]
    if group:
        emit()
    return chosen


def _share_slot(r1: AlignedTuple, r2: AlignedTuple) -> bool:
    return any(a == b for a, b in zip(r1.slots, r2.slots))


def _retry_compose(rc, cfg, t, w, seed, max_retries, strategy, score_factory):
    weights = _weights(rc, t, w)
    attempts = max(1, max_retries)
    best = None
    for attempt in range(attempts):
        rng = random.Random(seed + attempt)
        score_fn = score_factory(weights) if score_factory is not None else None
        chosen = _group_pass(rc, weights, rng, score_fn)
        report = delta_report([rc.tuples[i] for i in chosen], t)
        alignment = _finish(chosen, rc, t, weights, strategy,
                            retries_used=attempt, report=report)
        if report.delta <= cfg.delta:
            return alignment
        if best is None or report.delta < best.report.delta:
            best = alignment
    return Alignment(best.tuples, best.total_weight, best.report, strategy,
                     retries_used=attempts - 1, exhausted=True)


def compose_greedy(rc: CandidateSet, cfg: ConstraintConfig, t: SeriesTable,
                   w: WeightParams, seed: int = 0,
                   max_retries: int = DEFAULT_MAX_RETRIES) -> Alignment:
    """Group scan emitting each group's max-weight member; ties picked by seeded RNG.

    If the scan's result violates the model constraint the pass is retried
    with seed + 1, seed + 2, ... up to ``max_retries`` attempts; the best
    attempt is returned with ``exhausted`` set when all fail.
    """
    return _retry_compose(rc, cfg, t, w, seed, max_retries, "greedy", None)


def compose_expectation(rc: CandidateSet, cfg: ConstraintConfig, t: SeriesTable,
                        w: WeightParams, seed: int = 0,
                        max_retries: int = DEFAULT_MAX_RETRIES,
                        use_pruning: bool = True) -> Alignment:
    """Group scan scoring each member by its weight plus a forward-looking bonus.

    The bonus of group member g sums the weights of later candidates that do
    not conflict with g but conflict with at least one other group member,
    i.e. the weight g keeps available by being chosen.  With pruning the scan
    stops once a candidate's slots all exceed the group's row window
    (max slot + beta), which provably cannot conflict with the group; the
    unpruned variant scans the whole candidate list and must select
    identically.
    """
    beta = cfg.beta
    tuples = rc.tuples
    k = len(tuples)

    def score_factory(weights):
        def score(g_idx: int, group: list[int]) -> float:
            limit = max(s for j in group for s in tuples[j].slots) + beta
            g = tuples[g_idx]
            members = [tuples[j] for j in group]
            bonus = 0.0
            for i in range(g_idx + 1, k):
                r = tuples[i]
                if use_pruning:
                    if r.slots[0] > limit:
                        break
                    if any(s > limit for s in r.slots):
                        continue
                if _share_slot(r, g):
                    continue
                if any(_share_slot(r, mem) for mem in members):
                    bonus += weights[i]
            return weights[g_idx] + bonus

        return score

    return _retry_compose(rc, cfg, t, w, seed, max_retries, "expectation", score_factory)


def compose_setpacking(rc: CandidateSet, cfg: ConstraintConfig, t: SeriesTable,
                       w: WeightParams) -> Alignment:
    """Local search in the weighted set-packing neighborhood.

    Starts from the greedy scan-order packing, then repeatedly swaps in the
    replacement set Q (|Q| <= m, pairwise non-conflicting, every member
    conflicting with a pivot) that maximizes gained/lost weight, whenever the
    swap increases the total.  Equal-ratio maximizers branch (breadth-first,
    capped); the best terminal branch satisfying the model constraint wins.
    """
    k = len(rc)
    weights = _weights(rc, t, w)
    m = t.m
    tuples = rc.tuples
    conflict = _conflict_masks(rc)

    def complete(state: int) -> int:
        for i in range(k):
            if not (state >> i) & 1 and not conflict[i] & state:
                state |= 1 << i
        return state

    def bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def improving_swaps(state: int) -> list[int]:
        """Successor states of the best-ratio improving swaps, lexicographic order."""
        best_ratio = None
        results: list[int] = []
        for x in bits(state):
            pool = list(bits(conflict[x] & ~state))
            for size in range(1, m + 1):
                for combo in itertools.combinations(pool, size):
                    ok = True
                    for a in range(size):
                        for b in range(a + 1, size):
                            if conflict[combo[a]] >> combo[b] & 1:
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        continue
                    q_mask = 0
                    for q in combo:
                        q_mask |= 1 << q
                    hit = 0
                    for q in combo:
                        hit |= conflict[q] & state
                    gain = sum(weights[q] for q in combo)
                    loss = sum(weights[i] for i in bits(hit))
                    if gain <= loss:
                        continue
                    ratio = gain / loss
                    if best_ratio is None or ratio > best_ratio:
                        best_ratio = ratio
                        results = [complete((state & ~hit) | q_mask)]
                    elif ratio == best_ratio:
                        results.append(complete((state & ~hit) | q_mask))
        return results

    init = complete(0)
    visited = {init}
    queue = deque([init])
    finished: list[int] = []
    truncated = False
    while queue:
        state = queue.popleft()
        successors = improving_swaps(state)
        if not successors:
            finished.append(state)
            continue
        expanded = False
        for child in successors:
            if child in visited:
                continue
            if len(visited) >= BRANCH_CAP:
                truncated = True
                break
            visited.add(child)
            queue.append(child)
            expanded = True
        if not expanded:
            finished.append(state)

    def evaluate(state: int):
        sel = list(bits(state))
        ordered = sorted(tuples[i] for i in sel)
        report = delta_report(ordered, t)
        total = sum(weights[i] for i in sel)
        return total, report, sel

    best = None
    fallback = None
    for state in finished:
        total, report, sel = evaluate(state)
        key = tuple(sorted(tuples[i].slots for i in sel))
        if report.delta <= cfg.delta:
            if best is None or total > best[0] or (total == best[0] and key < best[3]):
                best = (total, report, sel, key)
        if fallback is None or report.delta < fallback[1].delta:
            fallback = (total, report, sel, key)
    if best is not None:
        total, report, sel, _ = best
        return _finish(sel, rc, t, weights, "setpacking",
                       truncated=truncated, report=report)
    total, report, sel, _ = fallback
    alignment = _finish(sel, rc, t, weights, "setpacking",
                        truncated=truncated, report=report)
    return Alignment(alignment.tuples, alignment.total_weight, alignment.report,
                     "setpacking", exhausted=True, truncated=truncated)
