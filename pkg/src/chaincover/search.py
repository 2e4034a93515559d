"""Witness search over the instance space, with greedy shrinking.

A witness is an instance meeting a set of property flags together with a
violation goal. The search scans nonempty poset pairs in the same canonical
order as the exhaustive sweeps; adjoined-TOP assignments enter the space
only when the flags ask for a non-unitary map, so degenerate all-TOP
instances cannot shadow structural witnesses.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .poset import (
    POSET_ENUM_BOUND,
    BoundExceeded,
    Poset,
    _strict_order_masks,
    enumerate_chains,
)
from .specmap import (
    TOP,
    NotMonotone,
    SpectralMap,
    _iter_assignment_vectors,
    check_LO,
    check_property,
    is_unitary,
    make_spectral_map,
    maximal_D_chains,
)
from .theorems import instance_from_raw

_FLAG_BITS = {
    "LO": K.PROP_LO,
    "INC": K.PROP_INC,
    "GU": K.PROP_GU,
    "GD": K.PROP_GD,
    "SGB": K.PROP_SGB,
    "GB": K.PROP_GB,
    "UNITARY": K.PROP_UNITARY,
}

GOALS = {
    "lo-fails": K.GOAL_LO_FAILS,
    "maximal-dchain-not-cover": K.GOAL_MAXDCHAIN_NOT_COVER,
    "maximal-dchain-not-perfect-cover": K.GOAL_MAXDCHAIN_NOT_PERFECT,
}


@dataclass(frozen=True)
class WitnessSearchSpec:
    """What to search for.

    required: property flags the witness must satisfy, e.g. "GU" or "!LO".
    goal: name of the violation predicate from GOALS.
    d_size: restrict the goal to chains D of this size (chain goals only).
    seed: recorded in reports; the scan itself is exhaustive and ordered.
    """

    required: frozenset
    goal: str
    max_s: int
    max_r: int
    d_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "required", frozenset(self.required))
        for flag in self.required:
            if flag.lstrip("!") not in _FLAG_BITS:
                raise ValueError(f"unknown property flag {flag!r}")
        if self.goal not in GOALS:
            raise ValueError(f"unknown goal {self.goal!r}")
        if self.max_s < 1 or self.max_r < 1:
            raise ValueError("search bounds must be at least 1")
        if self.d_size is not None and self.d_size < 1:
            raise ValueError("d_size must be at least 1")


def _flag_masks(required) -> tuple[int, int]:
    need = 0
    forbid = 0
    for flag in required:
        if flag.startswith("!"):
            forbid |= _FLAG_BITS[flag[1:]]
        else:
            need |= _FLAG_BITS[flag]
    return need, forbid


def flags_hold(m: SpectralMap, required) -> bool:
    for flag in required:
        neg = flag.startswith("!")
        name = flag.lstrip("!")
        value = is_unitary(m) if name == "UNITARY" else check_property(m, name)
        if value == neg:
            return False
    return True


def goal_holds(m: SpectralMap, goal: str, d_size: int | None = None) -> bool:
    """Object-level mirror of the kernel goal predicates."""
    if goal == "lo-fails":
        return not check_LO(m)
    if goal not in GOALS:
        raise ValueError(f"unknown goal {goal!r}")
    for d in enumerate_chains(m.s_poset, include_empty=False):
        if d_size is not None and len(d) != d_size:
            continue
        dset = set(d.members)
        for c in maximal_D_chains(m, d):
            img = {m.assignment[q] for q in c.members}
            if goal == "maximal-dchain-not-cover" and img != dset:
                return True
            if goal == "maximal-dchain-not-perfect-cover" and (
                img != dset or len(c) != len(d)
            ):
                return True
    return False


def _rows_height(rows) -> int:
    n = len(rows)
    best = [0] * n
    for _ in range(n):
        for i in range(n):
            longest = 0
            m = rows[i]
            while m:
                j = (m & -m).bit_length() - 1
                if best[j] > longest:
                    longest = best[j]
                m &= m - 1
            best[i] = 1 + longest
    return max(best, default=0)


def _raw_up(rows) -> np.ndarray:
    return np.array([row | (1 << i) for i, row in enumerate(rows)], dtype=np.int64)


def _search_chunk(args):
    need, forbid, goal_id, goal_size, allow_top, chunk = args
    hits = []
    for pair_idx, s_rows, r_rows in chunk:
        _, hit = K.search_pair(
            len(s_rows),
            _raw_up(s_rows),
            len(r_rows),
            _raw_up(r_rows),
            allow_top,
            need,
            forbid,
            goal_id,
            goal_size,
        )
        if hit >= 0:
            hits.append((pair_idx, int(hit)))
    return hits


def search_witness(
    spec: WitnessSearchSpec,
    jobs: int = 1,
    size_bound: int = POSET_ENUM_BOUND,
    do_shrink: bool = True,
) -> SpectralMap | None:
    """First instance meeting the flags and the goal, shrunk, or None.

    The scan covers every monotone map between nonempty posets within the
    bounds, in canonical order, so the outcome is deterministic and does not
    depend on the worker count.
    """
    if spec.max_s > size_bound or spec.max_r > size_bound:
        raise BoundExceeded(
            f"search bounds must lie in 1..{size_bound}, got ({spec.max_s}, {spec.max_r})"
        )
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    need, forbid = _flag_masks(spec.required)
    goal_id = GOALS[spec.goal]
    goal_size = spec.d_size or 0
    allow_top = "!UNITARY" in spec.required

    s_list = [rows for n in range(1, spec.max_s + 1) for rows in _strict_order_masks(n)]
    r_list = [rows for n in range(1, spec.max_r + 1) for rows in _strict_order_masks(n)]
    pairs = []
    idx = 0
    for s_rows in s_list:
        # a chain-goal witness needs a chain of d_size in s
        prunable = goal_id != K.GOAL_LO_FAILS and goal_size > 0
        if prunable and _rows_height(s_rows) < goal_size:
            idx += len(r_list)
            continue
        for r_rows in r_list:
            pairs.append((idx, s_rows, r_rows))
            idx += 1

    if jobs == 1 or len(pairs) < 2 * jobs:
        hits = _search_chunk((need, forbid, goal_id, goal_size, allow_top, pairs))
    else:
        chunks = [pairs[k::jobs] for k in range(jobs)]
        payloads = [
            (need, forbid, goal_id, goal_size, allow_top, chunk)
            for chunk in chunks
            if chunk
        ]
        ctx = mp.get_context("fork")
        with ctx.Pool(len(payloads)) as pool:
            parts = pool.map(_search_chunk, payloads)
        hits = [h for part in parts for h in part]

    if not hits:
        return None
    pair_idx, map_idx = min(hits)
    by_idx = {i: (s, r) for i, s, r in pairs}
    s_rows, r_rows = by_idx[pair_idx]
    vec = None
    for k, candidate in enumerate(
        _iter_assignment_vectors(
            len(s_rows),
            tuple(int(x) for x in _raw_up(s_rows)),
            len(r_rows),
            tuple(int(x) for x in _raw_up(r_rows)),
            allow_top,
        )
    ):
        if k == map_idx:
            vec = candidate
            break
    witness = instance_from_raw(s_rows, r_rows, vec)

    def predicate(m: SpectralMap) -> bool:
        return flags_hold(m, spec.required) and goal_holds(m, spec.goal, spec.d_size)

    if not predicate(witness):
        raise AssertionError("kernel search hit does not replay on the object level")
    if do_shrink:
        witness = shrink(witness, predicate)
    return witness


def _drop_r_element(m: SpectralMap, q: int) -> SpectralMap:
    r = m.r_poset
    keep = [i for i in range(r.n) if i != q]
    new_r = Poset.from_leq_matrix(
        [r.labels[i] for i in keep], r.leq[np.ix_(keep, keep)]
    )
    assignment: list = [None] * new_r.n
    for old in keep:
        assignment[new_r.index(r.labels[old])] = m.assignment[old]
    return make_spectral_map(m.s_poset, new_r, assignment)


def _drop_s_element(m: SpectralMap, p: int) -> SpectralMap:
    s = m.s_poset
    keep = [i for i in range(s.n) if i != p]
    new_s = Poset.from_leq_matrix(
        [s.labels[i] for i in keep], s.leq[np.ix_(keep, keep)]
    )
    trans = {old: new_s.index(s.labels[old]) for old in keep}
    assignment = tuple(v if v is TOP else trans[v] for v in m.assignment)
    return make_spectral_map(new_s, m.r_poset, assignment)


def _drop_pair(p: Poset, i: int, j: int) -> Poset:
    # removing a covering pair keeps transitivity: any two-step path through
    # a third element would disqualify (i, j) as a cover
    leq = np.array(p.leq)
    leq[i, j] = False
    return Poset.from_leq_matrix(p.labels, leq)


def _drop_r_pair(m: SpectralMap, i: int, j: int) -> SpectralMap:
    new_r = _drop_pair(m.r_poset, i, j)
    assignment: list = [None] * new_r.n
    for old in range(m.r_poset.n):
        assignment[new_r.index(m.r_poset.labels[old])] = m.assignment[old]
    return make_spectral_map(m.s_poset, new_r, assignment)


def _drop_s_pair(m: SpectralMap, i: int, j: int) -> SpectralMap:
    new_s = _drop_pair(m.s_poset, i, j)
    trans = {old: new_s.index(m.s_poset.labels[old]) for old in range(m.s_poset.n)}
    assignment = tuple(v if v is TOP else trans[v] for v in m.assignment)
    return make_spectral_map(new_s, m.r_poset, assignment)


def _shrink_candidates(m: SpectralMap):
    from .poset import covering_pairs

    if m.r_poset.n > 1:
        for q in range(m.r_poset.n):
            yield lambda q=q: _drop_r_element(m, q)
    if m.s_poset.n > 1:
        used = {v for v in m.assignment if v is not TOP}
        for p in range(m.s_poset.n):
            if p not in used:
                yield lambda p=p: _drop_s_element(m, p)
    for i, j in covering_pairs(m.r_poset):
        yield lambda i=i, j=j: _drop_r_pair(m, i, j)
    for i, j in covering_pairs(m.s_poset):
        yield lambda i=i, j=j: _drop_s_pair(m, i, j)


def shrink(m: SpectralMap, violation) -> SpectralMap:
    """Greedily reduce an instance while the violation predicate holds.

    Tries, in order: dropping an r element, dropping an uncontracted s
    element, removing a covering pair from r, removing one from s. Each
    accepted step restarts the scan, and posets never shrink to empty, so
    the result is a local minimum within the search space: no single step
    reduces it further.
    """
    if not violation(m):
        raise ValueError("shrink needs an instance on which the violation holds")
    changed = True
    while changed:
        changed = False
        for build in _shrink_candidates(m):
            try:
                candidate = build()
            except NotMonotone:
                continue
            if violation(candidate):
                m = candidate
                changed = True
                break
    return m
