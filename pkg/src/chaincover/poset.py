"""Finite partially ordered sets with deterministic enumeration.

Posets are stored as a full boolean order matrix plus per-element bitmasks,
which keeps comparability O(1) and makes chain enumeration cheap at the sizes
this package targets. Element indices are assigned along a linear extension
of the order, so ascending-index members of a chain are automatically in
ascending poset order and every enumeration stream has one canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

import numpy as np

# Labeled-poset enumeration scans 3^(n(n-1)/2) candidate relations.
POSET_ENUM_BOUND = 5

# Chain enumeration scans 2^n subset masks.
MASK_ENUM_BOUND = 20


class DuplicateLabel(ValueError):
    """A label occurs more than once in a poset definition."""


class UnknownLabel(ValueError):
    """An order pair references a label that was never declared."""


class AntisymmetryViolation(ValueError):
    """The transitive closure of the declared pairs contains a cycle."""


class IndexOutOfRange(IndexError):
    """An element index does not belong to the poset."""


class EmptyPoset(ValueError):
    """The operation needs a poset with at least one element."""


class BoundExceeded(ValueError):
    """A requested enumeration is larger than the configured size bound."""


class Poset:
    """Immutable finite partial order over labeled elements.

    ``leq[i, j]`` is True iff element i is below or equal to element j.
    Construction normalizes the element order to a linear extension
    (smaller strict down-sets first, stable), so ``i < j`` as integers never
    contradicts the partial order.
    """

    __slots__ = ("labels", "n", "leq", "up_masks", "down_masks", "comp_masks", "_index")

    def __init__(self, labels: tuple[str, ...], leq: np.ndarray):
        # Internal constructor: `leq` must already be a valid, normalized
        # order matrix. Use make_poset / from_leq_matrix instead.
        self.labels = labels
        self.n = len(labels)
        leq = leq.astype(bool)
        leq.setflags(write=False)
        self.leq = leq
        up = []
        down = []
        for i in range(self.n):
            u = 0
            d = 0
            for j in range(self.n):
                if leq[i, j]:
                    u |= 1 << j
                if leq[j, i]:
                    d |= 1 << j
            up.append(u)
            down.append(d)
        self.up_masks = tuple(up)
        self.down_masks = tuple(down)
        self.comp_masks = tuple(u | d for u, d in zip(up, down))
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def from_leq_matrix(cls, labels: list[str] | tuple[str, ...], leq: np.ndarray) -> "Poset":
        """Validate an order matrix, normalize the index order, build a Poset."""
        labels = tuple(labels)
        n = len(labels)
        if len(set(labels)) != n:
            seen = set()
            for lab in labels:
                if lab in seen:
                    raise DuplicateLabel(f"label {lab!r} declared twice")
                seen.add(lab)
        leq = np.asarray(leq, dtype=bool)
        if leq.shape != (n, n):
            raise ValueError(f"order matrix must be {n}x{n}")
        if not np.all(np.diagonal(leq)):
            raise ValueError("order relation must be reflexive")
        sym = leq & leq.T
        np.fill_diagonal(sym, False)
        if sym.any():
            i, j = np.argwhere(sym)[0]
            raise AntisymmetryViolation(
                f"elements {labels[i]!r} and {labels[j]!r} lie on a cycle"
            )
        if ((leq @ leq) & ~leq).any():
            raise ValueError("order relation must be transitive")
        # Lexicographically least linear extension: repeatedly take the
        # smallest original index among the still-unplaced minimal elements.
        # Keeps incomparable elements in declaration order.
        remaining = list(range(n))
        order = []
        while remaining:
            i = next(
                i for i in remaining if not any(leq[j, i] and j != i for j in remaining)
            )
            order.append(i)
            remaining.remove(i)
        labels = tuple(labels[i] for i in order)
        leq = leq[np.ix_(order, order)]
        return cls(labels, leq)

    def index(self, label: str) -> int:
        """Index of the element carrying `label`."""
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"no element labeled {label!r}") from None

    def check_index(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"index {i} not in 0..{self.n - 1}")
        return i

    def less(self, i: int, j: int) -> bool:
        """Strict order test."""
        return i != j and bool(self.leq[i, j])

    def up_array(self) -> np.ndarray:
        """Up-set bitmasks as an int64 array (kernel-side encoding)."""
        return np.array(self.up_masks, dtype=np.int64)

    def order_pairs(self) -> list[tuple[int, int]]:
        """All strict pairs (i, j) with i < j in the order."""
        return [
            (i, j)
            for i in range(self.n)
            for j in range(self.n)
            if i != j and self.leq[i, j]
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash((self.labels, self.leq.tobytes()))

    def __repr__(self) -> str:
        rel = ",".join(f"{self.labels[i]}<{self.labels[j]}" for i, j in covering_pairs(self))
        return f"Poset({list(self.labels)!r}, [{rel}])"


@dataclass(frozen=True)
class ChainRecord:
    """A chain: members pairwise comparable, listed in ascending order."""

    poset: Poset
    members: tuple[int, ...]

    def __post_init__(self):
        prev = None
        for i in self.members:
            self.poset.check_index(i)
            if prev is not None and not self.poset.less(prev, i):
                raise ValueError(f"members {self.members} are not strictly ascending")
            prev = i

    @property
    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m

    def member_labels(self) -> tuple[str, ...]:
        return tuple(self.poset.labels[i] for i in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class Cut:
    """A split of a chain into an initial segment and the rest."""

    chain: ChainRecord
    split: int  # 0 <= split <= len(chain)

    def __post_init__(self):
        if not 0 <= self.split <= len(self.chain):
            raise ValueError(f"split {self.split} out of range for {self.chain}")

    @property
    def left(self) -> tuple[int, ...]:
        return self.chain.members[: self.split]

    @property
    def right(self) -> tuple[int, ...]:
        return self.chain.members[self.split :]

    @property
    def proper(self) -> bool:
        return 0 < self.split < len(self.chain)


def make_poset(labels: list[str], pairs: list[tuple[str, str]]) -> Poset:
    """Build the poset generated by `pairs` as order assertions.

    The relation is the reflexive-transitive closure of the pairs; a cycle
    through distinct elements raises AntisymmetryViolation.
    """
    labels = list(labels)
    n = len(labels)
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"label {lab!r} declared twice")
        seen.add(lab)
    index = {lab: i for i, lab in enumerate(labels)}
    rel = np.eye(n, dtype=bool)
    for a, b in pairs:
        if a not in index:
            raise UnknownLabel(f"no element labeled {a!r}")
        if b not in index:
            raise UnknownLabel(f"no element labeled {b!r}")
        rel[index[a], index[b]] = True
    while True:
        closed = rel | (rel @ rel)
        if np.array_equal(closed, rel):
            break
        rel = closed
    return Poset.from_leq_matrix(labels, rel)


def covering_pairs(p: Poset) -> list[tuple[int, int]]:
    """Transitive reduction: pairs (x, y) with x < y and nothing in between."""
    lt = p.leq & ~np.eye(p.n, dtype=bool)
    covers = lt & ~(lt @ lt)
    return [(int(i), int(j)) for i, j in np.argwhere(covers)]


def is_chain(p: Poset, subset) -> bool:
    """True iff the given element indices are pairwise comparable."""
    mask = 0
    for i in subset:
        p.check_index(i)
        mask |= 1 << i
    return _is_chain_mask(p.comp_masks, mask)


def _is_chain_mask(comp_masks, mask: int) -> bool:
    m = mask
    while m:
        i = (m & -m).bit_length() - 1
        if mask & ~comp_masks[i]:
            return False
        m &= m - 1
    return True


def chain_from_mask(p: Poset, mask: int) -> ChainRecord:
    """ChainRecord for a membership bitmask (indices ascend with the order)."""
    members = tuple(i for i in range(p.n) if mask >> i & 1)
    return ChainRecord(p, members)


def enumerate_chains(p: Poset, include_empty: bool):
    """Yield every chain exactly once, in ascending-bitmask order."""
    if p.n > MASK_ENUM_BOUND:
        raise BoundExceeded(f"chain enumeration supports at most {MASK_ENUM_BOUND} elements")
    for mask in range(1 << p.n):
        if mask == 0 and not include_empty:
            continue
        if _is_chain_mask(p.comp_masks, mask):
            yield chain_from_mask(p, mask)


def maximal_chains(p: Poset) -> list[ChainRecord]:
    """All maximal chains, by depth-first descent from minimal elements.

    A maximal chain steps from each member to a minimal element of its
    strict up-set, so the search is linear in the output.
    """
    if p.n == 0:
        raise EmptyPoset("maximal chains need a nonempty poset")
    out: list[ChainRecord] = []
    full = (1 << p.n) - 1

    def descend(prefix: list[int], universe: int):
        # universe: elements strictly above prefix[-1] (all, at the root)
        minimal = [
            i
            for i in range(p.n)
            if universe >> i & 1 and p.down_masks[i] & universe == 1 << i
        ]
        if not minimal:
            out.append(ChainRecord(p, tuple(prefix)))
            return
        for i in minimal:
            descend(prefix + [i], universe & p.up_masks[i] & ~(1 << i))

    descend([], full)
    return out


def cuts_of(chain: ChainRecord, proper_only: bool) -> list[Cut]:
    """All cuts of the chain; proper cuts leave both sides nonempty."""
    k = len(chain)
    lo, hi = (1, k) if proper_only else (0, k + 1)
    return [Cut(chain, split) for split in range(lo, hi)]


@lru_cache(maxsize=None)
def _strict_order_masks(n: int) -> tuple[tuple[int, ...], ...]:
    """Every strict partial order on 0..n-1, as per-element strict-up masks.

    Each unordered pair independently takes one of three states (incomparable,
    i<j, j<i), which enumerates exactly the antisymmetric relations; a
    transitivity filter keeps the partial orders. Lexicographic over the
    state vectors, so the all-incomparable antichain comes first.
    """
    pair_list = [(i, j) for i in range(n) for j in range(i + 1, n)]
    orders = []
    for states in product((0, 1, 2), repeat=len(pair_list)):
        rows = [0] * n
        for (i, j), st in zip(pair_list, states):
            if st == 1:
                rows[i] |= 1 << j
            elif st == 2:
                rows[j] |= 1 << i
        ok = True
        for i in range(n):
            m = rows[i]
            rest = m
            while rest:
                j = (rest & -rest).bit_length() - 1
                if rows[j] & ~m:
                    ok = False
                    break
                rest &= rest - 1
            if not ok:
                break
        if ok:
            orders.append(tuple(rows))
    return tuple(orders)


def _canonical_encoding(rows: tuple[int, ...]) -> tuple[int, ...]:
    n = len(rows)
    best = None
    for perm in permutations(range(n)):
        img = [0] * n
        for i in range(n):
            m = rows[i]
            v = 0
            while m:
                j = (m & -m).bit_length() - 1
                v |= 1 << perm[j]
                m &= m - 1
            img[perm[i]] = v
        enc = tuple(img)
        if best is None or enc < best:
            best = enc
    return best


def _poset_from_strict_rows(rows: tuple[int, ...]) -> Poset:
    n = len(rows)
    leq = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if rows[i] >> j & 1:
                leq[i, j] = True
    labels = [f"e{i}" for i in range(n)]
    return Poset.from_leq_matrix(labels, leq)


def enumerate_posets(n: int, dedup: bool = False, bound: int = POSET_ENUM_BOUND):
    """Yield every labeled partial order on n elements exactly once.

    With dedup=True only one representative per isomorphism class is kept
    (the lexicographically least relabeling), an optional space reduction
    that is off by default.
    """
    if not 0 <= n <= bound:
        raise BoundExceeded(f"poset enumeration bound is {bound}, got n={n}")
    for rows in _strict_order_masks(n):
        if dedup and _canonical_encoding(rows) != rows:
            continue
        yield _poset_from_strict_rows(rows)


def random_poset(n: int, seed: int) -> Poset:
    """Random DAG under a random relabeling, transitively closed."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    adj = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                adj[perm[i], perm[j]] = True
    while True:
        closed = adj | (adj @ adj)
        if np.array_equal(closed, adj):
            break
        adj = closed
    return Poset.from_leq_matrix([f"e{i}" for i in range(n)], adj)


def check_order_axioms(p: Poset) -> bool:
    """Reflexivity, antisymmetry and transitivity over all index triples."""
    leq = p.leq
    for x in range(p.n):
        if not leq[x, x]:
            return False
        for y in range(p.n):
            if x != y and leq[x, y] and leq[y, x]:
                return False
            for z in range(p.n):
                if leq[x, y] and leq[y, z] and not leq[x, z]:
                    return False
    return True


def height(p: Poset) -> int:
    """Size of the longest chain (0 for the empty poset)."""
    best = [0] * p.n
    for i in range(p.n):  # index order is a linear extension
        below = [best[j] for j in range(i) if p.leq[j, i] and j != i]
        best[i] = 1 + max(below, default=0)
    return max(best, default=0)
