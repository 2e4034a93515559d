"""Spectral maps: monotone contractions between finite posets.

A spectral map sends each element of the source poset r either to an
element of the target poset s or to TOP, a formal greatest element adjoined
above s. Monotonicity is with respect to that extended order. The chain
covering properties checked here quantify over D-chains: chains in r whose
members all contract into a prescribed chain D in s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .poset import ChainRecord, IndexOutOfRange, Poset, chain_from_mask


class _Top:
    """Sentinel for the formal greatest element over the target poset."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"


TOP = _Top()


class LengthMismatch(ValueError):
    """The assignment length differs from the source poset size."""


class NotMonotone(ValueError):
    """The assignment violates monotonicity; carries the witnessing pair."""

    def __init__(self, msg: str, q1: int, q2: int):
        super().__init__(msg)
        self.q1 = q1
        self.q2 = q2


class NotADChain(ValueError):
    """A chain argument is not a D-chain for the given D."""


@dataclass(frozen=True)
class SpectralMap:
    """Monotone map from r_poset into s_poset extended by TOP."""

    s_poset: Poset
    r_poset: Poset
    assignment: tuple  # one entry per r element: an s index or TOP

    def contraction(self, q: int):
        self.r_poset.check_index(q)
        return self.assignment[q]

    def cmap_array(self) -> np.ndarray:
        # kernel encoding: TOP becomes the sentinel index ns
        ns = self.s_poset.n
        return np.array(
            [ns if v is TOP else v for v in self.assignment], dtype=np.int64
        )

    def describe(self) -> str:
        parts = []
        for q, v in enumerate(self.assignment):
            tgt = "TOP" if v is TOP else self.s_poset.labels[v]
            parts.append(f"{self.r_poset.labels[q]}->{tgt}")
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class ImageChain:
    """Contraction image of a chain: a chain in s, possibly ending at TOP."""

    poset: Poset  # the target poset s
    members: tuple[int, ...]
    has_top: bool

    def __len__(self) -> int:
        return len(self.members) + (1 if self.has_top else 0)

    def values(self) -> tuple:
        return self.members + ((TOP,) if self.has_top else ())


def _ext_leq(s: Poset, a, b) -> bool:
    if b is TOP:
        return True
    if a is TOP:
        return False
    return bool(s.leq[a, b])


def make_spectral_map(s: Poset, r: Poset, assignment) -> SpectralMap:
    """Validate an assignment and build a SpectralMap.

    Raises LengthMismatch when the assignment does not have one value per
    r element, IndexOutOfRange on a bad target index, and NotMonotone with
    the witnessing pair when some q1 <= q2 maps to unrelated values.
    """
    assignment = tuple(assignment)
    if len(assignment) != r.n:
        raise LengthMismatch(
            f"assignment has {len(assignment)} entries for {r.n} elements"
        )
    for v in assignment:
        if v is not TOP:
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < s.n:
                raise IndexOutOfRange(f"assignment value {v!r} is not an s index or TOP")
    assignment = tuple(v if v is TOP else int(v) for v in assignment)
    for q1 in range(r.n):
        for q2 in range(r.n):
            if q1 != q2 and r.leq[q1, q2]:
                if not _ext_leq(s, assignment[q1], assignment[q2]):
                    raise NotMonotone(
                        f"{r.labels[q1]} <= {r.labels[q2]} but images are unrelated",
                        q1,
                        q2,
                    )
    return SpectralMap(s, r, assignment)


def is_unitary(m: SpectralMap) -> bool:
    """True iff no element contracts to TOP."""
    return all(v is not TOP for v in m.assignment)


def image_chain(m: SpectralMap, c: ChainRecord) -> ImageChain:
    """Deduplicated contraction image of a chain in r."""
    if c.poset is not m.r_poset and c.poset != m.r_poset:
        raise ValueError("chain does not belong to the source poset")
    vals = {m.assignment[q] for q in c.members}
    has_top = TOP in vals
    members = tuple(sorted(v for v in vals if v is not TOP))
    return ImageChain(m.s_poset, members, has_top)


def _arrays(m: SpectralMap):
    return (
        m.s_poset.n,
        m.s_poset.up_array(),
        m.r_poset.n,
        m.r_poset.up_array(),
        m.cmap_array(),
    )


def check_LO(m: SpectralMap) -> bool:
    """Lying over: every element of s is some contraction."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_lo(ns, nr, cmap))


def check_INC(m: SpectralMap) -> bool:
    """Incomparability: strict pairs with proper upper image contract strictly."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_inc(ns, s_up, nr, r_up, cmap))


def check_GU(m: SpectralMap) -> bool:
    """Going up: lifts of p1 < p2 extend upward from any element over p1."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_gu(ns, s_up, nr, r_up, cmap))


def check_GD(m: SpectralMap) -> bool:
    """Going down: lifts of p1 < p2 extend downward from any element over p2."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_gd(ns, s_up, nr, r_up, cmap))


def check_SGB(m: SpectralMap) -> bool:
    """Strong going between: a lift of the middle exists between endpoints."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_sgb(ns, s_up, nr, r_up, cmap))


def check_GB(m: SpectralMap) -> bool:
    """Going between: something sits between endpoints whenever s does."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    return bool(K.prop_gb(ns, s_up, nr, r_up, cmap))


def check_SCLO(m: SpectralMap) -> bool:
    """Starting chain lying over: covers of D grow from any lift of min D."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    s_comp = np.array(m.s_poset.comp_masks, dtype=np.int64)
    r_comp = np.array(m.r_poset.comp_masks, dtype=np.int64)
    return bool(K.prop_sclo(ns, s_up, s_comp, nr, r_up, r_comp, cmap))


def check_GGD(m: SpectralMap) -> bool:
    """Generalized going down: covers of D grow below any lift of max D."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    s_down = np.array(m.s_poset.down_masks, dtype=np.int64)
    s_comp = np.array(m.s_poset.comp_masks, dtype=np.int64)
    r_down = np.array(m.r_poset.down_masks, dtype=np.int64)
    r_comp = np.array(m.r_poset.comp_masks, dtype=np.int64)
    return bool(K.prop_ggd(ns, s_down, s_comp, nr, r_down, r_comp, cmap))


def check_chain_morphism(m: SpectralMap) -> bool:
    """Every chain in s is covered by some chain in r."""
    ns, s_up, nr, r_up, cmap = _arrays(m)
    s_comp = np.array(m.s_poset.comp_masks, dtype=np.int64)
    r_comp = np.array(m.r_poset.comp_masks, dtype=np.int64)
    return bool(K.prop_chain_morphism(ns, s_comp, nr, r_comp, cmap))


def check_layer(m: SpectralMap, n: int) -> bool:
    """Every maximal D-chain over every n-element chain has n elements."""
    if n < 1:
        raise ValueError("layer index must be at least 1")
    ns, s_up, nr, r_up, cmap = _arrays(m)
    s_comp = np.array(m.s_poset.comp_masks, dtype=np.int64)
    r_comp = np.array(m.r_poset.comp_masks, dtype=np.int64)
    return bool(K.layer_holds(n, ns, s_comp, nr, r_comp, cmap))


PROPERTY_NAMES = ("LO", "INC", "GU", "GD", "SGB", "GB", "SCLO", "GGD", "chain_morphism")

_PROPERTY_CHECKS = {
    "LO": check_LO,
    "INC": check_INC,
    "GU": check_GU,
    "GD": check_GD,
    "SGB": check_SGB,
    "GB": check_GB,
    "SCLO": check_SCLO,
    "GGD": check_GGD,
    "chain_morphism": check_chain_morphism,
}


def check_property(m: SpectralMap, name: str) -> bool:
    try:
        fn = _PROPERTY_CHECKS[name]
    except KeyError:
        raise ValueError(f"unknown property {name!r}") from None
    return fn(m)


def properties_summary(m: SpectralMap) -> dict:
    """All nine property verdicts plus unitarity, in a stable order."""
    out = {name: check_property(m, name) for name in PROPERTY_NAMES}
    out["unitary"] = is_unitary(m)
    return out


def _allowed_mask(m: SpectralMap, d_members) -> int:
    dset = set(d_members)
    mask = 0
    for q, v in enumerate(m.assignment):
        if v is not TOP and v in dset:
            mask |= 1 << q
    return mask


def is_D_chain(m: SpectralMap, c: ChainRecord, d: ChainRecord) -> bool:
    """True iff every member of c contracts to a member of d (never TOP)."""
    dset = set(d.members)
    return all(m.assignment[q] is not TOP and m.assignment[q] in dset for q in c.members)


def is_maximal_D_chain(m: SpectralMap, c: ChainRecord, d: ChainRecord) -> bool:
    """True iff no one-element extension of c is still a D-chain.

    Raises NotADChain when c itself is not a D-chain for d.
    """
    if not is_D_chain(m, c, d):
        raise NotADChain(f"{c.members} is not a D-chain for {d.members}")
    r = m.r_poset
    allowed = _allowed_mask(m, d.members)
    cm = c.mask
    for x in range(r.n):
        if allowed >> x & 1 and not (cm >> x & 1) and (cm & ~r.comp_masks[x]) == 0:
            return False
    return True


def maximal_D_chains(m: SpectralMap, d: ChainRecord) -> list[ChainRecord]:
    """All maximal D-chains, in lexicographic member order.

    When no element contracts into d the only D-chain is the empty one,
    which is then vacuously maximal.
    """
    r = m.r_poset
    allowed = _allowed_mask(m, d.members)
    if allowed == 0:
        return [ChainRecord(r, ())]
    out: list[ChainRecord] = []

    def descend(prefix: list[int], universe: int):
        minimal = [
            i
            for i in range(r.n)
            if universe >> i & 1 and r.down_masks[i] & universe == 1 << i
        ]
        if not minimal:
            out.append(ChainRecord(r, tuple(prefix)))
            return
        for i in minimal:
            descend(prefix + [i], universe & r.up_masks[i] & ~(1 << i))

    descend([], allowed)
    return out


def is_cover(m: SpectralMap, c: ChainRecord, d: ChainRecord) -> bool:
    """True iff c is a D-chain contracting onto all of d."""
    if not is_D_chain(m, c, d):
        raise NotADChain(f"{c.members} is not a D-chain for {d.members}")
    return {m.assignment[q] for q in c.members} == set(d.members)


def is_perfect_cover(m: SpectralMap, c: ChainRecord, d: ChainRecord) -> bool:
    """Cover whose contraction is a bijection onto d."""
    return is_cover(m, c, d) and len(c) == len(d)


def is_maximal_cover(m: SpectralMap, c: ChainRecord, d: ChainRecord) -> bool:
    """Cover that is maximal as a D-chain."""
    return is_cover(m, c, d) and is_maximal_D_chain(m, c, d)


def _iter_assignment_vectors(ns, s_up, nr, r_up, allow_top):
    """Monotone assignment vectors in lexicographic order.

    Value code ns stands for TOP. The order here must match sweep_pair in
    the kernels, which replays violations by map index.
    """
    if nr == 0:
        yield ()
        return
    nvals = ns + 1 if allow_top else ns
    if nvals == 0:
        return

    def ext_leq(a, b):
        if b == ns:
            return True
        if a == ns:
            return False
        return s_up[a] >> b & 1

    def ok(cmap, pos, v):
        for j in range(pos):
            if r_up[j] >> pos & 1 and not ext_leq(cmap[j], v):
                return False
            if r_up[pos] >> j & 1 and not ext_leq(v, cmap[j]):
                return False
        return True

    cmap = [0] * nr
    pos = 0
    val = 0
    while True:
        v = val
        found = False
        while v < nvals:
            if ok(cmap, pos, v):
                found = True
                break
            v += 1
        if found:
            cmap[pos] = v
            if pos == nr - 1:
                yield tuple(cmap)
                val = v + 1
            else:
                pos += 1
                val = 0
        else:
            pos -= 1
            if pos < 0:
                return
            val = cmap[pos] + 1


def enumerate_monotone_maps(s: Poset, r: Poset, allow_top: bool):
    """Yield every monotone map r -> s (+TOP if allowed), lexicographically."""
    ns = s.n
    for vec in _iter_assignment_vectors(ns, s.up_masks, r.n, r.up_masks, allow_top):
        assignment = tuple(TOP if v == ns else v for v in vec)
        yield SpectralMap(s, r, assignment)
