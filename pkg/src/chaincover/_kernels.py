"""Bitmask kernels for property checks and exhaustive sweeps.

Everything in this module works on a flat encoding: a poset with n elements
is an int64 array of up-set masks (bit j of up[i] means i <= j, self bit
included), a contraction map is an int64 array with the sentinel value ns
standing for the adjoined top element, and chains are membership masks.

The hot functions are compiled with numba when it is importable and the
environment variable CHAINCOVER_NO_NUMBA is unset; otherwise the same code
runs as plain Python. Both paths execute identical statements, so results
never depend on the backend.
"""

from __future__ import annotations

import os

import numpy as np


def _identity_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


if os.environ.get("CHAINCOVER_NO_NUMBA", "") not in ("", "0"):
    njit = _identity_jit
    NUMBA_ENABLED = False
else:
    try:
        from numba import njit  # type: ignore

        NUMBA_ENABLED = True
    except ImportError:
        njit = _identity_jit
        NUMBA_ENABLED = False


# Property bits reported by property_bits().
PROP_LO = 1
PROP_INC = 2
PROP_GU = 4
PROP_GD = 8
PROP_SGB = 16
PROP_GB = 32
PROP_UNITARY = 64

# Theorem dispatch codes for eval_theorem / sweep_pair.
TID_T_COVER_MAXCHAIN = 0
TID_C_PERFECT_MAXCHAIN = 1
TID_L_LO_EXISTENCE = 2
TID_P_LAYERS = 3
TID_P_MINI_GD = 4
TID_P_MINI_GU = 5
TID_P_MINI_SGB = 6
TID_C_GGD = 7
TID_C_GGU_DUAL = 8
TID_T_MAXDCHAIN_COVERS = 9
TID_T_PERFECT_COVER = 10
TID_C_EQUIVALENT = 11
TID_L_MAXCOVER_MAXCHAIN = 12
TID_C_MAXDCHAIN_MAXCHAIN = 13
TID_C_EXISTS_MAXCHAIN_COVER = 14
TID_X_KO_SCLO_EQ_GU = 15

# Goal codes for search_pair.
GOAL_LO_FAILS = 0
GOAL_MAXDCHAIN_NOT_COVER = 1
GOAL_MAXDCHAIN_NOT_PERFECT = 2


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _down_masks(n, up):
    down = np.zeros(n, np.int64)
    for i in range(n):
        for j in range(n):
            if up[j] >> i & 1:
                down[i] |= 1 << j
    return down


@njit(cache=True)
def _comp_masks(n, up, down):
    comp = np.empty(n, np.int64)
    for i in range(n):
        comp[i] = up[i] | down[i]
    return comp


@njit(cache=True)
def _is_chain(comp, mask):
    m = mask
    i = 0
    while m:
        if m & 1:
            if mask & ~comp[i]:
                return False
        m >>= 1
        i += 1
    return True


@njit(cache=True)
def _chain_masks(n, comp):
    total = 1 << n
    out = np.empty(total, np.int64)
    k = 0
    for mask in range(total):
        if _is_chain(comp, mask):
            out[k] = mask
            k += 1
    return out[:k]


@njit(cache=True)
def _maximal_chain_masks(n, comp):
    # maximal chains of the whole poset; none when the poset is empty
    if n == 0:
        return np.empty(0, np.int64)
    chains = _chain_masks(n, comp)
    out = np.empty(len(chains), np.int64)
    k = 0
    for idx in range(len(chains)):
        mask = chains[idx]
        extendable = False
        for x in range(n):
            if not (mask >> x & 1) and (mask & ~comp[x]) == 0:
                extendable = True
                break
        if not extendable:
            out[k] = mask
            k += 1
    return out[:k]


@njit(cache=True)
def _is_maximal_sub(comp, allowed, sub):
    # no one-element extension inside `allowed` stays a chain
    rest = allowed & ~sub
    x = 0
    while rest:
        if rest & 1:
            if (sub & ~comp[x]) == 0:
                return False
        rest >>= 1
        x += 1
    return True


@njit(cache=True)
def _allowed_mask(ns, nr, cmap, d_mask):
    # elements whose contraction is a (non-top) member of D
    allowed = 0
    for q in range(nr):
        c = cmap[q]
        if c != ns and (d_mask >> c & 1):
            allowed |= 1 << q
    return allowed


@njit(cache=True)
def _image_mask(nr, cmap, c_mask):
    img = 0
    for q in range(nr):
        if c_mask >> q & 1:
            img |= 1 << cmap[q]
    return img


@njit(cache=True)
def _least_of_chain(s_up, d_mask):
    m = d_mask
    i = 0
    while m:
        if m & 1:
            if (d_mask & ~s_up[i]) == 0:
                return i
        m >>= 1
        i += 1
    return -1


@njit(cache=True)
def _greatest_of_chain(s_down, d_mask):
    m = d_mask
    i = 0
    while m:
        if m & 1:
            if (d_mask & ~s_down[i]) == 0:
                return i
        m >>= 1
        i += 1
    return -1


@njit(cache=True)
def _ext_leq(s_up, ns, a, b):
    # order on s extended by a top value encoded as ns
    if b == ns:
        return True
    if a == ns:
        return False
    return (s_up[a] >> b & 1) == 1


@njit(cache=True)
def prop_unitary(ns, nr, cmap):
    for q in range(nr):
        if cmap[q] == ns:
            return False
    return True


@njit(cache=True)
def prop_lo(ns, nr, cmap):
    for p in range(ns):
        hit = False
        for q in range(nr):
            if cmap[q] == p:
                hit = True
                break
        if not hit:
            return False
    return True


@njit(cache=True)
def prop_inc(ns, s_up, nr, r_up, cmap):
    for q1 in range(nr):
        for q2 in range(nr):
            if q1 == q2 or not (r_up[q1] >> q2 & 1):
                continue
            c2 = cmap[q2]
            if c2 == ns:
                continue
            c1 = cmap[q1]
            if c1 == ns or c1 == c2 or not (s_up[c1] >> c2 & 1):
                return False
    return True


@njit(cache=True)
def prop_gu(ns, s_up, nr, r_up, cmap):
    for p1 in range(ns):
        for p2 in range(ns):
            if p1 == p2 or not (s_up[p1] >> p2 & 1):
                continue
            for q1 in range(nr):
                if cmap[q1] != p1:
                    continue
                found = False
                for q2 in range(nr):
                    if q2 != q1 and (r_up[q1] >> q2 & 1) and cmap[q2] == p2:
                        found = True
                        break
                if not found:
                    return False
    return True


@njit(cache=True)
def prop_gd(ns, s_up, nr, r_up, cmap):
    for p1 in range(ns):
        for p2 in range(ns):
            if p1 == p2 or not (s_up[p1] >> p2 & 1):
                continue
            for q2 in range(nr):
                if cmap[q2] != p2:
                    continue
                found = False
                for q1 in range(nr):
                    if q1 != q2 and (r_up[q1] >> q2 & 1) and cmap[q1] == p1:
                        found = True
                        break
                if not found:
                    return False
    return True


@njit(cache=True)
def prop_sgb(ns, s_up, nr, r_up, cmap):
    for p1 in range(ns):
        for p2 in range(ns):
            if p1 == p2 or not (s_up[p1] >> p2 & 1):
                continue
            for p3 in range(ns):
                if p3 == p2 or not (s_up[p2] >> p3 & 1):
                    continue
                for q1 in range(nr):
                    if cmap[q1] != p1:
                        continue
                    for q3 in range(nr):
                        if q3 == q1 or cmap[q3] != p3 or not (r_up[q1] >> q3 & 1):
                            continue
                        found = False
                        for q2 in range(nr):
                            if (
                                q2 != q1
                                and q2 != q3
                                and cmap[q2] == p2
                                and (r_up[q1] >> q2 & 1)
                                and (r_up[q2] >> q3 & 1)
                            ):
                                found = True
                                break
                        if not found:
                            return False
    return True


@njit(cache=True)
def prop_gb(ns, s_up, nr, r_up, cmap):
    # guarded form: both endpoint contractions must be proper (not top)
    for q1 in range(nr):
        for q3 in range(nr):
            if q1 == q3 or not (r_up[q1] >> q3 & 1):
                continue
            c1 = cmap[q1]
            c3 = cmap[q3]
            if c1 == ns or c3 == ns:
                continue
            between = False
            for p in range(ns):
                if (
                    p != c1
                    and p != c3
                    and (s_up[c1] >> p & 1)
                    and (s_up[p] >> c3 & 1)
                ):
                    between = True
                    break
            if not between:
                continue
            found = False
            for q2 in range(nr):
                if (
                    q2 != q1
                    and q2 != q3
                    and (r_up[q1] >> q2 & 1)
                    and (r_up[q2] >> q3 & 1)
                ):
                    found = True
                    break
            if not found:
                return False
    return True


@njit(cache=True)
def prop_sclo(ns, s_up, s_comp, nr, r_up, r_comp, cmap):
    # every element over the least member of a chain D starts a cover of D
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        p = _least_of_chain(s_up, d_mask)
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        for q in range(nr):
            if cmap[q] != p:
                continue
            space = allowed & r_up[q]
            found = False
            sub = space
            while True:
                if (
                    (sub >> q & 1)
                    and _is_chain(r_comp, sub)
                    and _image_mask(nr, cmap, sub) == d_mask
                ):
                    found = True
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & space
            if not found:
                return False
    return True


@njit(cache=True)
def prop_ggd(ns, s_down, s_comp, nr, r_down, r_comp, cmap):
    # dual: every element over the greatest member of D ends a cover of D
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        g = _greatest_of_chain(s_down, d_mask)
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        for q in range(nr):
            if cmap[q] != g:
                continue
            space = allowed & r_down[q]
            found = False
            sub = space
            while True:
                if (
                    (sub >> q & 1)
                    and _is_chain(r_comp, sub)
                    and _image_mask(nr, cmap, sub) == d_mask
                ):
                    found = True
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & space
            if not found:
                return False
    return True


@njit(cache=True)
def prop_chain_morphism(ns, s_comp, nr, r_comp, cmap):
    # every chain in s is covered by some chain in r
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        found = False
        sub = allowed
        while True:
            if _is_chain(r_comp, sub) and _image_mask(nr, cmap, sub) == d_mask:
                found = True
                break
            if sub == 0:
                break
            sub = (sub - 1) & allowed
        if not found:
            return False
    return True


@njit(cache=True)
def layer_holds(n, ns, s_comp, nr, r_comp, cmap):
    # every maximal D-chain over every n-element chain D has exactly n elements
    for d_mask in range(1 << ns):
        if _popcount(d_mask) != n or not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                if _popcount(sub) != n:
                    return False
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return True


@njit(cache=True)
def property_bits(ns, s_up, nr, r_up, cmap):
    bits = 0
    if prop_lo(ns, nr, cmap):
        bits |= PROP_LO
    if prop_inc(ns, s_up, nr, r_up, cmap):
        bits |= PROP_INC
    if prop_gu(ns, s_up, nr, r_up, cmap):
        bits |= PROP_GU
    if prop_gd(ns, s_up, nr, r_up, cmap):
        bits |= PROP_GD
    if prop_sgb(ns, s_up, nr, r_up, cmap):
        bits |= PROP_SGB
    if prop_gb(ns, s_up, nr, r_up, cmap):
        bits |= PROP_GB
    if prop_unitary(ns, nr, cmap):
        bits |= PROP_UNITARY
    return bits


@njit(cache=True)
def _mini_gd_rhs(ns, s_up, s_comp, nr, r_comp, cmap):
    # each member of D sits above the contraction of some chain member
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if sub != 0 and _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                for p in range(ns):
                    if not (d_mask >> p & 1):
                        continue
                    ok = False
                    for q in range(nr):
                        if (sub >> q & 1) and (s_up[cmap[q]] >> p & 1):
                            ok = True
                            break
                    if not ok:
                        return False
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return True


@njit(cache=True)
def _mini_gu_rhs(ns, s_up, s_comp, nr, r_comp, cmap):
    # each member of D sits below the contraction of some chain member
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if sub != 0 and _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                for p in range(ns):
                    if not (d_mask >> p & 1):
                        continue
                    ok = False
                    for q in range(nr):
                        if (sub >> q & 1) and (s_up[p] >> cmap[q] & 1):
                            ok = True
                            break
                    if not ok:
                        return False
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return True


@njit(cache=True)
def _mini_sgb_rhs(ns, s_up, s_comp, nr, r_down, r_comp, cmap):
    # across every proper cut, each member of D is bracketed by a contraction
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if sub != 0 and _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                for x in range(nr):
                    if not (sub >> x & 1):
                        continue
                    left = sub & r_down[x]
                    if left == sub:
                        continue
                    right = sub & ~left
                    for p in range(ns):
                        if not (d_mask >> p & 1):
                            continue
                        ok = False
                        for q in range(nr):
                            if (left >> q & 1) and (s_up[p] >> cmap[q] & 1):
                                ok = True
                                break
                        if not ok:
                            for q in range(nr):
                                if (right >> q & 1) and (s_up[cmap[q]] >> p & 1):
                                    ok = True
                                    break
                        if not ok:
                            return False
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return True


@njit(cache=True)
def _all_max_dchains_cover(ns, s_comp, nr, r_comp, cmap):
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if sub != 0 and _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                if _image_mask(nr, cmap, sub) != d_mask:
                    return False
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return True


@njit(cache=True)
def eval_theorem(
    tid,
    waive,
    ns,
    s_up,
    s_down,
    s_comp,
    nr,
    r_up,
    r_down,
    r_comp,
    cmap,
    s_chain_masks,
    s_max_chains,
    r_max_chains,
):
    """Evaluate one theorem on one instance.

    Returns 0 when the statement holds on the instance (including the case
    of an unmet hypothesis, unless `waive` forces the conclusion to be
    checked anyway) and a positive clause code otherwise.
    """
    if tid == TID_T_COVER_MAXCHAIN or tid == TID_C_PERFECT_MAXCHAIN:
        if not waive:
            hyp = (
                prop_unitary(ns, nr, cmap)
                and prop_gu(ns, s_up, nr, r_up, cmap)
                and prop_gd(ns, s_up, nr, r_up, cmap)
                and prop_sgb(ns, s_up, nr, r_up, cmap)
            )
            if tid == TID_C_PERFECT_MAXCHAIN:
                hyp = hyp and prop_inc(ns, s_up, nr, r_up, cmap)
            if not hyp:
                return 0
        for k in range(len(r_max_chains)):
            cm = r_max_chains[k]
            img = 0
            has_top = False
            for q in range(nr):
                if cm >> q & 1:
                    if cmap[q] == ns:
                        has_top = True
                        break
                    img |= 1 << cmap[q]
            if has_top:
                return 1
            if not _is_chain(s_comp, img):
                return 2
            for x in range(ns):
                if not (img >> x & 1) and (img & ~s_comp[x]) == 0:
                    return 3
            if tid == TID_C_PERFECT_MAXCHAIN and _popcount(cm) != _popcount(img):
                return 4
        return 0

    if tid == TID_L_LO_EXISTENCE:
        lhs = prop_lo(ns, nr, cmap)
        rhs = True
        for idx in range(len(s_chain_masks)):
            d = s_chain_masks[idx]
            if d == 0:
                continue
            if _allowed_mask(ns, nr, cmap, d) == 0:
                rhs = False
                break
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    if tid == TID_P_LAYERS:
        lo = prop_lo(ns, nr, cmap)
        inc = prop_inc(ns, s_up, nr, r_up, cmap)
        l1 = layer_holds(1, ns, s_comp, nr, r_comp, cmap)
        if l1 != (lo and inc):
            return 1
        gu = prop_gu(ns, s_up, nr, r_up, cmap)
        gd = prop_gd(ns, s_up, nr, r_up, cmap)
        l2 = layer_holds(2, ns, s_comp, nr, r_comp, cmap)
        if (l1 and l2) != (lo and inc and gu and gd):
            return 2
        sgb = prop_sgb(ns, s_up, nr, r_up, cmap)
        l3 = layer_holds(3, ns, s_comp, nr, r_comp, cmap)
        if (l1 and l2 and l3) != (lo and inc and gu and gd and sgb):
            return 3
        return 0

    if tid == TID_P_MINI_GD:
        lhs = prop_gd(ns, s_up, nr, r_up, cmap)
        rhs = _mini_gd_rhs(ns, s_up, s_comp, nr, r_comp, cmap)
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    if tid == TID_P_MINI_GU:
        lhs = prop_gu(ns, s_up, nr, r_up, cmap)
        rhs = _mini_gu_rhs(ns, s_up, s_comp, nr, r_comp, cmap)
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    if tid == TID_P_MINI_SGB:
        lhs = prop_sgb(ns, s_up, nr, r_up, cmap)
        rhs = _mini_sgb_rhs(ns, s_up, s_comp, nr, r_down, r_comp, cmap)
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    if tid == TID_C_GGD:
        if not waive:
            if not (prop_gd(ns, s_up, nr, r_up, cmap) and prop_sgb(ns, s_up, nr, r_up, cmap)):
                return 0
        if not prop_ggd(ns, s_down, s_comp, nr, r_down, r_comp, cmap):
            return 1
        for d_mask in range(1, 1 << ns):
            if not _is_chain(s_comp, d_mask):
                continue
            g = _greatest_of_chain(s_down, d_mask)
            allowed = _allowed_mask(ns, nr, cmap, d_mask)
            for q in range(nr):
                if cmap[q] != g:
                    continue
                sub = allowed
                while True:
                    if (
                        sub != 0
                        and (sub >> q & 1)
                        and _is_chain(r_comp, sub)
                        and _is_maximal_sub(r_comp, allowed, sub)
                        and _image_mask(nr, cmap, sub) != d_mask
                    ):
                        return 2
                    if sub == 0:
                        break
                    sub = (sub - 1) & allowed
        return 0

    if tid == TID_C_GGU_DUAL:
        if not waive:
            if not (prop_gu(ns, s_up, nr, r_up, cmap) and prop_sgb(ns, s_up, nr, r_up, cmap)):
                return 0
        if not prop_sclo(ns, s_up, s_comp, nr, r_up, r_comp, cmap):
            return 1
        for d_mask in range(1, 1 << ns):
            if not _is_chain(s_comp, d_mask):
                continue
            p = _least_of_chain(s_up, d_mask)
            allowed = _allowed_mask(ns, nr, cmap, d_mask)
            for q in range(nr):
                if cmap[q] != p:
                    continue
                sub = allowed
                while True:
                    if (
                        sub != 0
                        and (sub >> q & 1)
                        and _is_chain(r_comp, sub)
                        and _is_maximal_sub(r_comp, allowed, sub)
                        and _image_mask(nr, cmap, sub) != d_mask
                    ):
                        return 2
                    if sub == 0:
                        break
                    sub = (sub - 1) & allowed
        return 0

    if tid == TID_T_MAXDCHAIN_COVERS:
        lhs = (
            prop_gd(ns, s_up, nr, r_up, cmap)
            and prop_gu(ns, s_up, nr, r_up, cmap)
            and prop_sgb(ns, s_up, nr, r_up, cmap)
        )
        rhs = _all_max_dchains_cover(ns, s_comp, nr, r_comp, cmap)
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    if tid == TID_T_PERFECT_COVER:
        if not waive:
            hyp = (
                prop_lo(ns, nr, cmap)
                and prop_inc(ns, s_up, nr, r_up, cmap)
                and prop_gu(ns, s_up, nr, r_up, cmap)
                and prop_gd(ns, s_up, nr, r_up, cmap)
                and prop_sgb(ns, s_up, nr, r_up, cmap)
            )
            if not hyp:
                return 0
        for idx in range(len(s_chain_masks)):
            d = s_chain_masks[idx]
            allowed = _allowed_mask(ns, nr, cmap, d)
            sub = allowed
            while True:
                if _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                    if _image_mask(nr, cmap, sub) != d:
                        return 1
                    if _popcount(sub) != _popcount(d):
                        return 2
                if sub == 0:
                    break
                sub = (sub - 1) & allowed
        return 0

    if tid == TID_C_EQUIVALENT:
        cond2 = (
            prop_lo(ns, nr, cmap)
            and prop_inc(ns, s_up, nr, r_up, cmap)
            and prop_gu(ns, s_up, nr, r_up, cmap)
            and prop_gd(ns, s_up, nr, r_up, cmap)
            and prop_sgb(ns, s_up, nr, r_up, cmap)
        )
        cond1 = True
        cond3 = True
        cond4 = True
        for idx in range(len(s_chain_masks)):
            d = s_chain_masks[idx]
            k = _popcount(d)
            allowed = _allowed_mask(ns, nr, cmap, d)
            sub = allowed
            while True:
                if _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                    sz = _popcount(sub)
                    if sz != k:
                        cond4 = False
                        if 1 <= k <= 3:
                            cond1 = False
                    if sz != k or _image_mask(nr, cmap, sub) != d:
                        cond3 = False
                if sub == 0:
                    break
                sub = (sub - 1) & allowed
        bits = 0
        if cond1:
            bits |= 1
        if cond2:
            bits |= 2
        if cond3:
            bits |= 4
        if cond4:
            bits |= 8
        if bits == 0 or bits == 15:
            return 0
        return bits + 1

    if tid == TID_L_MAXCOVER_MAXCHAIN:
        if not waive and not prop_unitary(ns, nr, cmap):
            return 0
        for k in range(len(s_max_chains)):
            d = s_max_chains[k]
            allowed = _allowed_mask(ns, nr, cmap, d)
            sub = allowed
            while True:
                if (
                    _is_chain(r_comp, sub)
                    and _is_maximal_sub(r_comp, allowed, sub)
                    and _image_mask(nr, cmap, sub) == d
                ):
                    for x in range(nr):
                        if not (sub >> x & 1) and (sub & ~r_comp[x]) == 0:
                            return 1
                if sub == 0:
                    break
                sub = (sub - 1) & allowed
        return 0

    if tid == TID_C_MAXDCHAIN_MAXCHAIN or tid == TID_C_EXISTS_MAXCHAIN_COVER:
        if not waive:
            hyp = (
                prop_unitary(ns, nr, cmap)
                and prop_gd(ns, s_up, nr, r_up, cmap)
                and prop_gu(ns, s_up, nr, r_up, cmap)
                and prop_sgb(ns, s_up, nr, r_up, cmap)
            )
            if tid == TID_C_EXISTS_MAXCHAIN_COVER:
                hyp = hyp and prop_lo(ns, nr, cmap)
            if not hyp:
                return 0
        for k in range(len(s_max_chains)):
            d = s_max_chains[k]
            allowed = _allowed_mask(ns, nr, cmap, d)
            witnessed = False
            sub = allowed
            while True:
                if sub != 0 and _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                    if tid == TID_C_MAXDCHAIN_MAXCHAIN:
                        if _image_mask(nr, cmap, sub) != d:
                            return 1
                        for x in range(nr):
                            if not (sub >> x & 1) and (sub & ~r_comp[x]) == 0:
                                return 2
                    else:
                        if _image_mask(nr, cmap, sub) == d:
                            ismax = True
                            for x in range(nr):
                                if not (sub >> x & 1) and (sub & ~r_comp[x]) == 0:
                                    ismax = False
                                    break
                            if ismax:
                                witnessed = True
                if sub == 0:
                    break
                sub = (sub - 1) & allowed
            if tid == TID_C_EXISTS_MAXCHAIN_COVER and not witnessed:
                return 1
        return 0

    if tid == TID_X_KO_SCLO_EQ_GU:
        if not waive and not prop_unitary(ns, nr, cmap):
            return 0
        lhs = prop_sclo(ns, s_up, s_comp, nr, r_up, r_comp, cmap)
        rhs = prop_gu(ns, s_up, nr, r_up, cmap)
        if lhs == rhs:
            return 0
        return 1 if lhs else 2

    return -1  # unknown theorem id


@njit(cache=True)
def _map_value_ok(ns, s_up, nr, r_up, cmap, pos, v):
    for j in range(pos):
        if r_up[j] >> pos & 1:
            if not _ext_leq(s_up, ns, cmap[j], v):
                return False
        if r_up[pos] >> j & 1:
            if not _ext_leq(s_up, ns, v, cmap[j]):
                return False
    return True


@njit(cache=True)
def sweep_pair(tid, waive, ns, s_up, nr, r_up, allow_top):
    """Evaluate a theorem over every monotone map for one poset pair.

    Maps are enumerated lexicographically as value vectors (s indices first,
    then the top sentinel). Returns (maps checked, index of the first
    violating map or -1, its clause code).
    """
    s_down = _down_masks(ns, s_up)
    s_comp = _comp_masks(ns, s_up, s_down)
    r_down = _down_masks(nr, r_up)
    r_comp = _comp_masks(nr, r_up, r_down)
    s_chain_masks = _chain_masks(ns, s_comp)
    s_max_chains = _maximal_chain_masks(ns, s_comp)
    r_max_chains = _maximal_chain_masks(nr, r_comp)

    count = 0
    first_bad = -1
    bad_code = 0

    if nr == 0:
        cmap = np.empty(0, np.int64)
        code = eval_theorem(
            tid, waive, ns, s_up, s_down, s_comp, nr, r_up, r_down, r_comp,
            cmap, s_chain_masks, s_max_chains, r_max_chains,
        )
        if code != 0:
            first_bad = 0
            bad_code = code
        return 1, first_bad, bad_code

    nvals = ns + 1 if allow_top else ns
    if nvals == 0:
        return 0, -1, 0

    cmap = np.zeros(nr, np.int64)
    pos = 0
    val = 0
    while True:
        v = val
        found = False
        while v < nvals:
            if _map_value_ok(ns, s_up, nr, r_up, cmap, pos, v):
                found = True
                break
            v += 1
        if found:
            cmap[pos] = v
            if pos == nr - 1:
                code = eval_theorem(
                    tid, waive, ns, s_up, s_down, s_comp, nr, r_up, r_down,
                    r_comp, cmap, s_chain_masks, s_max_chains, r_max_chains,
                )
                if code != 0 and first_bad < 0:
                    first_bad = count
                    bad_code = code
                count += 1
                val = v + 1
            else:
                pos += 1
                val = 0
        else:
            pos -= 1
            if pos < 0:
                break
            val = cmap[pos] + 1
    return count, first_bad, bad_code


@njit(cache=True)
def count_monotone_maps(ns, s_up, nr, r_up, allow_top):
    """Number of monotone maps for one poset pair (same order as sweep_pair)."""
    if nr == 0:
        return 1
    nvals = ns + 1 if allow_top else ns
    if nvals == 0:
        return 0
    count = 0
    cmap = np.zeros(nr, np.int64)
    pos = 0
    val = 0
    while True:
        v = val
        found = False
        while v < nvals:
            if _map_value_ok(ns, s_up, nr, r_up, cmap, pos, v):
                found = True
                break
            v += 1
        if found:
            cmap[pos] = v
            if pos == nr - 1:
                count += 1
                val = v + 1
            else:
                pos += 1
                val = 0
        else:
            pos -= 1
            if pos < 0:
                break
            val = cmap[pos] + 1
    return count


@njit(cache=True)
def _goal_met(goal_id, goal_size, ns, s_up, s_comp, nr, r_comp, cmap):
    if goal_id == GOAL_LO_FAILS:
        return not prop_lo(ns, nr, cmap)
    for d_mask in range(1, 1 << ns):
        if not _is_chain(s_comp, d_mask):
            continue
        if goal_size > 0 and _popcount(d_mask) != goal_size:
            continue
        allowed = _allowed_mask(ns, nr, cmap, d_mask)
        sub = allowed
        while True:
            if _is_chain(r_comp, sub) and _is_maximal_sub(r_comp, allowed, sub):
                img = _image_mask(nr, cmap, sub)
                if goal_id == GOAL_MAXDCHAIN_NOT_COVER and img != d_mask:
                    return True
                if goal_id == GOAL_MAXDCHAIN_NOT_PERFECT and (
                    img != d_mask or _popcount(sub) != _popcount(d_mask)
                ):
                    return True
            if sub == 0:
                break
            sub = (sub - 1) & allowed
    return False


@njit(cache=True)
def search_pair(ns, s_up, nr, r_up, allow_top, need_bits, forbid_bits, goal_id, goal_size):
    """First monotone map meeting the flag and goal constraints, if any.

    Returns (maps scanned, index of the hit or -1). Scanning stops at the
    first hit, so a hit at index k reports k+1 scanned.
    """
    s_down = _down_masks(ns, s_up)
    s_comp = _comp_masks(ns, s_up, s_down)
    r_down = _down_masks(nr, r_up)
    r_comp = _comp_masks(nr, r_up, r_down)

    count = 0
    if nr == 0:
        cmap = np.empty(0, np.int64)
        bits = property_bits(ns, s_up, nr, r_up, cmap)
        if bits & need_bits == need_bits and bits & forbid_bits == 0:
            if _goal_met(goal_id, goal_size, ns, s_up, s_comp, nr, r_comp, cmap):
                return 1, 0
        return 1, -1

    nvals = ns + 1 if allow_top else ns
    if nvals == 0:
        return 0, -1

    cmap = np.zeros(nr, np.int64)
    pos = 0
    val = 0
    while True:
        v = val
        found = False
        while v < nvals:
            if _map_value_ok(ns, s_up, nr, r_up, cmap, pos, v):
                found = True
                break
            v += 1
        if found:
            cmap[pos] = v
            if pos == nr - 1:
                bits = property_bits(ns, s_up, nr, r_up, cmap)
                if bits & need_bits == need_bits and bits & forbid_bits == 0:
                    if _goal_met(goal_id, goal_size, ns, s_up, s_comp, nr, r_comp, cmap):
                        return count + 1, count
                count += 1
                val = v + 1
            else:
                pos += 1
                val = 0
        else:
            pos -= 1
            if pos < 0:
                break
            val = cmap[pos] + 1
    return count, -1
