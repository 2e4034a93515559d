"""Tests for the theorem verifiers, exhaustive sweeps, and witness search.

Sweep counts are frozen from the canonical enumeration (labeled posets by
pair-state order, maps by ascending assignment vectors), so any change to
the instance stream shows up as a count mismatch before anything subtler
goes wrong.
"""

import pytest

from chaincover.poset import BoundExceeded, make_poset
from chaincover.search import (
    GOALS,
    WitnessSearchSpec,
    flags_hold,
    goal_holds,
    search_witness,
    shrink,
)
from chaincover.specmap import TOP, make_spectral_map, properties_summary
from chaincover.theorems import (
    CORE_THEOREMS,
    HYPOTHESES,
    THEOREM_STATEMENTS,
    TheoremId,
    clause_text,
    estimate_sweep_cost,
    exhaustive_verify,
    instance_from_raw,
    unmet_hypotheses,
    verify,
)

# instance counts for (max_s, max_r) sweeps with TOP allowed, frozen from
# the canonical enumeration
SWEEP_COUNTS = {(1, 2): 18, (2, 2): 91, (2, 3): 985, (3, 2): 828, (3, 3): 11614}


def identity_instance(labels, pairs):
    p = make_poset(labels, pairs)
    return make_spectral_map(p, p, list(range(p.n)))


def diamond_identity():
    return identity_instance(
        ["bot", "a", "b", "top"],
        [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
    )


def six_element_witness():
    """Unitary instance with LO, GU, GD but not SGB whose maximal D-chain
    over the full 3-chain misses the middle layer.

    The chain {x1, x3} cannot be extended: the only elements over p2 are
    m2 and u2, and neither is comparable to both x1 and x3.
    """
    s = make_poset(["p1", "p2", "p3"], [("p1", "p2"), ("p2", "p3")])
    r = make_poset(
        ["l1", "x1", "m2", "u2", "x3", "u3"],
        [("l1", "m2"), ("m2", "x3"), ("x1", "x3"), ("x1", "u2"), ("u2", "u3")],
    )
    to_s = {"l1": "p1", "x1": "p1", "m2": "p2", "u2": "p2", "x3": "p3", "u3": "p3"}
    assignment = [s.index(to_s[lab]) for lab in r.labels]
    return make_spectral_map(s, r, assignment)


class TestTables:
    def test_every_theorem_has_hypotheses_statement_and_clauses(self):
        for t in TheoremId:
            assert t in HYPOTHESES
            assert t in THEOREM_STATEMENTS
            assert clause_text(t, 1)

    def test_core_excludes_exploratory(self):
        assert TheoremId.X_KO_SCLO_EQ_GU not in CORE_THEOREMS
        assert len(CORE_THEOREMS) == 15

    def test_equivalence_clause_decodes_bits(self):
        # bits 0b0001 + 1: only the layer condition holds
        text = clause_text(TheoremId.C_EQUIVALENT, 2)
        assert "layers 1-3 hold" in text
        assert "fail" in text
        text = clause_text(TheoremId.C_EQUIVALENT, 0b1110 + 1)
        assert text.startswith("equivalent conditions disagree: ")
        assert "layers 1-3 fail" in text


class TestVerify:
    def test_identity_holds_everything(self):
        m = diamond_identity()
        for t in TheoremId:
            v = verify(m, t)
            assert v.holds and v.counterexample is None and v.note is None
            assert v.instances_checked == 1

    def test_unmet_hypothesis_is_vacuous(self):
        # one point upstairs, a 2-antichain downstairs, second prime to TOP
        s = make_poset(["p"], [])
        r = make_poset(["q0", "q1"], [])
        m = make_spectral_map(s, r, [0, TOP])
        assert unmet_hypotheses(m, TheoremId.T_COVER_MAXCHAIN) == ["unitary"]
        v = verify(m, TheoremId.T_COVER_MAXCHAIN)
        assert v.holds
        assert v.note == "hypothesis unmet: unitary"

    def test_waiving_exposes_the_conclusion(self):
        s = make_poset(["p"], [])
        r = make_poset(["q0", "q1"], [])
        m = make_spectral_map(s, r, [0, TOP])
        v = verify(m, TheoremId.T_COVER_MAXCHAIN, waive_hypotheses=True)
        assert not v.holds
        assert v.note == "hypotheses waived: unitary"
        assert v.counterexample.waived
        assert v.counterexample.detail["code"] == 1
        assert "TOP" in v.counterexample.detail["clause"]

    def test_biconditional_has_no_note(self):
        s = make_poset(["p"], [])
        r = make_poset(["q0", "q1"], [])
        m = make_spectral_map(s, r, [0, TOP])
        v = verify(m, TheoremId.P_LAYERS)
        assert v.holds and v.note is None

    def test_exploratory_biconditional_on_witness(self):
        # GU and SCLO rise and fall together even on the SGB-free witness
        m = six_element_witness()
        assert verify(m, TheoremId.X_KO_SCLO_EQ_GU).holds


class TestExhaustiveVerify:
    def test_all_core_theorems_hold_small(self):
        for t in CORE_THEOREMS:
            v = exhaustive_verify(t, 2, 2)
            assert v.holds, (t, v.note)
            assert v.instances_checked == SWEEP_COUNTS[(2, 2)]

    def test_equivalence_sweep_counts(self):
        for bounds, expected in SWEEP_COUNTS.items():
            v = exhaustive_verify(TheoremId.C_EQUIVALENT, *bounds)
            assert v.holds
            assert v.instances_checked == expected

    def test_exploratory_holds_small(self):
        for waive in (False, True):
            v = exhaustive_verify(
                TheoremId.X_KO_SCLO_EQ_GU, 3, 3, waive_hypotheses=waive
            )
            assert v.holds
            assert v.instances_checked == SWEEP_COUNTS[(3, 3)]

    def test_waived_sweep_finds_first_violation(self):
        v = exhaustive_verify(TheoremId.T_COVER_MAXCHAIN, 1, 2, waive_hypotheses=True)
        assert not v.holds
        assert v.instances_checked == SWEEP_COUNTS[(1, 2)]
        assert v.note == "first violation at pair 1, map 0"
        cx = v.counterexample
        assert cx.waived
        assert cx.detail["clause"] == "a maximal chain of r contracts into TOP"
        # the earliest instance in enumeration order: empty s, one point r
        assert cx.smap.s_poset.n == 0
        assert cx.smap.r_poset.labels == ("e0",)
        assert cx.smap.assignment == (TOP,)

    def test_worker_count_does_not_change_the_verdict(self):
        for jobs in (2, 3):
            v1 = exhaustive_verify(
                TheoremId.T_COVER_MAXCHAIN, 1, 2, waive_hypotheses=True
            )
            v2 = exhaustive_verify(
                TheoremId.T_COVER_MAXCHAIN, 1, 2, waive_hypotheses=True, jobs=jobs
            )
            assert v1.holds == v2.holds
            assert v1.instances_checked == v2.instances_checked
            assert v1.note == v2.note
            assert v1.counterexample.detail == v2.counterexample.detail
            v3 = exhaustive_verify(TheoremId.C_EQUIVALENT, 2, 3, jobs=jobs)
            assert v3.holds and v3.instances_checked == SWEEP_COUNTS[(2, 3)]

    def test_no_top_sweeps(self):
        v = exhaustive_verify(TheoremId.C_EQUIVALENT, 2, 2, allow_top=False)
        assert v.holds
        assert v.instances_checked < SWEEP_COUNTS[(2, 2)]

    def test_empty_bounds_are_vacuous(self):
        v = exhaustive_verify(TheoremId.P_LAYERS, 0, 0)
        assert v.holds and v.instances_checked == 1

    def test_bound_guards(self):
        with pytest.raises(BoundExceeded):
            exhaustive_verify(TheoremId.P_LAYERS, 6, 2)
        with pytest.raises(BoundExceeded):
            exhaustive_verify(TheoremId.P_LAYERS, 2, 6)
        with pytest.raises(ValueError):
            exhaustive_verify(TheoremId.P_LAYERS, 2, 2, jobs=0)

    def test_estimate_is_an_upper_bound(self):
        for bounds, actual in SWEEP_COUNTS.items():
            est = estimate_sweep_cost(*bounds, allow_top=True)
            assert est["map_upper_bound"] >= actual
            assert est["poset_pairs"] >= 1


class TestInstanceFromRaw:
    def test_normalization_reorders_by_label(self):
        # raw element 1 sits below raw element 0, so labels swap positions
        m = instance_from_raw((0b00, 0b01), (0b00, 0b01), (0, 1))
        assert m.s_poset.labels == ("e1", "e0")
        assert m.s_poset.less(m.s_poset.index("e1"), m.s_poset.index("e0"))
        # raw q0 -> raw e0 and raw q1 -> raw e1 must survive the renaming
        r_q0 = m.r_poset.index("e0")
        assert m.assignment[r_q0] == m.s_poset.index("e0")
        r_q1 = m.r_poset.index("e1")
        assert m.assignment[r_q1] == m.s_poset.index("e1")

    def test_top_value_is_source_size(self):
        m = instance_from_raw((0b00,), (0b00, 0b00), (0, 1))
        assert m.assignment[m.r_poset.index("e1")] is TOP


class TestSearch:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            WitnessSearchSpec(required=frozenset({"BOGUS"}), goal="lo-fails",
                              max_s=2, max_r=2)
        with pytest.raises(ValueError):
            WitnessSearchSpec(required=frozenset(), goal="nonsense",
                              max_s=2, max_r=2)
        with pytest.raises(ValueError):
            WitnessSearchSpec(required=frozenset(), goal="lo-fails",
                              max_s=0, max_r=2)
        assert set(GOALS) == {
            "lo-fails",
            "maximal-dchain-not-cover",
            "maximal-dchain-not-perfect-cover",
        }

    def test_minimal_lo_failure_witness(self):
        spec = WitnessSearchSpec(
            required=frozenset({"GU"}), goal="lo-fails", max_s=3, max_r=2
        )
        w = search_witness(spec)
        # shrinking lands on the smallest shape: two incomparable primes
        # downstairs, one upstairs, one prime never hit
        assert w.s_poset.n == 2 and w.s_poset.order_pairs() == []
        assert w.r_poset.n == 1
        assert w.assignment == (0,)
        assert flags_hold(w, spec.required)
        assert goal_holds(w, spec.goal)

    def test_search_determinism_across_jobs(self):
        spec = WitnessSearchSpec(
            required=frozenset({"GU", "GD"}), goal="lo-fails", max_s=3, max_r=3
        )
        w1 = search_witness(spec)
        w2 = search_witness(spec, jobs=3)
        assert w1.describe() == w2.describe()

    def test_unsatisfiable_returns_none(self):
        # LO cannot fail when it is also required to hold
        spec = WitnessSearchSpec(
            required=frozenset({"LO"}), goal="lo-fails", max_s=2, max_r=2
        )
        assert search_witness(spec) is None

    def test_shrink_requires_a_violating_start(self):
        m = diamond_identity()
        with pytest.raises(ValueError):
            shrink(m, lambda inst: False)

    def test_shrink_is_a_fixed_point_on_minimal_witnesses(self):
        spec = WitnessSearchSpec(
            required=frozenset({"GU"}), goal="lo-fails", max_s=3, max_r=2
        )
        w = search_witness(spec)

        def violation(inst):
            return flags_hold(inst, spec.required) and goal_holds(inst, spec.goal)

        again = shrink(w, violation)
        assert again.describe() == w.describe()

    def test_shrink_removes_padding(self):
        # a 3-antichain upstairs mapped onto one of three primes shrinks to
        # the 2-antichain/1-point core
        s = make_poset(["a", "b", "c"], [])
        r = make_poset(["q0", "q1", "q2"], [])
        m = make_spectral_map(s, r, [0, 0, 0])

        def violation(inst):
            return goal_holds(inst, "lo-fails")

        small = shrink(m, violation)
        assert small.s_poset.n == 2
        assert small.r_poset.n == 1


class TestMaximalChainWitnessBounds:
    def test_no_witness_within_five_r_elements(self):
        # forcing argument: a unitary GU+GD+LO map over the 3-chain with an
        # SGB failure needs two lifts over each layer, so six r elements
        spec = WitnessSearchSpec(
            required=frozenset({"UNITARY", "LO", "GU", "GD", "!SGB"}),
            goal="maximal-dchain-not-cover",
            max_s=3,
            max_r=5,
            d_size=3,
        )
        assert search_witness(spec) is None

    def test_six_element_witness_exists(self):
        m = six_element_witness()
        summary = properties_summary(m)
        assert summary["unitary"] and summary["LO"]
        assert summary["GU"] and summary["GD"]
        assert not summary["SGB"]
        assert flags_hold(m, frozenset({"UNITARY", "LO", "GU", "GD", "!SGB"}))
        assert goal_holds(m, "maximal-dchain-not-cover", d_size=3)

    def test_witness_fails_the_cover_theorem_only_when_waived(self):
        m = six_element_witness()
        v = verify(m, TheoremId.T_MAXDCHAIN_COVERS)
        # the biconditional still holds: SGB fails and some maximal D-chain
        # fails to cover, so both sides are false together
        assert v.holds
        v = verify(m, TheoremId.T_COVER_MAXCHAIN)
        assert v.holds and v.note == "hypothesis unmet: SGB"
