"""Tests for the coordinatising ring structures and their axiom suites."""

from __future__ import annotations

import pytest

from rootforge.algebra import AlgebraElement, zmod
from rootforge.formrings import (
    F4OverlapData,
    ba_from_bb,
    bb_free,
    bb_from_f4,
    bb_octonion,
    bb_orthogonal,
    bb_symplectic,
    check_ba_axioms,
    check_bb_axioms,
    check_f4_axioms,
    check_f4_overlap,
    f4_chevalley,
    f4_free,
    f4_octonion,
    mirror_f4,
    overlap_from_f4,
    truncate_series,
)
from rootforge.formrings import _OrthogonalBB


def test_orthogonal_worked_values_mod_seven():
    bb = bb_orthogonal(zmod(7))
    two = bb.ring.from_int(2).payload
    three = bb.ring.from_int(3).payload
    assert bb.pair(two, three) == bb.ring.from_int(2)  # -2*2*3 = -12 = 2 mod 7
    assert bb.rho(two) == bb.ring.from_int(4)
    assert bb.lambda_element == bb.ring.one
    assert bb.phi(bb.ring.from_int(5)) == bb.delta_zero()


def test_symplectic_rho_is_additive_on_form_sums():
    bb = bb_symplectic(zmod(9))
    for u in bb.delta_elements():
        for v in bb.delta_elements():
            total = bb.rho(bb.delta_add(u, v))
            assert total == bb.rho(u) + bb.rho(v)


@pytest.mark.parametrize("maker", [bb_orthogonal, bb_symplectic])
@pytest.mark.parametrize("modulus", [2, 3])
def test_scalar_form_rings_pass_exhaustively(maker, modulus):
    report = check_bb_axioms(maker(zmod(modulus)), budget=30000)
    assert report.ok, report.failures()[0].to_dict()
    assert report.exhaustive


def test_octonion_form_ring_passes_sampled():
    report = check_bb_axioms(bb_octonion(zmod(2)), budget=2500, seed=7)
    assert report.ok, report.failures()[0].to_dict()


def test_corrupted_rho_fails_the_action_compatibility_with_witness():
    class BadRho(_OrthogonalBB):
        def rho(self, u):
            e = self.ring.element(u)
            return e * e * e

    report = check_bb_axioms(BadRho(zmod(7)), budget=5000)
    assert not report.ok
    names = {c.name for c in report.failures()}
    assert "rho respects the action" in names
    witness = next(
        c.witness for c in report.failures() if c.name == "rho respects the action"
    )
    assert "arguments" in witness and "lhs" in witness and "rhs" in witness


def test_report_dictionary_shape():
    report = check_bb_axioms(bb_orthogonal(zmod(2)), budget=1000)
    data = report.to_dict()
    assert data["structure"] == "bb"
    assert data["ok"] is True
    for entry in data["checks"]:
        assert set(entry) >= {"axiom_name", "status", "checked"}
        assert entry["status"] in ("pass", "fail")


def test_free_structure_worked_values():
    bb = bb_free()
    lam = bb.lambda_element
    assert bb.rho(bb.iota) == bb.ring.one
    assert bb.pair(bb.iota, bb.iota) == -bb.ring.one - lam
    # the generator moved by lambda is a new element, not iota again
    assert not bb.delta_equal(bb.act(bb.iota, lam), bb.iota)
    # every shifted generator still has rho equal to one
    for m in (-2, -1, 0, 1, 2):
        shifted = ((), ((m, 1),))
        assert bb.rho(shifted) == bb.ring.one


def test_free_structure_passes_sampled():
    report = check_bb_axioms(bb_free(), budget=700, seed=11)
    assert report.ok, report.failures()[0].to_dict()


def test_sign_indexed_view_passes_and_guards_rank():
    report = check_ba_axioms(ba_from_bb(bb_orthogonal(zmod(3)), 3), budget=30000)
    assert report.ok, report.failures()[0].to_dict()
    assert report.exhaustive
    report = check_ba_axioms(ba_from_bb(bb_symplectic(zmod(3)), 4), budget=30000)
    assert report.ok, report.failures()[0].to_dict()
    with pytest.raises(ValueError):
        ba_from_bb(bb_orthogonal(zmod(3)), 2)
    with pytest.raises(ValueError):
        ba_from_bb(bb_octonion(zmod(2)), 4)
    # rank three tolerates the nonassociative carrier
    report = check_ba_axioms(ba_from_bb(bb_octonion(zmod(2)), 3), budget=1500, seed=3)
    assert report.ok, report.failures()[0].to_dict()


def test_f4_free_worked_values():
    f4 = f4_free()
    ring = f4.ring_r
    lam = f4.lambda_r
    assert f4.rho_sr(ring.from_int(-1)) == lam
    assert f4.phi_rs(ring.one) == ring.one + lam
    assert f4.rho_rs(lam) == ring.one
    assert lam * lam == ring.one
    # all four units are their own inverses
    for unit in (ring.one, -ring.one, lam, -lam):
        assert unit ** -1 == unit


@pytest.mark.parametrize(
    "pair, budget, want_exhaustive",
    [
        (f4_chevalley(zmod(3)), 20000, True),
        (f4_octonion(zmod(2)), 3000, False),
        (f4_free(), 1200, False),
    ],
)
def test_f4_pairs_pass_their_suites(pair, budget, want_exhaustive):
    report = check_f4_axioms(pair, budget=budget, seed=1)
    assert report.ok, report.failures()[0].to_dict()
    assert report.exhaustive == want_exhaustive


def test_mirrored_pair_passes_and_double_mirror_unwraps():
    base = f4_octonion(zmod(3))
    flipped = mirror_f4(base)
    assert mirror_f4(flipped) is base
    report = check_f4_axioms(flipped, budget=2500, seed=2)
    assert report.ok, report.failures()[0].to_dict()


@pytest.mark.parametrize("side", ["R", "S"])
def test_f4_slices_are_valid_form_rings(side):
    report = check_bb_axioms(bb_from_f4(f4_chevalley(zmod(3)), side), budget=20000)
    assert report.ok, report.failures()[0].to_dict()
    report = check_bb_axioms(bb_from_f4(f4_free(), side), budget=900, seed=4)
    assert report.ok, report.failures()[0].to_dict()


def test_octonion_slice_lambda_signs():
    f4 = f4_octonion(zmod(5))
    r_side = bb_from_f4(f4, "R")
    s_side = bb_from_f4(f4, "S")
    assert r_side.lambda_element == f4.ring_r.one
    assert s_side.lambda_element == -f4.ring_s.one


def test_identity_overlap_passes_on_the_octonion_pair():
    overlap = overlap_from_f4(f4_octonion(zmod(5)))
    report = check_f4_overlap(overlap, budget=4000, seed=1)
    assert report.ok, report.failures()[0].to_dict()
    assert report.notes["long_list_ok"]
    assert report.notes["reduced_list_ok"]
    assert report.notes["well_definedness_ok"]
    assert report.notes["lists_agree"]


def test_identity_overlap_passes_on_the_free_pair():
    report = check_f4_overlap(overlap_from_f4(f4_free()), budget=1200, seed=2)
    assert report.ok, report.failures()[0].to_dict()


def test_perturbed_overlap_fails_the_long_list_but_not_the_reduced_one():
    f4 = f4_chevalley(zmod(5))
    overlap = overlap_from_f4(f4)
    broken_h = dict(overlap.h)
    broken_h[2] = lambda u: AlgebraElement(f4.ring_s, u)  # dropped the lambda twist
    broken = F4OverlapData(
        "broken", overlap.bb_r, overlap.bb_s, broken_h, overlap.f
    )
    report = check_f4_overlap(broken, budget=4000)
    assert not report.ok
    assert not report.notes["long_list_ok"]
    assert report.notes["reduced_list_ok"]
    assert not report.notes["lists_agree"]


def test_truncated_ring_inverts_one_plus_nilpotent():
    ring = truncate_series(bb_orthogonal(zmod(3))).ring
    x = ring.one + ring.element((0, 1, 0))
    assert x ** -1 == ring.element((1, 2, 1))  # 1 - e + e^2
    with pytest.raises(ArithmeticError):
        ring.element((0, 1, 1)) ** -1  # no constant layer


@pytest.mark.parametrize("maker", [bb_orthogonal, bb_symplectic])
def test_truncated_scalar_form_rings_pass(maker):
    truncated = truncate_series(maker(zmod(3)))
    assert len(truncated.delta_elements()) == 27
    report = check_bb_axioms(truncated, budget=6000, seed=3)
    assert report.ok, report.failures()[0].to_dict()


def test_truncated_free_structure_rho_of_phi_layer():
    truncated = truncate_series(bb_free())
    base = truncated.base
    x = base.ring.variable_power(2, 3) + base.ring.variable_power(-1, 1)
    zero = base.ring._zero()
    xe = truncated.ring.element((zero, x.payload, zero))
    assert truncated.rho(truncated.phi(xe)) == xe - xe.star() * truncated.lambda_element
    report = check_bb_axioms(truncated, budget=400, seed=9)
    assert report.ok, report.failures()[0].to_dict()


def test_truncated_f4_pairs_pass():
    report = check_f4_axioms(truncate_series(f4_chevalley(zmod(3))), budget=6000, seed=5)
    assert report.ok, report.failures()[0].to_dict()
    report = check_f4_axioms(truncate_series(f4_free()), budget=700, seed=6)
    assert report.ok, report.failures()[0].to_dict()


def test_truncation_commutes_with_slicing_up_to_the_suites():
    f4 = f4_chevalley(zmod(3))
    sliced_then_truncated = truncate_series(bb_from_f4(f4, "R"))
    truncated_then_sliced = bb_from_f4(truncate_series(f4), "R")
    assert sliced_then_truncated.ring.size == 27
    assert truncated_then_sliced.ring.size == 27
    assert len(sliced_then_truncated.delta_elements()) == 27
    assert len(truncated_then_sliced.delta_elements()) == 27
    report = check_bb_axioms(sliced_then_truncated, budget=5000, seed=8)
    assert report.ok, report.failures()[0].to_dict()
    report = check_bb_axioms(truncated_then_sliced, budget=5000, seed=8)
    assert report.ok, report.failures()[0].to_dict()


def test_truncate_series_rejects_foreign_objects():
    with pytest.raises(TypeError):
        truncate_series(zmod(3))
