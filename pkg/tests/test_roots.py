"""Root system construction, cone combinatorics, folding maps."""

from __future__ import annotations

from itertools import combinations, permutations

import pytest

from rootforge.roots import (
    ClosedSubset,
    UnsupportedRootSystemError,
    build_root_system,
    coroot_coords,
    extreme_roots,
    f4_duality,
    fold_map,
    height,
    highest_root,
    interval,
    is_right_extreme,
    is_special_closed,
    parse_label,
    reflect,
    right_extreme_order,
    weyl_orbit,
    _in_cone,
    _solve_nonneg,
)


def test_root_counts_match_the_closed_form_for_every_supported_type():
    expected = {
        "A1": 2, "A2": 6, "A3": 12, "A4": 20,
        "B2": 8, "B3": 18, "B4": 32,
        "C2": 8, "C3": 18, "C4": 32,
        "BC1": 4, "BC2": 12, "BC3": 24,
        "D4": 24, "D5": 40, "D6": 60,
        "E6": 72, "E7": 126, "E8": 240,
        "F4": 48,
    }
    for label, count in expected.items():
        system = build_root_system(label)
        assert len(system) == count, label
        assert len(system.positive) * 2 == count, label
        assert len(set(system.roots)) == count, label


def test_illegal_type_rank_combinations_are_rejected_with_a_typed_error():
    for label in ["B1", "C1", "D3", "D2", "E5", "E9", "F3", "F5", "A0", "G2", "H3", "X4"]:
        with pytest.raises(UnsupportedRootSystemError):
            build_root_system(label)
    with pytest.raises(UnsupportedRootSystemError):
        build_root_system("E", 4)
    with pytest.raises(UnsupportedRootSystemError):
        build_root_system("B3", 4)  # rank contradicts the label


def test_parse_label_splits_family_and_rank():
    assert parse_label("BC2") == ("BC", 2)
    assert parse_label("E7") == ("E", 7)
    assert parse_label("A12") == ("A", 12)
    with pytest.raises(UnsupportedRootSystemError):
        parse_label("B")


def test_systems_are_interned_and_roots_compare_by_identity():
    first = build_root_system("B", 3)
    second = build_root_system("B3")
    assert first is second
    assert first.root((2, 0, 0)) is second.root((2, 0, 0))


def test_every_root_has_its_negative_and_integral_cartan_numbers():
    for label in ["A3", "B3", "C3", "BC3", "D4", "F4"]:
        system = build_root_system(label)
        for alpha in system.roots:
            assert (-alpha) in system
            for beta in system.roots:
                alpha.cartan(beta)  # raises on a non-integral value


def test_reflections_stay_inside_the_system_and_are_involutions():
    for label in ["B3", "F4", "BC2", "D4", "E6"]:
        system = build_root_system(label)
        for alpha in system.roots:
            for beta in system.roots:
                image = system.reflect(alpha, beta)
                assert image in system
                assert system.reflect(alpha, image) == beta


def test_reflection_values_in_small_systems():
    a3 = build_root_system("A3")
    e12 = a3.root((2, -2, 0, 0))
    e23 = a3.root((0, 2, -2, 0))
    assert reflect(a3, e12, e12) == -e12
    assert reflect(a3, e12, e23) == a3.root((2, 0, -2, 0))

    b2 = build_root_system("B2")
    e1 = b2.root((2, 0))
    assert reflect(b2, e1, b2.root((2, 2))) == b2.root((-2, 2))


def test_heights_and_highest_roots_match_the_coxeter_numbers():
    # height of the highest root is one less than the Coxeter number
    expected = {"A3": 3, "B3": 5, "C3": 5, "D4": 5, "E6": 11, "E7": 17, "E8": 29, "F4": 11}
    for label, top in expected.items():
        system = build_root_system(label)
        assert highest_root(system).height == top
        assert max(height(r) for r in system.roots) == top
        for alpha in system.base:
            assert alpha.height == 1


def test_base_coefficients_reconstruct_each_root_with_one_sign():
    for label in ["B3", "F4", "E7", "BC2"]:
        system = build_root_system(label)
        for root in system.roots:
            coeffs = system.coefficients(root)
            assert all(c >= 0 for c in coeffs) or all(c <= 0 for c in coeffs)
            recon = [0] * system.dim
            for c, alpha in zip(coeffs, system.base):
                for k in range(system.dim):
                    recon[k] += c * alpha.coords[k]
            assert tuple(recon) == root.coords


def test_long_and_short_classification():
    b3 = build_root_system("B3")
    assert sum(r.is_long for r in b3.roots) == 12
    assert sum(r.is_short for r in b3.roots) == 6
    a2 = build_root_system("A2")
    assert all(r.is_long and r.is_short for r in a2.roots)
    bc2 = build_root_system("BC2")
    # three lengths: 4 doubled roots are long, 4 axis roots short, 8 diagonal neither
    assert sum(r.is_long for r in bc2.roots) == 4
    assert sum(r.is_short for r in bc2.roots) == 4


def test_interval_examples_in_small_rank():
    a3 = build_root_system("A3")
    assert interval(a3, a3.root((2, -2, 0, 0)), a3.root((0, 2, -2, 0))) == (
        a3.root((2, 0, -2, 0)),
    )
    b3 = build_root_system("B3")
    e1 = b3.root((2, 0, 0))
    e2 = b3.root((0, 2, 0))
    assert interval(b3, b3.root((2, -2, 0)), e2) == (e1, b3.root((2, 2, 0)))
    b2 = build_root_system("B2")
    assert interval(b2, b2.root((2, 0)), b2.root((0, 2))) == (b2.root((2, 2)),)


def test_interval_rejects_parallel_inputs():
    b3 = build_root_system("B3")
    e1 = b3.root((2, 0, 0))
    with pytest.raises(ValueError):
        interval(b3, e1, -e1)
    bc2 = build_root_system("BC2")
    with pytest.raises(ValueError):
        interval(bc2, bc2.root((2, 0)), bc2.root((4, 0)))


def test_interval_agrees_with_simplex_cone_membership_on_all_pairs():
    # Independent oracle: strict cone membership via the phase-1 simplex.
    for label in ["B3", "F4"]:
        system = build_root_system(label)
        for alpha, beta in permutations(system.roots, 2):
            try:
                found = interval(system, alpha, beta)
            except ValueError:
                continue
            inside = set()
            for gamma in system.roots:
                x = _solve_nonneg([alpha.coords, beta.coords], gamma.coords)
                if x is not None and x[0] > 0 and x[1] > 0:
                    inside.add(gamma)
            assert set(found) == inside, (label, alpha, beta)
            # sorted by increasing angle from alpha
            coeffs = [system.cone_coefficients(alpha, beta, g) for g in found]
            ratios = [b / a for a, b in coeffs]
            assert ratios == sorted(ratios)


def test_interval_reversal_gives_the_opposite_order():
    for label in ["B3", "F4", "A3"]:
        system = build_root_system(label)
        for alpha, beta in permutations(system.roots, 2):
            try:
                forward = interval(system, alpha, beta)
            except ValueError:
                continue
            assert forward == tuple(reversed(interval(system, beta, alpha)))


def test_interval_in_bc_orders_codirectional_roots_by_length():
    bc2 = build_root_system("BC2")
    alpha = bc2.root((2, -2))
    beta = bc2.root((0, 2))
    members = interval(bc2, alpha, beta)
    assert [r.coords for r in members] == [(2, 0), (4, 0), (2, 2)]


def test_weyl_orbits_split_by_length():
    b3 = build_root_system("B3")
    short = weyl_orbit(b3, b3.root((2, 0, 0)))
    long = weyl_orbit(b3, b3.root((2, 2, 0)))
    assert len(short) == 6 and all(r.is_short for r in short)
    assert len(long) == 12 and all(r.is_long for r in long)
    f4 = build_root_system("F4")
    assert len(weyl_orbit(f4, f4.root((2, 0, 0, 0)))) == 24
    assert len(weyl_orbit(f4, f4.root((2, 2, 0, 0)))) == 24
    e8 = build_root_system("E8")
    assert len(weyl_orbit(e8, e8.highest_root)) == 240


def test_closed_antisymmetric_set_need_not_be_special_closed():
    # {e1+e2, e1-e2} is closed and has no opposite pair, but e1 sits in its cone
    b2 = build_root_system("B2")
    subset = ClosedSubset(b2, [b2.root((2, 2)), b2.root((2, -2))])
    assert not is_special_closed(subset)
    assert _in_cone([(2, 2), (2, -2)], (2, 0))


def test_positive_roots_form_a_special_closed_subset():
    for label in ["A2", "B3", "BC2", "F4"]:
        system = build_root_system(label)
        subset = ClosedSubset(system, system.positive)
        assert is_special_closed(subset)
        assert not is_special_closed(ClosedSubset(system, system.roots))


def test_from_cone_collects_exactly_the_cone_roots():
    b3 = build_root_system("B3")
    alpha = b3.root((2, -2, 0))
    beta = b3.root((0, 2, 0))
    subset = ClosedSubset.from_cone(b3, [alpha, beta])
    assert set(subset.roots) == {alpha, beta, b3.root((2, 0, 0)), b3.root((2, 2, 0))}
    assert subset.is_special_closed()


def test_from_cone_rejects_generators_with_an_opposite_pair():
    b3 = build_root_system("B3")
    e1 = b3.root((2, 0, 0))
    with pytest.raises(ValueError):
        ClosedSubset.from_cone(b3, [e1, -e1])


def test_extreme_roots_of_the_positive_cone_are_the_simple_roots():
    for label in ["A3", "B3", "F4"]:
        system = build_root_system(label)
        subset = ClosedSubset(system, system.positive)
        assert set(extreme_roots(subset)) == set(system.base)


def test_right_extreme_order_examples():
    a2 = build_root_system("A2")
    e12 = a2.root((2, -2, 0))
    e13 = a2.root((2, 0, -2))
    e23 = a2.root((0, 2, -2))
    subset = ClosedSubset(a2, [e12, e13, e23])
    # the middle root e1-e3 is interior, so it may never come last
    assert is_right_extreme(subset, (e12, e13, e23))
    assert is_right_extreme(subset, (e23, e13, e12))
    assert not is_right_extreme(subset, (e12, e23, e13))
    assert not is_right_extreme(subset, (e13, e23))  # not a permutation
    produced = right_extreme_order(subset)
    assert is_right_extreme(subset, produced.sequence)


def test_right_extreme_order_rejects_non_special_subsets():
    b2 = build_root_system("B2")
    subset = ClosedSubset(b2, [b2.root((2, 2)), b2.root((2, -2))])
    with pytest.raises(ValueError):
        right_extreme_order(subset)


def test_right_extreme_order_on_every_two_root_cone_of_b3_and_f4():
    for label in ["B3", "F4"]:
        system = build_root_system(label)
        for alpha, beta in combinations(system.roots, 2):
            if alpha.dot(beta) ** 2 == alpha.norm2 * beta.norm2:
                continue  # parallel or antiparallel
            subset = ClosedSubset.from_cone(system, [alpha, beta])
            assert set(subset.roots) == {alpha, beta} | set(system.interval(alpha, beta))
            order = right_extreme_order(subset)
            assert is_right_extreme(subset, order.sequence)
            assert order.position(order[0]) == 0 and len(order) == len(subset)


def test_truncating_a_right_extreme_order_keeps_it_special_closed():
    b3 = build_root_system("B3")
    subset = ClosedSubset(b3, b3.positive)
    order = list(right_extreme_order(subset))
    while order:
        assert is_special_closed(ClosedSubset(b3, order))
        order.pop()


def test_fold_maps_exist_exactly_for_the_four_supported_pairs():
    for pair in [("E7", "C3"), ("E8", "F4"), ("E7", "F4"), ("E6", "F4")]:
        fold = fold_map(*pair)
        assert fold.source.label == pair[0] and fold.target.label == pair[1]
    with pytest.raises(UnsupportedRootSystemError):
        fold_map("E8", "C3")
    with pytest.raises(UnsupportedRootSystemError):
        fold_map("E6", "B3")


def test_fold_kernels_have_the_documented_subsystem_types():
    assert fold_map("E7", "C3").kernel_type == "D4"
    assert fold_map("E8", "F4").kernel_type == "D4"
    assert fold_map("E7", "F4").kernel_type == "3A1"
    assert fold_map("E6", "F4").kernel_type == "empty"
    kernel = fold_map("E7", "F4").kernel
    assert {r.coords for r in kernel} == {
        (0, 0, 0, 0, 2, 2, 0, 0), (0, 0, 0, 0, -2, -2, 0, 0),
        (0, 0, 0, 0, 2, -2, 0, 0), (0, 0, 0, 0, -2, 2, 0, 0),
        (0, 0, 0, 0, 0, 0, 2, -2), (0, 0, 0, 0, 0, 0, -2, 2),
    }


def test_fold_images_on_defining_vectors():
    fold = fold_map("E7", "C3")
    c3 = fold.target
    assert fold.image(fold.source.root((0, 0, 0, 0, 2, 2, 0, 0))) == c3.root((4, 0, 0))
    assert fold.image(fold.source.root((0, 0, 0, 0, 2, -2, 0, 0))) == c3.root((0, 4, 0))
    assert fold.image(fold.source.root((0, 0, 0, 0, 0, 0, 2, -2))) == c3.root((0, 0, 4))
    assert fold.image(fold.source.root((2, -2, 0, 0, 0, 0, 0, 0))) is None

    to_f4 = fold_map("E8", "F4")
    assert to_f4.image(to_f4.source.root((2, -2, 0, 0, 0, 0, 0, 0))) == to_f4.target.root(
        (2, -2, 0, 0)
    )
    assert to_f4.image(to_f4.source.root((2, 0, 0, 0, 0, 0, 0, -2))) == to_f4.target.root(
        (2, 0, 0, 0)
    )


def test_fold_fibers_partition_the_source_and_match_by_length():
    for pair, short_size in [
        (("E7", "C3"), 8),
        (("E8", "F4"), 8),
        (("E7", "F4"), 4),
        (("E6", "F4"), 2),
    ]:
        fold = fold_map(*pair)
        total = sum(len(fold.fiber(t)) for t in fold.target.roots) + len(fold.kernel)
        assert total == len(fold.source)
        for t in fold.target.roots:
            assert len(fold.fiber(t)) == (1 if t.is_long else short_size)


def test_fold_respects_root_addition():
    fold = fold_map("E8", "F4")
    source, target = fold.source, fold.target
    for alpha in source.positive[:40]:
        for beta in source.positive[:40]:
            total = source.sum_root(alpha, beta)
            if total is None:
                continue
            a, b, t = fold.image(alpha), fold.image(beta), fold.image(total)
            summed = None
            if a is not None and b is not None:
                summed = target.root_or_none(
                    tuple(x + y for x, y in zip(a.coords, b.coords))
                )
            if a is None:
                assert t == b
            elif b is None:
                assert t == a
            elif t is None:
                assert all(x + y == 0 for x, y in zip(a.coords, b.coords))
            else:
                assert t == summed


def test_fold_weyl_families_are_orthogonal_and_maximal():
    for pair in [("E7", "C3"), ("E8", "F4"), ("E7", "F4"), ("E6", "F4")]:
        fold = fold_map(*pair)
        for t in fold.target.roots:
            family = fold.weyl_family(t)
            assert len(family) == (1 if t.is_long else 2)
            for a, b in combinations(family, 2):
                assert a.is_orthogonal(b)
            # maximal: no fiber root is orthogonal to the whole family
            for other in fold.fiber(t):
                if other not in family:
                    assert any(not other.is_orthogonal(f) for f in family)


def test_f4_duality_is_a_length_swapping_involution():
    f4 = build_root_system("F4")
    tau = f4_duality(f4)
    assert len(tau) == 48
    for root in f4.roots:
        assert tau[tau[root]] == root
        assert root.is_long != tau[root].is_long
        assert tau[-root] == -tau[root]
    base = f4.base
    assert tau[base[0]] == base[3] and tau[base[1]] == base[2]
    with pytest.raises(UnsupportedRootSystemError):
        f4_duality(build_root_system("B3"))


def test_coroot_coordinates():
    c3 = build_root_system("C3")
    assert coroot_coords(c3.root((4, 0, 0))) == (2, 0, 0)
    assert coroot_coords(c3.root((2, 2, 0))) == (2, 2, 0)
    b3 = build_root_system("B3")
    assert coroot_coords(b3.root((2, 0, 0))) == (4, 0, 0)
    a2 = build_root_system("A2")
    for r in a2.roots:
        assert coroot_coords(r) == r.coords
    # the coroots of C3 are exactly the roots of B3 in the same coordinates
    assert {coroot_coords(r) for r in c3.roots} == {r.coords for r in b3.roots}


def test_json_export_shape_and_determinism():
    b3 = build_root_system("B3")
    data = b3.to_json()
    assert data["type"] == "B" and data["rank"] == 3
    assert sorted(data["roots"]) == data["roots"]
    assert len(data["roots"]) == 18 and len(data["long"]) == 18
    assert sum(data["long"]) == 12
    assert data == build_root_system("B3").to_json()
    assert build_root_system("E7").to_json()["type"] == "E7"
