"""Tests for the structure-constant tables and torus/Weyl actions."""

from __future__ import annotations

import random
from itertools import product

import pytest

from rootforge.algebra import integers, zmod
from rootforge.chevalley import (
    StructureConstants,
    TorusElement,
    bracket_vec,
    chevalley_commutator,
    compute_structure_constants,
    torus_conjugate,
)
from rootforge.roots import UnsupportedRootSystemError, build_root_system


def test_tables_reject_non_reduced_and_rank_one_systems():
    with pytest.raises(UnsupportedRootSystemError):
        compute_structure_constants(build_root_system("BC", 3))
    with pytest.raises(UnsupportedRootSystemError):
        compute_structure_constants(build_root_system("A", 1))


def test_tables_are_cached_per_system():
    first = compute_structure_constants(build_root_system("A", 2))
    second = compute_structure_constants(build_root_system("A", 2))
    assert first is second


@pytest.mark.parametrize("label", ["A2", "B2", "B3", "C3", "D4", "F4"])
def test_single_constants_have_chain_magnitudes_and_symmetries(label):
    system = build_root_system(label)
    constants = compute_structure_constants(system)
    for alpha in system.roots:
        for beta in system.roots:
            if alpha is beta or alpha == -beta:
                continue
            if system.sum_root(alpha, beta) is None:
                continue
            n = constants.n11(alpha, beta)
            assert abs(n) == constants.chain_down(alpha, beta) + 1
            assert constants.n11(beta, alpha) == -n
            assert constants.n11(-alpha, -beta) == -n


def test_extraspecial_decompositions_carry_positive_constants():
    system = build_root_system("F4")
    constants = compute_structure_constants(system)
    for gamma in system.positive:
        if gamma in system.base:
            continue
        r, s = constants.extraspecial_pair(gamma)
        assert system.is_positive(r) and system.is_positive(s)
        assert system.sum_root(r, s) == gamma
        assert constants.n11(r, s) == constants.chain_down(r, s) + 1


def _jacobi_defect(constants, x, y, z):
    inner = bracket_vec(constants, {y: 1}, {z: 1})
    total = bracket_vec(constants, {x: 1}, inner)
    inner = bracket_vec(constants, {z: 1}, {x: 1})
    for key, val in bracket_vec(constants, {y: 1}, inner).items():
        total[key] = total.get(key, 0) + val
    inner = bracket_vec(constants, {x: 1}, {y: 1})
    for key, val in bracket_vec(constants, {z: 1}, inner).items():
        total[key] = total.get(key, 0) + val
    return {k: v for k, v in total.items() if v}


def _basis_keys(system):
    keys = [("e", root) for root in system.roots]
    keys.extend(("h", i) for i in range(system.rank))
    return keys


@pytest.mark.parametrize("label", ["A2", "B2", "B3"])
def test_jacobi_identity_holds_on_every_basis_triple(label):
    system = build_root_system(label)
    constants = compute_structure_constants(system)
    keys = _basis_keys(system)
    for x, y, z in product(keys, repeat=3):
        assert not _jacobi_defect(constants, x, y, z)


@pytest.mark.parametrize("label,samples", [("C3", 4000), ("D4", 4000),
                                           ("F4", 4000), ("E6", 1200),
                                           ("E7", 800), ("E8", 500)])
def test_jacobi_identity_holds_on_sampled_basis_triples(label, samples):
    system = build_root_system(label)
    constants = compute_structure_constants(system)
    keys = _basis_keys(system)
    rng = random.Random(20)
    for _ in range(samples):
        x, y, z = (rng.choice(keys) for _ in range(3))
        assert not _jacobi_defect(constants, x, y, z)


def test_opposite_root_vectors_bracket_to_integral_coroots():
    system = build_root_system("F4")
    constants = compute_structure_constants(system)
    from rootforge.roots import coroot_coords, dot

    for gamma in system.roots:
        coeffs = constants.coroot_coefficients(gamma)
        recon = [
            sum(c * coroot_coords(b)[k] for c, b in zip(coeffs, system.base))
            for k in range(system.dim)
        ]
        assert tuple(recon) == coroot_coords(gamma)
        vec = constants.basis_bracket(("e", gamma), ("e", -gamma))
        assert vec == {("h", i): c for i, c in enumerate(coeffs) if c}


@pytest.mark.parametrize("label", ["A2", "B3"])
def test_weyl_action_reflects_roots_with_unit_signs(label):
    system = build_root_system(label)
    constants = compute_structure_constants(system)
    for alpha in system.roots:
        for beta in system.roots:
            image, sign = constants.weyl_action(alpha, beta)
            assert image == system.reflect(alpha, beta)
            assert sign in (1, -1)
            assert constants.d[(alpha, beta)] == sign


def test_weyl_action_on_f4_sampled_pairs():
    system = build_root_system("F4")
    constants = compute_structure_constants(system)
    rng = random.Random(21)
    for _ in range(300):
        alpha, beta = rng.choice(system.roots), rng.choice(system.roots)
        image, sign = constants.weyl_action(alpha, beta)
        assert image == system.reflect(alpha, beta) and sign in (1, -1)


def test_squared_weyl_elements_act_as_coroot_signs():
    system = build_root_system("B3")
    constants = compute_structure_constants(system)
    for alpha in system.roots:
        for beta in system.roots:
            reflected = system.reflect(alpha, beta)
            square_sign = constants.d[(alpha, beta)] * constants.d[(alpha, reflected)]
            assert square_sign == (-1) ** beta.cartan(alpha)


def test_braid_products_of_weyl_actions_return_to_the_identity():
    system = build_root_system("A2")
    constants = compute_structure_constants(system)
    a, b = system.base
    for beta in system.roots:
        current, sign = beta, 1
        for alpha in (a, b, a, b, a, b):
            current, step = constants.weyl_action(alpha, current)
            sign *= step
        assert current == beta and sign == 1


def test_commutator_terms_are_ordered_by_angle_and_complete():
    system = build_root_system("B2")
    constants = compute_structure_constants(system)
    short = system.root((2, 0))
    long_neg = system.root((-2, 2))
    terms = constants.pair_terms(short, long_neg)
    gammas = [g for g, _, _, _ in terms]
    assert gammas == [system.root((2, 2)), system.root((0, 2))]
    assert [(i, j) for _, i, j, _ in terms] == [(2, 1), (1, 1)]
    with pytest.raises(ValueError):
        constants.pair_terms(short, short)
    with pytest.raises(ValueError):
        constants.pair_terms(short, -short)
    assert constants.pair_terms(system.root((2, 2)), system.root((2, 0))) == ()


def test_commutator_words_evaluate_over_modular_coefficients():
    system = build_root_system("A3")
    constants = compute_structure_constants(system)
    ring = zmod(5)
    alpha = system.root((2, -2, 0, 0))
    beta = system.root((0, 2, -2, 0))
    x, y = ring.from_int(2), ring.from_int(3)
    word = chevalley_commutator(constants, alpha, beta, x, y)
    assert len(word) == 1
    gamma, value = word[0]
    assert gamma == system.root((2, 0, -2, 0))
    n = constants.n11(alpha, beta)
    assert abs(n) == 1 and value == ring.from_int(6 * n)


def test_commutator_words_include_the_doubled_term_for_short_pairs():
    system = build_root_system("B2")
    constants = compute_structure_constants(system)
    e1 = system.root((2, 0))
    e2 = system.root((0, 2))
    x, y = integers().from_int(2), integers().from_int(3)
    word = chevalley_commutator(constants, e1, e2, x, y)
    # [t_{e1}(x), t_{e2}(y)] lands in the long roots e1+e2 only
    assert [g.coords for g, _ in word] == [(2, 2)]
    short_sum = constants.n11(e1, e2)
    assert word[0][1] == integers().from_int(6 * short_sum)

    long_root = system.root((-2, 2))
    word = chevalley_commutator(constants, e1, long_root, x, y)
    assert [g.coords for g, _ in word] == [(2, 2), (0, 2)]
    doubled = word[0][1]
    assert doubled == integers().from_int(
        constants.n11(e1, long_root) * constants.n11(e1, system.root((0, 2))) // 2 * 4 * 3
    )


def test_torus_entries_are_multiplicative_over_root_addition():
    system = build_root_system("B2")
    ring = zmod(5)
    torus = TorusElement(system, [ring.from_int(2), ring.from_int(3)])
    for alpha in system.roots:
        for beta in system.roots:
            total = system.sum_root(alpha, beta)
            if total is None:
                continue
            assert torus.entries[total] == torus.entries[alpha] * torus.entries[beta]


def test_torus_conjugation_scales_the_argument():
    system = build_root_system("B2")
    ring = zmod(5)
    torus = TorusElement(system, [ring.from_int(2), ring.from_int(3)])
    alpha = system.base[0]
    root, value = torus_conjugate(torus, alpha, ring.from_int(3))
    assert root == alpha and value == ring.from_int(6)
    identity = TorusElement.identity(system)
    for alpha in system.roots:
        assert identity.entries[alpha] == 1


def test_torus_values_on_negative_roots_require_inverses():
    system = build_root_system("A2")
    with pytest.raises(ArithmeticError):
        TorusElement(system, [2, 3])  # 2, 3 are not invertible integers
    torus = TorusElement(system, [zmod(5).from_int(2), zmod(5).from_int(3)])
    alpha = system.base[0]
    assert torus.entries[-alpha] == zmod(5).from_int(3)  # 2^{-1} mod 5
