import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcalim.groups import (
    Character,
    DepthOverflowError,
    GroupMismatchError,
    Neighborhood,
    add,
    annihilator_contains,
    arg_of,
    char_eval,
    character,
    coordinate_arg,
    cyclic_subgroup,
    digits_of,
    elements_close,
    from_angle,
    from_base_angle,
    from_digits,
    from_int,
    from_turns,
    full_subgroup,
    h_trunc,
    identity,
    in_nbhd,
    lambda_subgroup,
    local_inner,
    neg,
    padic_group,
    padic_metric,
    scale,
    solenoid_group,
    solenoid_lift,
    solenoid_project,
    torus_group,
    trivial_subgroup,
)

from conftest import random_element

T = torus_group()


class TestConstruction:
    def test_identity_torus(self):
        assert arg_of(identity(T)) == 0.0

    def test_identity_padic(self):
        g = padic_group(2, 3)
        assert digits_of(identity(g)) == (0, 0, 0, 0)

    def test_identity_solenoid(self):
        g = solenoid_group(2, 2)
        assert identity(g).turns == 0.0

    def test_prime_validation(self):
        with pytest.raises(ValueError, match="not prime"):
            padic_group(4)
        with pytest.raises(ValueError, match="not prime"):
            solenoid_group(1)

    def test_digit_range_validation(self):
        g = padic_group(3, 1)
        with pytest.raises(ValueError, match="digit"):
            from_digits(g, (3, 0))

    def test_angle_canonicalized(self):
        x = from_angle(T, 7.0)
        assert -math.pi <= arg_of(x) < math.pi

    def test_minus_pi_is_half_open_boundary(self):
        # arg of -1 is -pi, never +pi
        x = from_angle(T, math.pi)
        assert arg_of(x) == -math.pi


class TestAdd:
    def test_padic_add_carries(self):
        # big-integer oracle: 5 + 2 = 7 mod 9 -> digits (1, 2) base 3
        g = padic_group(3, 1)
        z = add(from_digits(g, (2, 1)), from_digits(g, (2, 0)))
        assert digits_of(z) == (1, 2)

    def test_padic_add_matches_integer_oracle(self, rng):
        g = padic_group(5, 6)
        for _ in range(200):
            a, b = int(rng.integers(0, g.modulus)), int(rng.integers(0, g.modulus))
            z = add(from_int(g, a), from_int(g, b))
            assert z.residue == (a + b) % g.modulus

    def test_torus_add_wraps(self):
        # mod-2pi oracle: 3.0 + 1.0 = 4.0 - 2pi
        z = add(from_angle(T, 3.0), from_angle(T, 1.0))
        assert arg_of(z) == pytest.approx(4.0 - 2.0 * math.pi, abs=1e-15)

    def test_add_identity(self, any_group, rng):
        for _ in range(50):
            x = random_element(any_group, rng)
            assert elements_close(add(x, identity(any_group)), x)

    def test_mismatched_groups_rejected(self):
        with pytest.raises(GroupMismatchError):
            add(identity(T), identity(padic_group(2, 3)))
        with pytest.raises(GroupMismatchError):
            add(identity(padic_group(2, 3)), identity(padic_group(2, 4)))


class TestNeg:
    def test_torus(self):
        assert arg_of(neg(from_angle(T, 0.3))) == pytest.approx(-0.3, abs=1e-15)

    def test_padic_complement(self):
        # oracle: p^(D+1) - 1 = 7 -> digits (1, 1, 1)
        g = padic_group(2, 2)
        assert digits_of(neg(from_digits(g, (1, 0, 0)))) == (1, 1, 1)

    def test_neg_identity(self, any_group):
        assert neg(identity(any_group)) == identity(any_group)

    def test_inverse_law(self, any_group, rng):
        for _ in range(100):
            x = random_element(any_group, rng)
            assert elements_close(add(x, neg(x)), identity(any_group))


class TestGroupAxioms:
    """Bulk randomized axioms, 1e4 pairs/triples per group."""

    N = 10_000

    def test_axioms(self, any_group):
        rng = np.random.default_rng(7211)
        g = any_group
        e = identity(g)
        for _ in range(self.N):
            x = random_element(g, rng)
            y = random_element(g, rng)
            z = random_element(g, rng)
            assert add(x, y) == add(y, x)
            lhs, rhs = add(add(x, y), z), add(x, add(y, z))
            if g.kind == "padic":
                assert lhs == rhs
                assert add(x, neg(x)) == e
            else:
                assert elements_close(lhs, rhs, 1e-12)
                assert elements_close(add(x, neg(x)), e, 1e-12)
            assert add(x, e) == x


class TestArgAndH:
    def test_arg_basic(self):
        assert arg_of(from_angle(T, math.pi / 3)) == pytest.approx(math.pi / 3)
        assert arg_of(identity(T)) == 0.0

    def test_arg_requires_torus(self):
        with pytest.raises(ValueError):
            arg_of(identity(padic_group(2, 2)))

    @pytest.mark.parametrize(
        "t,expected",
        [
            (0.3, 0.3),
            (2.0, math.pi - 2.0),
            (4.0, 0.0),
            (-4.0, 0.0),
            (math.pi, 0.0),
            (-math.pi, 0.0),
            (-2.0, 2.0 - math.pi),
            (math.pi / 2, math.pi / 2),
            (-math.pi / 2, -math.pi / 2),
        ],
    )
    def test_h_piecewise(self, t, expected):
        assert h_trunc(t) == pytest.approx(expected, abs=1e-15)

    @given(st.floats(-10.0, 10.0))
    def test_h_odd_inside_domain(self, t):
        # oddness holds wherever both t and -t are inside [-pi, pi)
        if abs(t) < math.pi:
            assert h_trunc(-t) == pytest.approx(-h_trunc(t), abs=1e-15)

    @given(st.floats(-10.0, 10.0))
    def test_h_bounded(self, t):
        assert abs(h_trunc(t)) <= math.pi / 2


class TestCharEval:
    def test_torus_example(self):
        z = char_eval(character(T, 3), from_angle(T, math.pi / 6))
        assert z == pytest.approx(1j, abs=1e-12)

    def test_padic_example(self):
        g = padic_group(2, 1)
        z = char_eval(character(g, 1, 1), from_digits(g, (1, 1)))
        assert z == pytest.approx(-1j, abs=1e-12)

    def test_trivial_character(self, any_group, rng):
        chi = character(any_group, 0)
        for _ in range(20):
            assert char_eval(chi, random_element(any_group, rng)) == pytest.approx(1.0)

    def test_depth_overflow(self):
        g = padic_group(2, 2)
        with pytest.raises(DepthOverflowError):
            char_eval(character(g, 1, 3), identity(g))
        gs = solenoid_group(2, 2)
        with pytest.raises(DepthOverflowError):
            char_eval(character(gs, 1, 5), identity(gs))

    def test_padic_index_range(self):
        g = padic_group(2, 3)
        with pytest.raises(ValueError):
            character(g, 4, 1)

    def test_modulus_one(self, any_group, rng):
        for _ in range(200):
            chi = _random_char(any_group, rng)
            x = random_element(any_group, rng)
            assert abs(abs(char_eval(chi, x)) - 1.0) <= 1e-12

    def test_homomorphism(self, any_group, rng):
        for _ in range(500):
            chi = _random_char(any_group, rng)
            x = random_element(any_group, rng)
            y = random_element(any_group, rng)
            lhs = char_eval(chi, add(x, y))
            rhs = char_eval(chi, x) * char_eval(chi, y)
            assert abs(lhs - rhs) <= 1e-10

    def test_multiplicative_in_index(self, rng):
        # chi_{l1} * chi_{l2} = chi_{l1+l2} on the torus
        for _ in range(100):
            l1, l2 = int(rng.integers(-8, 9)), int(rng.integers(-8, 9))
            x = random_element(T, rng)
            lhs = char_eval(character(T, l1 + l2), x)
            rhs = char_eval(character(T, l1), x) * char_eval(character(T, l2), x)
            assert abs(lhs - rhs) <= 1e-10

    def test_solenoid_depth_refinement(self, rng):
        # chi_{d,l} = chi_{d+1, p*l} under y_d = y_{d+1}^p
        g = solenoid_group(3, 5)
        for _ in range(100):
            x = random_element(g, rng)
            d = int(rng.integers(0, 4))
            ell = int(rng.integers(-6, 7))
            lhs = char_eval(character(g, ell, d), x)
            rhs = char_eval(character(g, 3 * ell, d + 1), x)
            assert abs(lhs - rhs) <= 1e-10


def _random_char(group, rng) -> Character:
    if group.kind == "torus":
        return character(group, int(rng.integers(-8, 9)))
    d = int(rng.integers(0, min(3, group.depth) + 1))
    if group.kind == "padic":
        return character(group, int(rng.integers(0, group.p ** (d + 1))), d)
    return character(group, int(rng.integers(-8, 9)), d)


class TestLocalInner:
    def test_torus_example(self):
        g = local_inner(from_angle(T, 2.0), character(T, 3))
        assert g == pytest.approx(3.0 * (math.pi - 2.0), abs=1e-12)

    def test_padic_vanishes(self, rng):
        g = padic_group(3, 4)
        for _ in range(20):
            chi = _random_char(g, rng)
            assert local_inner(random_element(g, rng), chi) == 0.0

    def test_solenoid_example(self):
        g = solenoid_group(2, 2)
        x = from_base_angle(g, 0.4)
        assert local_inner(x, character(g, 2, 1)) == pytest.approx(0.4, abs=1e-12)

    def test_integer_slope_exact_torus(self, rng):
        # g(x, chi_l) is exactly l times g(x, chi_1), bit for bit
        for _ in range(200):
            x = random_element(T, rng)
            ell = int(rng.integers(-10, 11))
            assert local_inner(x, character(T, ell)) == ell * local_inner(
                x, character(T, 1)
            )

    def test_additive_in_index_torus(self, rng):
        # the sum form incurs independent roundings of the two summands, so
        # the error bound scales with their magnitudes, not the result's
        for _ in range(200):
            x = random_element(T, rng)
            l1, l2 = int(rng.integers(-10, 11)), int(rng.integers(-10, 11))
            lhs = local_inner(x, character(T, l1 + l2))
            rhs = local_inner(x, character(T, l1)) + local_inner(x, character(T, l2))
            h = abs(local_inner(x, character(T, 1)))
            assert abs(lhs - rhs) <= (abs(l1) + abs(l2) + 1) * h * 3e-16

    def test_additive_in_index_solenoid_shared_depth(self, rng):
        g = solenoid_group(2, 5)
        for _ in range(200):
            x = random_element(g, rng)
            d = int(rng.integers(0, 4))
            l1, l2 = int(rng.integers(-10, 11)), int(rng.integers(-10, 11))
            lhs = local_inner(x, character(g, l1 + l2, d))
            rhs = local_inner(x, character(g, l1, d)) + local_inner(x, character(g, l2, d))
            h = abs(local_inner(x, character(g, 1, d)))
            assert abs(lhs - rhs) <= (abs(l1) + abs(l2) + 1) * h * 3e-16

    def test_odd(self, any_group, rng):
        for _ in range(200):
            x = random_element(any_group, rng)
            chi = _random_char(any_group, rng)
            assert local_inner(neg(x), chi) == pytest.approx(
                -local_inner(x, chi), abs=1e-14
            )


class TestLocalIdentity:
    """chi(x) = exp(i g(x, chi)) near the identity."""

    def test_torus(self, rng):
        for _ in range(500):
            theta = float(rng.uniform(-math.pi / 2, math.pi / 2))
            ell = int(rng.integers(-8, 9))
            x = from_angle(T, theta)
            chi = character(T, ell)
            expected = complex(
                math.cos(local_inner(x, chi)), math.sin(local_inner(x, chi))
            )
            assert abs(char_eval(chi, x) - expected) <= 1e-10

    def test_solenoid(self, rng):
        g = solenoid_group(2, 6)
        for _ in range(500):
            d = int(rng.integers(0, 4))
            ell = int(rng.integers(-8, 9))
            u = float(rng.uniform(-math.pi / (2 * 2**d), math.pi / (2 * 2**d)))
            x = from_turns(g, (u / (2 * math.pi)) / 2 ** (g.depth - d))
            chi = character(g, ell, d)
            gval = local_inner(x, chi)
            expected = complex(math.cos(gval), math.sin(gval))
            assert abs(char_eval(chi, x) - expected) <= 1e-10

    def test_padic_identity_on_annihilating_subgroup(self):
        # chi_{d,l} is exactly 1 on lambda(d+1): enumerate all of it
        g = padic_group(2, 4)
        for d in range(3):
            for ell in range(2 ** (d + 1)):
                chi = character(g, ell, d)
                for free in range(2 ** (g.depth - d)):
                    x = from_int(g, free * 2 ** (d + 1))
                    assert char_eval(chi, x) == pytest.approx(1.0, abs=1e-12)


class TestNeighborhoods:
    def test_torus_membership(self):
        U = Neighborhood(T, eps=0.2)
        assert in_nbhd(from_angle(T, 0.1), U)
        assert not in_nbhd(from_angle(T, 0.3), U)

    def test_padic_membership(self):
        g = padic_group(2, 2)
        x = from_digits(g, (0, 1, 0))
        assert in_nbhd(x, Neighborhood(g, rank=1))
        assert not in_nbhd(x, Neighborhood(g, rank=2))

    def test_identity_in_everything(self, any_group):
        if any_group.kind == "padic":
            U = Neighborhood(any_group, rank=2)
        elif any_group.kind == "torus":
            U = Neighborhood(any_group, eps=0.01)
        else:
            U = Neighborhood(any_group, eps=0.01, d=2)
        assert in_nbhd(identity(any_group), U)

    def test_solenoid_checks_all_coordinates(self):
        g = solenoid_group(2, 4)
        # base coordinate angle large, deep coordinate small
        x = from_turns(g, 0.3 / 2**4)
        assert abs(coordinate_arg(x, 4)) < 0.2
        assert not in_nbhd(x, Neighborhood(g, eps=0.2, d=4))

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            Neighborhood(T, eps=0.0)
        with pytest.raises(ValueError):
            Neighborhood(T, eps=4.0)


class TestPadicMetric:
    def test_examples(self):
        g = padic_group(2, 6)
        x = from_digits(g, (1, 0, 1, 0, 0, 0, 0))
        assert padic_metric(x, x) == 0.0
        y = from_digits(g, (1, 0, 0, 0, 0, 0, 0))
        assert padic_metric(x, y) == 0.25
        z = from_digits(g, (0, 0, 1, 0, 0, 0, 0))
        assert padic_metric(x, z) == 1.0

    def test_requires_padic(self):
        with pytest.raises(ValueError):
            padic_metric(identity(T), identity(T))

    def test_invariance_and_triangle(self, rng):
        g = padic_group(3, 6)
        for _ in range(2000):
            x, y, z = (random_element(g, rng) for _ in range(3))
            assert padic_metric(add(x, z), add(y, z)) == padic_metric(x, y)
            assert padic_metric(x, y) <= padic_metric(x, z) + padic_metric(z, y)

    def test_ultrametric(self, rng):
        g = padic_group(2, 8)
        for _ in range(2000):
            x, y, z = (random_element(g, rng) for _ in range(3))
            assert padic_metric(x, y) <= max(padic_metric(x, z), padic_metric(z, y))


class TestAnnihilator:
    def test_torus_divisibility(self):
        H3 = cyclic_subgroup(T, 3)
        assert annihilator_contains(H3, character(T, 6))
        assert not annihilator_contains(H3, character(T, 4))

    def test_torus_full(self):
        assert annihilator_contains(full_subgroup(T), character(T, 0))
        assert not annihilator_contains(full_subgroup(T), character(T, 1))

    def test_trivial_subgroup_annihilates_nothing(self, any_group, rng):
        H = trivial_subgroup(any_group)
        for _ in range(20):
            assert annihilator_contains(H, _random_char(any_group, rng))

    def test_padic_example(self):
        g = padic_group(2, 4)
        assert annihilator_contains(lambda_subgroup(g, 1), character(g, 2, 1))
        assert not annihilator_contains(lambda_subgroup(g, 1), character(g, 1, 1))

    def test_padic_matches_enumeration_oracle(self):
        # brute-force: chi annihilates lambda(r) iff chi is 1 on all of it
        g = padic_group(2, 4)
        for r in range(0, 4):
            for d in range(0, 3):
                for ell in range(2 ** (d + 1)):
                    chi = character(g, ell, d)
                    brute = all(
                        abs(char_eval(chi, from_int(g, u * 2**r)) - 1.0) < 1e-9
                        for u in range(2 ** (g.depth + 1 - r))
                    )
                    assert annihilator_contains(lambda_subgroup(g, r), chi) == brute

    def test_torus_matches_enumeration_oracle(self):
        for r in range(1, 8):
            H = cyclic_subgroup(T, r)
            for ell in range(-12, 13):
                chi = character(T, ell)
                brute = all(
                    abs(char_eval(chi, from_turns(T, j / r - round(j / r))) - 1.0) < 1e-9
                    for j in range(r)
                )
                assert annihilator_contains(H, chi) == brute

    def test_solenoid(self):
        g = solenoid_group(2, 3)
        assert annihilator_contains(full_subgroup(g), character(g, 0, 2))
        assert not annihilator_contains(full_subgroup(g), character(g, 1, 2))
        # l = p*l' at depth d equals l' at depth d-1, still nontrivial
        assert not annihilator_contains(full_subgroup(g), character(g, 2, 1))


class TestSolenoidLift:
    def test_branch_zero(self):
        g = solenoid_group(2, 3)
        x = from_angle(g, 0.4)
        y = solenoid_lift(x, 0)
        assert y.group.depth == 4
        assert coordinate_arg(y, 4) == pytest.approx(0.2, abs=1e-15)

    def test_branch_one_canonicalized(self):
        g = solenoid_group(2, 3)
        y = solenoid_lift(from_angle(g, 0.4), 1)
        assert coordinate_arg(y, 4) == pytest.approx(0.2 + math.pi - 2 * math.pi, abs=1e-12)

    def test_round_trip(self, rng):
        g = solenoid_group(3, 2)
        for _ in range(100):
            x = random_element(g, rng)
            k = int(rng.integers(0, 3))
            assert elements_close(solenoid_project(solenoid_lift(x, k)), x, 1e-12)

    def test_lift_consistent_coordinates(self, rng):
        # lifting must not disturb the coordinates already tracked
        g = solenoid_group(2, 3)
        for _ in range(50):
            x = random_element(g, rng)
            y = solenoid_lift(x, int(rng.integers(0, 2)))
            for j in range(4):
                assert coordinate_arg(y, j) == pytest.approx(
                    coordinate_arg(x, j), abs=1e-12
                )

    def test_branch_out_of_range(self):
        g = solenoid_group(2, 3)
        with pytest.raises(ValueError):
            solenoid_lift(identity(g), 2)


class TestScale:
    def test_matches_repeated_addition(self, any_group, rng):
        for _ in range(100):
            x = random_element(any_group, rng)
            k = int(rng.integers(0, 20))
            acc = identity(any_group)
            for _ in range(k):
                acc = add(acc, x)
            assert elements_close(scale(k, x), acc, 1e-12)

    def test_negative_scale(self, any_group, rng):
        x = random_element(any_group, rng)
        assert elements_close(scale(-3, x), neg(scale(3, x)), 1e-12)
