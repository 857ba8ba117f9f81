"""Sector transforms, the rescaling constraint, group laws, rays and phases."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

import oracles
from spinor_forge.algebra import GaussianRational, Matrix4, SingularMatrix, build_gamma_basis
from spinor_forge.bilinear import Spinor, bilinears
from spinor_forge.lounesto import LounestoClass, sample_class
from spinor_forge.symmetry import (
    BothBlocksZero,
    LinearlyDependent,
    NotASymmetry,
    ZeroSpinor,
    beta_extract,
    boost_candidate,
    charge_conjugation_candidate,
    compose,
    conjugate_action,
    group_closure,
    inverse,
    named_candidate,
    phase_consistency,
    preserves_class,
    ray_equal,
    rotation_candidate,
    scalar_candidate,
    type6_block,
    verify_rescaling_lemma,
)

EXACT = build_gamma_basis("exact")
I4 = tuple(tuple(Fraction(1 if i == j else 0) for j in range(4)) for i in range(4))


def _diag(entries):
    n = len(entries)
    return tuple(
        tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def _matches_diag(block, entries):
    n = len(entries)
    return all(
        block[i][j] == (entries[i] if i == j else 0) for i in range(n) for j in range(n)
    )


class TestConjugateAction:
    def test_identity_fixes_gamma5(self):
        assert conjugate_action(EXACT.identity, EXACT.gamma5) == EXACT.gamma5

    def test_gamma5_on_identity(self):
        # oracle: direct multiplication gives -I
        ref = oracles.oracle_conjugate_action(oracles.G5, oracles.ID4)
        assert np.abs(ref + np.eye(4)).max() == 0
        assert conjugate_action(EXACT.gamma5, EXACT.identity) == -EXACT.identity

    def test_scalar_pulls_out_modulus_squared(self):
        two = EXACT.identity * GaussianRational(2)
        assert conjugate_action(two, EXACT.gammas[1]) == EXACT.gammas[1] * GaussianRational(4)

    def test_random_against_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            s = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            gamma = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            got = conjugate_action(Matrix4.from_numpy(s), Matrix4.from_numpy(gamma))
            ref = oracles.oracle_conjugate_action(s, gamma)
            assert np.abs(got.to_numpy() - ref).max() <= 1e-12 * np.abs(ref).max()


class TestBetaExtract:
    def test_gamma5_strict_map(self):
        bm = beta_extract(named_candidate("gamma5"))
        assert bm.strict
        assert bm.beta_scalar == -1 and bm.beta_pseudo == -1
        assert _matches_diag(bm.l_vector, [1, 1, 1, 1])
        assert _matches_diag(bm.l_axial, [1, 1, 1, 1])
        assert _matches_diag(bm.l_bivector, [-1] * 6)

    def test_scalar_candidate(self):
        c = GaussianRational(1, 2)  # |c|^2 = 5
        bm = beta_extract(scalar_candidate(c))
        assert bm.strict
        assert bm.beta_scalar == 5 and bm.beta_pseudo == 5
        assert _matches_diag(bm.l_vector, [5] * 4)
        assert _matches_diag(bm.l_bivector, [5] * 6)

    def test_parity_sectorwise(self):
        # oracle: gamma^0 Gamma gamma^0 for each kernel
        bm = beta_extract(named_candidate("gamma0"))
        assert not bm.strict
        assert bm.beta_scalar == 1 and bm.beta_pseudo == -1
        assert _matches_diag(bm.l_vector, [1, -1, -1, -1])
        assert _matches_diag(bm.l_axial, [-1, 1, 1, 1])
        assert _matches_diag(bm.l_bivector, [-1, -1, -1, 1, 1, 1])

    def test_parity_axial_sign_from_oracle(self):
        # K^0 kernel g0 g5 conjugated by parity flips sign; spatial ones do not
        k0 = oracles.G0 @ oracles.G5
        ref = oracles.oracle_conjugate_action(oracles.G0, k0)
        assert np.abs(ref + k0).max() == 0
        k1 = oracles.G1 @ oracles.G5
        ref1 = oracles.oracle_conjugate_action(oracles.G0, k1)
        assert np.abs(ref1 - k1).max() == 0

    def test_sector_leak_raises(self):
        with pytest.raises(NotASymmetry) as err:
            beta_extract(EXACT.identity + EXACT.gammas[1])
        assert err.value.leaks

    def test_semantic_transform_property_exact(self):
        # bilinears(S psi) must equal the sector maps applied to bilinears(psi)
        rng = random.Random(3)
        candidates = [
            named_candidate("gamma5"),
            named_candidate("gamma0"),
            scalar_candidate(GaussianRational(Fraction(2, 3), Fraction(-1, 5))),
            rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5))),
            boost_candidate(3, cosh_sinh=(Fraction(5, 4), Fraction(3, 4))),
        ]
        for cand in candidates:
            bm = beta_extract(cand)
            for seed in range(10):
                psi = sample_class(LounestoClass(1 + seed % 6), rng.getrandbits(32))
                direct = bilinears(cand.apply(psi))
                mapped = bm.apply_to(bilinears(psi))
                assert direct == mapped

    def test_semantic_transform_property_antilinear(self):
        cand = charge_conjugation_candidate()
        bm = beta_extract(cand)
        rng = random.Random(5)
        for seed in range(12):
            psi = sample_class(LounestoClass(1 + seed % 6), rng.getrandbits(32))
            direct = bilinears(cand.apply(psi))
            mapped = bm.apply_to(bilinears(psi))
            assert direct == mapped

    def test_float_candidate(self):
        bm = beta_extract(rotation_candidate((1, 2), theta=0.7))
        assert abs(bm.beta_scalar - 1.0) <= 1e-12
        assert abs(bm.beta_pseudo - 1.0) <= 1e-12
        # vector sector rotates in the 1-2 plane
        assert abs(bm.l_vector[1][1] - math.cos(2 * 0.7)) <= 1e-10


class TestRescalingLemma:
    @pytest.mark.parametrize(
        "factory, alpha, beta",
        [
            (lambda: named_candidate("gamma5"), -1, -1),
            (lambda: scalar_candidate(GaussianRational(1, 2)), 5, 5),
            (lambda: named_candidate("gamma0"), 1, -1),
            (lambda: rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5))), 1, 1),
            (lambda: boost_candidate(1, cosh_sinh=(Fraction(5, 4), Fraction(3, 4))), 1, 1),
        ],
    )
    def test_family(self, factory, alpha, beta):
        rep = verify_rescaling_lemma(factory())
        assert rep.alpha == alpha and rep.beta == beta
        assert rep.holds and rep.determinant_consistent

    def test_singular_rejected(self):
        proj = type6_block(((1, 0), (0, 1)), ((0, 0), (0, 0)), "diag")
        with pytest.raises(SingularMatrix):
            verify_rescaling_lemma(proj)

    def test_float_rotation(self):
        rep = verify_rescaling_lemma(rotation_candidate((2, 3), theta=1.1))
        assert rep.holds and rep.determinant_consistent


class TestClassPreservation:
    def test_gamma5_preserves_every_class(self):
        for cls in range(1, 7):
            report = preserves_class(named_candidate("gamma5"), cls, n=100, seed=cls)
            assert report.passed, report.as_dict()

    def test_scalar_preserves_every_class(self):
        cand = scalar_candidate(GaussianRational(Fraction(-7, 3), Fraction(1, 2)))
        for cls in range(1, 7):
            assert preserves_class(cand, cls, n=100, seed=cls).passed

    def test_lorentz_preserves_every_class(self):
        rot = rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5)))
        boost = boost_candidate(2, cosh_sinh=(Fraction(13, 12), Fraction(5, 12)))
        for cand in (rot, boost):
            for cls in range(1, 7):
                assert preserves_class(cand, cls, n=100, seed=cls).passed

    def test_charge_conjugation_preserves_classes(self):
        cand = charge_conjugation_candidate()
        for cls in range(1, 7):
            assert preserves_class(cand, cls, n=15, seed=cls).passed

    def test_chiral_projector_fails_class1(self):
        proj = type6_block(((1, 0), (0, 1)), ((0, 0), (0, 0)), "diag")
        report = preserves_class(proj, 1, n=25, seed=2)
        assert not report.passed
        assert report.failures or report.zero_current
        assert not report.invertible  # zero-current results are discarded, reported

    def test_float_candidate_preserves(self):
        report = preserves_class(rotation_candidate((1, 3), theta=0.37), 2, n=20, seed=4)
        assert report.passed


class TestGroupOps:
    def test_compose_examples(self):
        g5 = named_candidate("gamma5")
        assert compose(g5, g5).matrix == EXACT.identity
        bm = beta_extract(compose(g5, g5))
        assert bm.beta_scalar == 1 and bm.beta_pseudo == 1

        c = scalar_candidate(GaussianRational(0, 2))  # 2i, |c|^2 = 4
        d = scalar_candidate(GaussianRational(3))
        cd = compose(c, d)
        assert cd.matrix == EXACT.identity * GaussianRational(0, 6)

        g5c = compose(g5, c)
        assert g5c.matrix == EXACT.gamma5 * GaussianRational(0, 2)
        assert beta_extract(g5c).beta_scalar == -4

    def test_inverse_examples(self):
        g5 = named_candidate("gamma5")
        assert inverse(g5).matrix == EXACT.gamma5
        two = scalar_candidate(GaussianRational(2))
        inv = inverse(two)
        assert inv.matrix == EXACT.identity * GaussianRational(Fraction(1, 2))
        assert beta_extract(inv).beta_scalar == Fraction(1, 4)

    def test_inverse_of_singular_raises(self):
        proj = type6_block(((1, 0), (0, 1)), ((0, 0), (0, 0)), "diag")
        with pytest.raises(SingularMatrix):
            inverse(proj)

    def test_type6_blockwise_inverse(self):
        a = ((GaussianRational(2), GaussianRational(0)), (GaussianRational(1), GaussianRational(1)))
        b = ((GaussianRational(0), GaussianRational(1)), (GaussianRational(-1), GaussianRational(0)))
        cand = type6_block(a, b, "diag")
        assert compose(inverse(cand), cand).matrix == EXACT.identity

    def _word_family(self, rng):
        choices = [
            lambda: named_candidate("gamma5"),
            lambda: named_candidate("gamma0"),
            lambda: scalar_candidate(
                GaussianRational(
                    Fraction(rng.randint(1, 5), rng.randint(1, 3)),
                    Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                )
            ),
            lambda: rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5))),
            lambda: boost_candidate(1, cosh_sinh=(Fraction(5, 4), Fraction(3, 4))),
        ]
        return choices[rng.randrange(len(choices))]()

    def test_beta_multiplicativity_exact_words(self):
        rng = random.Random(11)
        for _ in range(100):
            s1 = self._word_family(rng)
            s2 = self._word_family(rng)
            b1, b2 = beta_extract(s1), beta_extract(s2)
            b12 = beta_extract(compose(s1, s2))
            assert b12.beta_scalar == b1.beta_scalar * b2.beta_scalar
            assert b12.beta_pseudo == b1.beta_pseudo * b2.beta_pseudo
            for sector in ("l_vector", "l_axial", "l_bivector"):
                m1 = getattr(b1, sector)
                m2 = getattr(b2, sector)
                m12 = getattr(b12, sector)
                n = len(m12)
                for i in range(n):
                    for j in range(n):
                        prod = sum(m1[i][k] * m2[k][j] for k in range(n))
                        assert m12[i][j] == prod

    def test_beta_multiplicativity_float_words(self):
        rng = random.Random(13)
        for _ in range(30):
            s1 = rotation_candidate((1, 2), theta=rng.uniform(-2, 2))
            s2 = boost_candidate(rng.randint(1, 3), eta=rng.uniform(-1, 1))
            b1, b2 = beta_extract(s1), beta_extract(s2)
            b12 = beta_extract(compose(s1, s2))
            for sector in ("l_vector", "l_axial", "l_bivector"):
                m1 = np.array(getattr(b1, sector))
                m2 = np.array(getattr(b2, sector))
                m12 = np.array(getattr(b12, sector))
                assert np.abs(m12 - m1 @ m2).max() <= 1e-10

    def test_inverse_reciprocity(self):
        rng = random.Random(17)
        for _ in range(40):
            cand = self._word_family(rng)
            b = beta_extract(cand)
            binv = beta_extract(inverse(cand))
            assert b.beta_scalar * binv.beta_scalar == 1
            assert b.beta_pseudo * binv.beta_pseudo == 1
            for sector in ("l_vector", "l_axial", "l_bivector"):
                m = getattr(b, sector)
                minv = getattr(binv, sector)
                n = len(m)
                for i in range(n):
                    for j in range(n):
                        prod = sum(m[i][k] * minv[k][j] for k in range(n))
                        assert prod == (1 if i == j else 0)

    def test_antilinear_composition_flags(self):
        c = charge_conjugation_candidate()
        g5 = named_candidate("gamma5")
        assert compose(c, g5).antilinear
        assert not compose(c, c).antilinear
        # C composed with itself acts as the identity on spinors up to sign
        cc = compose(c, c)
        rng = random.Random(23)
        psi = sample_class(1, rng.getrandbits(32))
        image = cc.apply(psi)
        assert image == psi or image == -psi

    def test_antilinear_inverse(self):
        c = charge_conjugation_candidate()
        cinv = inverse(c)
        rng = random.Random(29)
        psi = sample_class(2, rng.getrandbits(32))
        assert cinv.apply(c.apply(psi)) == psi


class TestType6Block:
    def test_identity_assembly(self):
        cand = type6_block(((1, 0), (0, 1)), ((1, 0), (0, 1)), "diag")
        assert cand.matrix == EXACT.identity

    def test_chiral_projector_keeps_class6(self):
        from spinor_forge.lounesto import classify

        proj = type6_block(((1, 0), (0, 1)), ((0, 0), (0, 0)), "diag")
        psi = Spinor.exact([2, (1, 1), 0, 0])
        image = proj.apply(psi)
        assert image == psi
        assert classify(image) == LounestoClass.SIX

    def test_antidiag_swap_keeps_class6(self):
        from spinor_forge.lounesto import classify

        swap = type6_block(((0, 0), (0, 0)), ((1, 0), (0, 1)), "antidiag")
        psi = Spinor.exact([(1, 2), 3, 0, 0])
        image = swap.apply(psi)
        assert image.components[2:] == psi.components[:2]
        assert classify(image) == LounestoClass.SIX

    def test_both_zero_rejected(self):
        with pytest.raises(BothBlocksZero):
            type6_block(((0, 0), (0, 0)), ((0, 0), (0, 0)), "diag")


class TestRays:
    def test_phase_multiple_is_same_ray(self):
        psi = Spinor.exact([1, (0, 2), 3, 0])
        assert ray_equal(psi, psi * GaussianRational(0, 1))

    def test_scale_two_is_not(self):
        psi = Spinor.exact([1, (0, 2), 3, 0])
        assert not ray_equal(psi, psi * GaussianRational(2))

    def test_non_proportional(self):
        assert not ray_equal(Spinor.exact([1, 0, 0, 0]), Spinor.exact([0, 1, 0, 0]))

    def test_rational_unit_phase(self):
        psi = Spinor.exact([1, 2, (3, -1), 0])
        z = GaussianRational(Fraction(3, 5), Fraction(4, 5))
        assert ray_equal(psi, psi * z)

    def test_zero_rejected(self):
        with pytest.raises(ZeroSpinor):
            ray_equal(Spinor.exact([0, 0, 0, 0]), Spinor.exact([1, 0, 0, 0]))

    def test_float_mode(self):
        psi = Spinor.from_complex([1, 2j, 0.5, 0])
        assert ray_equal(psi, psi * complex(np.exp(0.3j)))
        assert not ray_equal(psi, psi * 1.01)


class TestRayType:
    def test_equality_up_to_phase(self):
        from spinor_forge.symmetry import Ray

        psi = Spinor.exact([1, (0, 2), 3, 0])
        assert Ray(psi) == Ray(psi * GaussianRational(0, -1))
        assert Ray(psi) != Ray(psi * GaussianRational(2))
        assert Ray(psi).contains(psi * GaussianRational(-1))

    def test_zero_rejected(self):
        from spinor_forge.symmetry import Ray

        with pytest.raises(ZeroSpinor):
            Ray(Spinor.exact([0, 0, 0, 0]))


class TestPhaseConsistency:
    PSI_M = Spinor.exact([1, 0, 0, 0])
    PSI_N = Spinor.exact([0, 1, 0, 0])

    def test_common_phase(self):
        assert phase_consistency(self.PSI_M, self.PSI_N, math.pi / 3, math.pi / 3) == math.pi / 3

    def test_distinct_phases(self):
        assert phase_consistency(self.PSI_M, self.PSI_N, 0.0, math.pi) is None

    def test_mod_two_pi(self):
        phi = 0.7
        assert phase_consistency(self.PSI_M, self.PSI_N, phi, phi + 2 * math.pi) == phi

    def test_dependent_rejected(self):
        with pytest.raises(LinearlyDependent):
            phase_consistency(self.PSI_M, self.PSI_M * GaussianRational(0, 3), 0.0, 0.0)

    def test_grid(self):
        # common phase exists exactly on the diagonal of an angle grid
        n = 16
        for jm in range(n):
            for jn in range(n):
                phi_m = 2 * math.pi * jm / n
                phi_n = 2 * math.pi * jn / n
                got = phase_consistency(self.PSI_M, self.PSI_N, phi_m, phi_n)
                if jm == jn:
                    assert got == phi_m
                else:
                    assert got is None


class TestGroupClosure:
    def test_central_extension_closes(self):
        gens = [
            named_candidate("gamma5"),
            named_candidate("-identity"),
            named_candidate("identity"),
        ]
        report = group_closure(gens, max_word_len=4)
        assert report.size == 4
        assert report.closed and report.product_closed and report.inverse_closed
        assert report.associative

    def test_rational_rotation_does_not_close(self):
        rot = rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5)))
        report = group_closure([rot], max_word_len=4)
        assert not report.closed

    def test_parity_gamma5_group(self):
        report = group_closure(
            [named_candidate("gamma0"), named_candidate("-identity")], max_word_len=4
        )
        assert report.closed
        assert report.size == 4  # {g0, -I, -g0, I}

    def test_float_generators(self):
        rot = rotation_candidate((1, 2), theta=math.pi / 2)
        report = group_closure([rot], max_word_len=4, tol=1e-9)
        assert report.size == 4
        assert report.closed
