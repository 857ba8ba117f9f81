"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside the pytest verdicts.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

import oracles
from spinor_forge.algebra import GaussianRational
from spinor_forge.bilinear import Spinor, bilinears, fpk_residuals
from spinor_forge.lounesto import LounestoClass, classify, random_spinor, sample_class
from spinor_forge.symmetry import (
    beta_extract,
    boost_candidate,
    compose,
    group_closure,
    inverse,
    named_candidate,
    phase_consistency,
    rotation_candidate,
    scalar_candidate,
    verify_rescaling_lemma,
)
from spinor_forge.dynamics import (
    AvatarMap,
    ExoticTheta,
    MassiveInput,
    exotic_density_check,
    liouville_check,
    massive_flow_report,
)


def _report(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def test_criterion_1_fpk_exactness():
    rng = random.Random(2024)
    start = time.perf_counter()
    worst = 0
    for _ in range(10_000):
        res = fpk_residuals(bilinears(random_spinor(rng)))
        if res.max_abs > worst:
            worst = res.max_abs
    elapsed = time.perf_counter() - start
    _report(
        "criterion 1: FPK residuals exactly zero on 1e4 random exact spinors",
        worst == 0 and elapsed < 30.0,
        f"max residual {worst}, {elapsed:.1f}s",
    )


def test_criterion_2_classification_round_trip():
    start = time.perf_counter()
    for cls in LounestoClass:
        for seed in range(1000):
            psi = sample_class(cls, seed)
            assert classify(psi) == cls
    canonical = [
        ([1, 0, 0, 0], 6),
        ([1, 0, 1, 0], 3),
        ([1, 0, 0, 1], 5),
    ]
    oracles_agree = all(
        oracles.oracle_classify(comps) == expected
        and int(classify(Spinor.exact(comps))) == expected
        for comps, expected in canonical
    )
    elapsed = time.perf_counter() - start
    _report(
        "criterion 2: 6 x 1000 sampler round trip plus canonical cases",
        oracles_agree and elapsed < 60.0,
        f"{elapsed:.1f}s",
    )


def test_criterion_3_symmetry_engine():
    ok = True
    detail = []

    bm5 = beta_extract(named_candidate("gamma5"))
    ok &= bm5.strict and bm5.beta_scalar == -1 and bm5.beta_pseudo == -1
    ok &= all(bm5.l_vector[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))
    ok &= all(bm5.l_axial[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))
    ok &= all(bm5.l_bivector[i][j] == (-1 if i == j else 0) for i in range(6) for j in range(6))
    detail.append("gamma5 (-1,-1,+I4,+I4,-I6)")

    c = GaussianRational(Fraction(2, 3), Fraction(-1, 2))
    bmc = beta_extract(scalar_candidate(c))
    mod2 = c.abs_sq()
    ok &= bmc.strict and bmc.beta_scalar == mod2 and bmc.beta_pseudo == mod2
    ok &= all(bmc.l_vector[i][i] == mod2 for i in range(4))
    ok &= all(bmc.l_bivector[i][i] == mod2 for i in range(6))
    detail.append(f"cI all-|c|^2={mod2}")

    # parity: sector transforms frozen from the direct-conjugation oracle
    bmp = beta_extract(named_candidate("gamma0"))
    vec_expect = [1, -1, -1, -1]
    ok &= all(
        bmp.l_vector[i][j] == (vec_expect[i] if i == j else 0)
        for i in range(4)
        for j in range(4)
    )
    axial_oracle = []
    for mu in range(4):
        kernel = oracles.G[mu] @ oracles.G5
        image = oracles.oracle_conjugate_action(oracles.G0, kernel)
        sign = 1 if np.abs(image - kernel).max() == 0 else -1
        if sign == -1:
            assert np.abs(image + kernel).max() == 0
        axial_oracle.append(sign)
    ok &= axial_oracle == [-1, 1, 1, 1]
    ok &= all(
        bmp.l_axial[i][j] == (axial_oracle[i] if i == j else 0)
        for i in range(4)
        for j in range(4)
    )
    detail.append("parity L_J=diag(1,-1,-1,-1), L_K=oracle diag(-1,1,1,1)")

    for cand in (
        named_candidate("gamma5"),
        scalar_candidate(c),
        named_candidate("gamma0"),
    ):
        rep = verify_rescaling_lemma(cand)
        ok &= rep.holds and rep.determinant_consistent
        ok &= rep.alpha == rep.beta or rep.alpha == -rep.beta
    detail.append("alpha = +/-beta exact")

    _report("criterion 3: symmetry engine sector maps", bool(ok), "; ".join(detail))


def _exact_generator(rng):
    pick = rng.randrange(5)
    if pick == 0:
        return named_candidate("gamma5")
    if pick == 1:
        return named_candidate("gamma0")
    if pick == 2:
        return scalar_candidate(
            GaussianRational(
                Fraction(rng.randint(1, 4), rng.randint(1, 3)),
                Fraction(rng.randint(-2, 2), rng.randint(1, 3)),
            )
        )
    if pick == 3:
        return rotation_candidate((1, 2), cos_sin=(Fraction(3, 5), Fraction(4, 5)))
    return boost_candidate(1, cosh_sinh=(Fraction(5, 4), Fraction(3, 4)))


def _sector_product_matches(b1, b2, b12, exact, tol=1e-10):
    for attr in ("beta_scalar", "beta_pseudo"):
        v1, v2, v12 = getattr(b1, attr), getattr(b2, attr), getattr(b12, attr)
        if exact:
            if v12 != v1 * v2:
                return False
        elif abs(v12 - v1 * v2) > tol:
            return False
    for sector in ("l_vector", "l_axial", "l_bivector"):
        e1, e2, e12 = getattr(b1, sector), getattr(b2, sector), getattr(b12, sector)
        n = len(e12)
        if exact:
            for i in range(n):
                for j in range(n):
                    if e12[i][j] != sum(e1[i][k] * e2[k][j] for k in range(n)):
                        return False
        else:
            m1 = np.array(e1, dtype=float)
            m2 = np.array(e2, dtype=float)
            m12 = np.array(e12, dtype=float)
            if np.abs(m12 - m1 @ m2).max() > tol:
                return False
    return True


def test_criterion_4_group_laws():
    rng = random.Random(99)
    ok = True
    for _ in range(100):
        s1, s2 = _exact_generator(rng), _exact_generator(rng)
        b1, b2 = beta_extract(s1), beta_extract(s2)
        b12 = beta_extract(compose(s1, s2))
        ok &= _sector_product_matches(b1, b2, b12, exact=True)
        binv = beta_extract(inverse(s1))
        ok &= b1.beta_scalar * binv.beta_scalar == 1
        ok &= b1.beta_pseudo * binv.beta_pseudo == 1

    for _ in range(100):
        s1 = rotation_candidate((1, 2), theta=rng.uniform(-2, 2))
        s2 = boost_candidate(rng.randint(1, 3), eta=rng.uniform(-1, 1))
        b1, b2 = beta_extract(s1), beta_extract(s2)
        b12 = beta_extract(compose(s1, s2))
        ok &= _sector_product_matches(b1, b2, b12, exact=False)

    closure = group_closure(
        [
            named_candidate("gamma5"),
            named_candidate("-identity"),
            named_candidate("identity"),
        ],
        max_word_len=4,
    )
    ok &= closure.size == 4 and closure.closed
    _report(
        "criterion 4: beta multiplicativity, inverse reciprocity, 4-element closure",
        bool(ok),
        f"closure size {closure.size}",
    )


def test_criterion_5_massless_liouville():
    ok = True
    worst = 0.0
    phis = [AvatarMap.identity()] + [AvatarMap.random_commutant(1000 + k) for k in range(5)]
    for k, phi in enumerate(phis):
        rep = liouville_check([1.0, 0.0, 0.0, 1.0], phi=phi, n_points=100, h=1e-4, seed=k)
        worst = max(worst, rep.max_divergence, rep.rho_rel_drift)
        ok &= rep.passed and rep.max_divergence <= 1e-6 and rep.rho_rel_drift <= 1e-6
    _report(
        "criterion 5: massless flow divergence and integrated rho over [0,1]",
        bool(ok),
        f"worst {worst:.2e} over {len(phis)} avatar maps",
    )


def test_criterion_6_exotic_density():
    kappa = 0.3  # configuration value for the growth-rate check
    rep = exotic_density_check(ExoticTheta.linear(kappa), t_span=(0.0, 1.0), dt=1e-3)
    ok = rep.passed and rep.max_rate_deviation <= 1e-4
    ok &= abs(rep.rho_normalized_final - math.exp(kappa)) <= 1e-4

    rep0 = exotic_density_check(ExoticTheta.zero(), t_span=(0.0, 1.0), dt=1e-3)
    ok &= abs(rep0.rho[-1] - rep0.rho[0]) <= 1e-8
    _report(
        "criterion 6: normalized d(ln rho)/dt = kappa and flat-theta recovery",
        bool(ok),
        f"rate dev {rep.max_rate_deviation:.2e}, rho drift {abs(rep0.rho[-1]-rep0.rho[0]):.2e}",
    )


def test_criterion_7_phase_grid():
    psi_m = Spinor.exact([1, 0, 2, 0])
    psi_n = Spinor.exact([0, 1, 0, (0, 1)])
    n = 64
    ok = True
    for jm in range(n):
        for jn in range(n):
            phi_m = 2 * math.pi * jm / n
            phi_n = 2 * math.pi * jn / n
            got = phase_consistency(psi_m, psi_n, phi_m, phi_n)
            want = phi_m if jm == jn else None
            ok &= got == want
    _report("criterion 7: common phase exists iff angles agree mod 2pi (64x64)", bool(ok))


def test_criterion_8_massive_case():
    p = [2.0, 0.0, 0.0, 1.0]
    m = math.sqrt(3.0)
    refused = False
    try:
        liouville_check(p, m=m)
    except MassiveInput:
        refused = True
    rep = massive_flow_report(p, m)
    recorded = (not rep.asserted) and math.isfinite(rep.max_divergence)
    _report(
        "criterion 8: massive input refused, divergence recorded without assertion",
        refused and recorded,
        f"recorded max divergence {rep.max_divergence:.2e}",
    )
