"""The acceptance suite: eleven self-contained checks, each exercising one
headline behaviour of the package at a pinned tolerance.  Used both by the
``lcalim selftest`` subcommand and by the pytest acceptance tests.

Each criterion returns (passed, detail); nothing here depends on wall
clock, environment or external data, and the Monte Carlo check pins its
master seed, so the whole suite is deterministic.
"""

from __future__ import annotations

import math

import numpy as np

from .arrays import (
    BernoulliArray,
    IIDSymmetricArray,
    RademacherArray,
    linear,
    power,
    row_distribution,
    row_ft_exact,
    sum_cylinder,
    symmetric_stat,
)
from .groups import (
    character,
    char_eval,
    from_angle,
    from_int,
    from_turns,
    full_subgroup,
    identity,
    local_inner,
    neg,
    padic_group,
    solenoid_group,
    torus_group,
)
from .measures import (
    QuadraticFormParam,
    compound_poisson_law,
    convolve,
    cpoisson_ft,
    cylinder_mass,
    discrete_measure,
    gauss_law,
    genpoisson_ft,
    haar_law,
    limit_law_ft,
    local_mean,
    measure_ft,
    point_mass,
    qform_eval,
    scale_measure,
    validate_levy,
)
from .sampling import SeededStream, empirical_ft
from .verify import VerifySettings, check_theorem, compound_growth, crosscheck_gensym2, trend_classify

WIDE_GRID = (100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000, 100_000_000)


def _torus_clt_array() -> RademacherArray:
    return RademacherArray(torus_group(), K=linear(1.0), angle=power(1.0, -0.5))


def _padic_poisson_array() -> BernoulliArray:
    g = padic_group(2)
    return BernoulliArray(g, from_int(g, 1), p=power(2.0, -1.0), K=linear(1.0))


def _padic_chars(g, max_d):
    return [
        character(g, l, d) for d in range(max_d + 1) for l in range(g.p ** (d + 1))
    ]


def criterion_1():
    """Torus Rademacher CLT: exact row FT against the Gauss law at n=1e6,
    and a passing theorem check."""
    g = torus_group()
    array = _torus_clt_array()
    worst = 0.0
    for ell in (1, 2, 3):
        got = row_ft_exact(array, 10**6, character(g, ell))
        worst = max(worst, abs(got - math.exp(-(ell**2) / 2.0)))
    settings = VerifySettings(characters=tuple(character(g, l) for l in (1, 2, 3)))
    report = check_theorem(array, gauss_law(g, 1.0), settings)
    ok = worst <= 5e-4 and report.passed()
    return ok, f"max |FT - exp(-l^2/2)| = {worst:.3g} (<= 5e-4), verdict {report.overall}"


def criterion_2():
    """Torus Haar limit: row FT collapses at every nontrivial character and
    the moment-gap sequences diverge."""
    g = torus_group()
    array = RademacherArray(g, K=linear(1.0), angle=power(1.0, -0.25))
    worst = max(abs(row_ft_exact(array, 10**4, character(g, l))) for l in range(1, 6))
    diverged = True
    for ell in range(1, 6):
        seq = [(n, symmetric_stat(array, n, character(g, ell))) for n in WIDE_GRID]
        diverged = diverged and trend_classify(seq).kind == "diverges"
    ok = worst <= 1e-6 and diverged
    return ok, f"max |FT| at n=1e4 = {worst:.3g} (<= 1e-6), gaps diverge: {diverged}"


def criterion_3():
    """Bernoulli-Poisson limit on the 2-adic integers: exact row FT against
    the compound Poisson target for every character of depth <= 2."""
    array = _padic_poisson_array()
    g = array.group
    x = array.x
    n = 10**5
    worst = 0.0
    for chi in _padic_chars(g, 2):
        target = np.exp(2.0 * (char_eval(chi, x) - 1.0))
        worst = max(worst, abs(row_ft_exact(array, n, chi) - target))
    # the character sending x to -1 pins the classical value exp(-4)
    chi_minus = character(g, 1, 0)
    spot = abs(row_ft_exact(array, n, chi_minus) - math.exp(-4.0))
    law = compound_poisson_law(scale_measure(point_mass(x), 2.0))
    settings = VerifySettings(characters=tuple(_padic_chars(g, 2)))
    report = check_theorem(array, law, settings)
    ok = worst <= 1e-3 and spot <= 1e-3 and report.passed()
    return ok, f"max |FT - e(2dx)^| = {worst:.3g} (<= 1e-3), verdict {report.overall}"


def criterion_4():
    """Bernoulli-Haar limit on the 2-adic integers: row FT vanishes at every
    nontrivial character and the Haar FT is its indicator."""
    g = padic_group(2)
    array = BernoulliArray(g, from_int(g, 1), p=power(1.0, -0.5), K=linear(1.0))
    law = haar_law(full_subgroup(g))
    n = 10**6
    worst = 0.0
    indicator_ok = True
    for chi in _padic_chars(g, 2):
        ft = limit_law_ft(law, chi)
        if chi.ell == 0:
            indicator_ok = indicator_ok and ft == 1.0
        else:
            indicator_ok = indicator_ok and ft == 0.0
            worst = max(worst, abs(row_ft_exact(array, n, chi)))
    ok = worst <= 1e-3 and indicator_ok
    return ok, f"max nontrivial |FT| = {worst:.3g} (<= 1e-3), Haar indicator exact: {indicator_ok}"


def criterion_5():
    """Solenoid Rademacher CLT: exact row FT against the Gauss law across
    depths 0..2."""
    g = solenoid_group(2)
    array = RademacherArray(g, K=linear(1.0), angle=power(1.0, -0.5))
    n = 10**6
    worst = 0.0
    for d in (0, 1, 2):
        for ell in range(-3, 4):
            target = math.exp(-(ell**2) / 2.0 ** (2 * d + 1))
            got = row_ft_exact(array, n, character(g, ell, d))
            worst = max(worst, abs(got - target))
    spot = abs(row_ft_exact(array, n, character(g, 1, 1)) - math.exp(-0.125))
    ok = worst <= 5e-4 and spot <= 5e-4
    return ok, f"max |FT - exp(-l^2/2^(2d+1))| = {worst:.3g} (<= 5e-4)"


def criterion_6():
    """Equivalence of the three characterizations on five symmetric torus
    instances: three convergent, two divergent, verdicts mutually
    consistent on each."""
    g = torus_group()

    def three_point(n: int):
        x = from_angle(g, 1.0 / math.sqrt(n))
        return row_distribution(g, [(x, 0.25), (neg(x), 0.25), (identity(g), 0.5)])

    instances = [
        (RademacherArray(g, K=linear(1.0), angle=power(1.0, -0.5)), 1.0, True),
        (RademacherArray(g, K=linear(1.0), angle=power(0.5, -0.5)), 0.25, True),
        (IIDSymmetricArray(g, three_point, K=linear(1.0)), 0.5, True),
        (RademacherArray(g, K=linear(1.0), angle=power(1.0, -0.25)), 1.0, False),
        (RademacherArray(g, K=linear(1.0), angle=power(1.0, -0.1)), 1.0, False),
    ]
    details = []
    ok = True
    for i, (array, b, should_pass) in enumerate(instances, start=1):
        report = crosscheck_gensym2(array, b)
        verdicts = (report.ft_passed, report.moment_passed, report.levy_passed)
        ok = ok and report.consistent and report.ft_passed == should_pass
        details.append(f"#{i}:{'/'.join('P' if v else 'F' for v in verdicts)}")
    return ok, "routes (ft/moment/levy) " + " ".join(details)


def criterion_7():
    """Measure-factor identities on 1e3 random finite Levy measures per
    group: shift identity, convolution multiplicativity, parallelogram."""
    rng = np.random.default_rng(20240117)
    worst_shift = 0.0
    worst_conv = 0.0
    groups = (torus_group(), padic_group(2), solenoid_group(2, depth=6))
    for g in groups:
        chars = _spread_chars(g)
        for _ in range(1000):
            eta = validate_levy(_random_measure(g, rng, allow_identity=False))
            mu1 = _random_measure(g, rng, allow_identity=True)
            mu2 = _random_measure(g, rng, allow_identity=True)
            conv = convolve(mu1, mu2)
            m = local_mean(eta.measure)
            for chi in chars:
                lhs = cpoisson_ft(eta.measure, chi)
                rhs = genpoisson_ft(eta, chi) * char_eval(chi, m)
                worst_shift = max(worst_shift, abs(lhs - rhs))
                gap = abs(measure_ft(conv, chi) - measure_ft(mu1, chi) * measure_ft(mu2, chi))
                worst_conv = max(worst_conv, gap)
    parallelogram_ok = _parallelogram_exact()
    ok = worst_shift <= 1e-10 and worst_conv <= 1e-10 and parallelogram_ok
    return ok, (
        f"shift gap {worst_shift:.2g}, convolution gap {worst_conv:.2g} (<= 1e-10), "
        f"parallelogram exact: {parallelogram_ok}"
    )


def _spread_chars(g):
    if g.kind == "torus":
        return [character(g, l) for l in (-5, -1, 1, 2, 7)]
    if g.kind == "padic":
        return [character(g, 1, 0), character(g, 3, 1), character(g, 5, 2)]
    return [character(g, 1, 0), character(g, -2, 1), character(g, 3, 2)]


def _random_measure(g, rng, allow_identity: bool):
    k = int(rng.integers(1, 5))
    atoms = []
    for _ in range(k):
        w = float(rng.uniform(0.05, 2.0))
        if g.kind == "padic":
            lo = 0 if allow_identity else 1
            atoms.append((from_int(g, int(rng.integers(lo, 4096))), w))
        else:
            t = float(rng.uniform(-0.5, 0.5))
            if not allow_identity and abs(t) < 1e-6:
                t += 0.25
            atoms.append((from_turns(g, t), w))
    return discrete_measure(g, atoms)


def _parallelogram_exact() -> bool:
    gt = torus_group()
    gs = solenoid_group(2, depth=6)
    for b in (0.25, 0.5, 1.0, 2.0):
        qt = QuadraticFormParam(gt, b)
        qs = QuadraticFormParam(gs, b)
        for l1 in range(-12, 13):
            for l2 in range(-12, 13):
                lhs = qform_eval(qt, character(gt, l1 + l2)) + qform_eval(
                    qt, character(gt, l1 - l2)
                )
                rhs = 2.0 * (
                    qform_eval(qt, character(gt, l1)) + qform_eval(qt, character(gt, l2))
                )
                if lhs != rhs:
                    return False
        # cross-depth solenoid pairs through the common refinement
        for d1, l1 in ((0, 3), (1, 2), (2, 5)):
            for d2, l2 in ((0, 1), (1, 3), (2, 7)):
                d = max(d1, d2)
                r1 = l1 * 2 ** (d - d1)
                r2 = l2 * 2 ** (d - d2)
                lhs = qform_eval(qs, character(gs, r1 + r2, d)) + qform_eval(
                    qs, character(gs, r1 - r2, d)
                )
                rhs = 2.0 * (
                    qform_eval(qs, character(gs, l1, d1))
                    + qform_eval(qs, character(gs, l2, d2))
                )
                if lhs != rhs:
                    return False
    return True


def criterion_8():
    """Two-sided moment inequality, sampled where the character equals the
    exponential of the local inner product and |g| <= pi/2.

    Angles are kept >= 1e-3 so the comparison is not dominated by the
    floating cancellation of 1 - cos at machine scale.
    """
    rng = np.random.default_rng(8)
    total = 0
    violations = 0
    gt = torus_group()
    while total < 40_000:
        theta = float(rng.uniform(-math.pi / 2, math.pi / 2))
        ell = int(rng.integers(-8, 9))
        x = from_angle(gt, theta)
        gval = local_inner(x, character(gt, ell))
        if not 1e-3 <= abs(gval) <= math.pi / 2:
            continue
        total += 1
        one_minus = 1.0 - char_eval(character(gt, ell), x).real
        if not (0.25 * gval**2 <= one_minus <= 0.5 * gval**2):
            violations += 1
    gp = padic_group(2)
    for _ in range(20_000):
        d = int(rng.integers(0, 4))
        ell = int(rng.integers(0, 2 ** (d + 1)))
        chi = character(gp, ell, d)
        x = from_int(gp, int(rng.integers(0, 2 ** (gp.depth - d))) * 2 ** (d + 1))
        gval = local_inner(x, chi)
        one_minus = 1.0 - char_eval(chi, x).real
        total += 1
        if not (0.25 * gval**2 <= one_minus <= 0.5 * gval**2):
            violations += 1
    gs = solenoid_group(2, depth=8)
    while total < 100_000:
        d = int(rng.integers(0, 4))
        ell = int(rng.integers(-8, 9))
        u = float(rng.uniform(-math.pi / (2 * 2**d), math.pi / (2 * 2**d)))
        x = from_turns(gs, (u / (2 * math.pi)) / 2 ** (gs.depth - d))
        chi = character(gs, ell, d)
        gval = local_inner(x, chi)
        if not 1e-3 <= abs(gval) <= math.pi / 2:
            continue
        total += 1
        one_minus = 1.0 - char_eval(chi, x).real
        if not (0.25 * gval**2 <= one_minus <= 0.5 * gval**2):
            violations += 1
    ok = violations == 0 and total >= 100_000
    return ok, f"{violations} violations in {total} samples"


def criterion_9():
    """Compound-growth oracle: (1 + a/n)^n within relative 1e-4 of exp(a)
    at n=1e6, and exactly 0 at a=-n."""
    n = 10**6
    worst = 0.0
    for a in range(-5, 6):
        rel = abs(compound_growth(float(a), n) - math.exp(a)) / math.exp(a)
        worst = max(worst, rel)
    exact_zero = compound_growth(-float(n), n) == 0.0
    ok = worst <= 1e-4 and exact_zero
    return ok, f"max rel err {worst:.3g} (<= 1e-4), exact zero at alpha=-n: {exact_zero}"


def criterion_10():
    """Monte Carlo cross-validation of the exact engine on the criterion-1
    and criterion-3 arrays with a pinned seed, including bit-identical
    reruns."""
    M = 100_000
    bound = 4.0 / math.sqrt(M)
    n = 10**3
    worst = 0.0
    identical = True
    cases = [
        (_torus_clt_array(), [character(torus_group(), l) for l in (1, 2, 3)]),
        (_padic_poisson_array(), _padic_chars(padic_group(2), 2)),
    ]
    for idx, (array, chars) in enumerate(cases):
        stream = SeededStream(42).child(idx)
        est = empirical_ft(array, n, chars, M, stream)
        rerun = empirical_ft(array, n, chars, M, stream)
        identical = identical and est.estimates == rerun.estimates
        for chi, emp in zip(est.chars, est.estimates):
            worst = max(worst, abs(emp - row_ft_exact(array, n, chi)))
    ok = worst <= bound and identical
    return ok, f"max |emp - exact| = {worst:.4g} (<= {bound:.4g}), rerun identical: {identical}"


def criterion_11():
    """Cylinder-mass convergence for the criterion-3 array: the row sums of
    the cylinder probabilities match the Levy cylinder masses for every
    coset of rank <= 3, at every grid point."""
    array = _padic_poisson_array()
    g = array.group
    eta = scale_measure(point_mass(array.x), 2.0)
    worst = 0.0
    for r in (1, 2, 3):
        for res in range(1, 2**r):
            x0 = from_int(g, res)
            target = cylinder_mass(eta, x0, r)
            for n in (100, 1_000, 10_000, 100_000, 1_000_000):
                worst = max(worst, abs(sum_cylinder(array, n, x0, r) - target))
    ok = worst <= 1e-9
    return ok, f"max |row cylinder sum - levy cylinder mass| = {worst:.3g} (<= 1e-9)"


CRITERIA = (
    ("criterion-01 torus Rademacher CLT", criterion_1),
    ("criterion-02 torus Haar limit", criterion_2),
    ("criterion-03 2-adic Bernoulli Poisson", criterion_3),
    ("criterion-04 2-adic Bernoulli Haar", criterion_4),
    ("criterion-05 solenoid Rademacher CLT", criterion_5),
    ("criterion-06 symmetric equivalence suite", criterion_6),
    ("criterion-07 measure-factor identities", criterion_7),
    ("criterion-08 moment inequality band", criterion_8),
    ("criterion-09 compound-growth oracle", criterion_9),
    ("criterion-10 Monte Carlo cross-validation", criterion_10),
    ("criterion-11 cylinder convergence", criterion_11),
)


def run_all():
    out = []
    for name, fn in CRITERIA:
        passed, detail = fn()
        out.append((name, passed, detail))
    return out
