"""Acceptance criteria, one test each, with a printed PASS/FAIL line per criterion."""
import math
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from holoentropy.boxdim import dim_estimate, entropy_dim_bridge
from holoentropy.covering import (EntropyProfile, RatioWarning, dyadic_entropy_profile,
                                  entropy_number, exact_covering_number, packing_number,
                                  ratio_diagnostic)
from holoentropy.diagonal import (DiagonalModel, asymptotic_envelope, example_K_profile,
                                  sigma_partition_profile)
from holoentropy.exact import bareiss_rank
from holoentropy.metric import BallSpec, PointCloud, grid_segment, pairwise_distances, sample_ball
from holoentropy.polynomials import (HomogeneousPolynomial, assemble_oxis, coefficient_matrix,
                                     corank, corollary_check, generic_rank, monomials,
                                     corank_bounds)
from holoentropy.taylor import (entire_exp, image_cloud, plan_from_net, power_curve,
                                summability_diagnostic, taylor_coefficients,
                                transfer_witness_table)
from holoentropy.covering import greedy_cover, verify_cover
from oracles import brute_cover_count, interval_entropy, line_cover_count


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_01_interval_oracle(report):
    t0 = time.perf_counter()
    cloud = grid_segment(0, 1, 2 ** 12)
    brackets_ok = True
    for n in range(1, 9):
        b = entropy_number(cloud, 2 ** (n - 1))
        target = float(interval_entropy(2 ** (n - 1)))
        brackets_ok &= b.lower <= target <= 2 * b.upper
    rng = np.random.default_rng(0)
    xs = cloud.points[:, 0].real
    mismatches, checked = 0, 0
    for size in range(1, 65):
        for _ in range(3):
            idx = np.sort(rng.choice(xs.size, size, replace=False))
            sub = cloud.subset(idx)
            eps = float(rng.uniform(0.005, 0.5))
            got = exact_covering_number(sub, eps)
            want = line_cover_count(xs[idx], eps)
            if size <= 10:
                want_brute = brute_cover_count(xs[idx], eps, 2.0)
                mismatches += want_brute != want
            mismatches += got != want
            checked += 1
    elapsed = time.perf_counter() - t0
    ok = brackets_ok and mismatches == 0 and elapsed < 10
    report(1, ok, f"brackets ok={brackets_ok}, {checked} sub-clouds, "
                  f"{mismatches} mismatches, {elapsed:.2f}s")


def test_02_duality_sandwich(report):
    violations, cases = 0, 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 65))
        d = int(rng.integers(1, 4))
        p = (1.0, 2.0, math.inf)[seed % 3]
        cloud = PointCloud(rng.uniform(-1, 1, (n, d)) + 1j * rng.uniform(-1, 1, (n, d)), p)
        D = pairwise_distances(cloud.points, cloud.points, p)
        for eps in np.quantile(D[D > 0], [0.05, 0.15, 0.3, 0.5, 0.8]):
            N = exact_covering_number(cloud, float(eps))
            violations += not (packing_number(cloud, 2 * eps) <= N <= packing_number(cloud, eps))
            cases += 1
    report(2, violations == 0, f"{cases} cases, {violations} violations")


def test_03_disc_box_dimension(report):
    t0 = time.perf_counter()
    disc = sample_ball(BallSpec(np.zeros(1), 1.0, 2.0), 10 ** 6, seed=0)
    est = dim_estimate(disc, 2, 8)
    t_disc = time.perf_counter() - t0
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    seg = PointCloud(rng.uniform(0, 1, 10 ** 4))
    est_seg = dim_estimate(seg, 2, 8)
    t_seg = time.perf_counter() - t0
    ok = (1.8 <= est.slope <= 2.2 and 0.9 <= est_seg.slope <= 1.1
          and t_disc < 5 and t_seg < 5)
    report(3, ok, f"disc slope {est.slope:.4f} ({t_disc:.2f}s), "
                  f"segment slope {est_seg.slope:.4f} ({t_seg:.2f}s)")


def test_04_diagonal_sandwich(report):
    eps, N, ns = 0.5, 8, range(1, 7)
    cloud = DiagonalModel.geometric(eps, N).sample(2 * 10 ** 4, seed=0)
    emp = dyadic_entropy_profile(cloud, 6)
    ana = example_K_profile(eps, N, 6)
    meets = np.maximum(emp.lower, ana.lower) <= np.minimum(emp.upper, ana.upper)
    env = asymptotic_envelope(eps, ns, N)
    n = np.array(list(ns))
    env_ok = np.all(env.lower(n) <= ana.lower) and np.all(ana.upper <= env.upper(n))
    report(4, bool(meets.all() and env_ok),
           f"intersections {int(meets.sum())}/6, envelope C1={env.C1:.4g} C2={env.C2:.4g}")


def test_05_ratio_lemma(report):
    exact = [Fraction(interval_entropy(2 ** (n - 1))) for n in range(1, 9)]
    ratios_exact = all(exact[n] / exact[n - 1] == Fraction(1, 2) for n in range(1, 8))
    ns = np.arange(1, 9)
    oracle = EntropyProfile.from_arrays(ns, [float(e) for e in exact], [float(e) for e in exact])
    flags = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RatioWarning)
        for prof in (oracle,
                     dyadic_entropy_profile(grid_segment(0, 1, 4096), 8),
                     dyadic_entropy_profile(sample_ball(BallSpec(np.zeros(1), 1.0), 4096, 0), 8)):
            flags += sum(r.flagged for r in ratio_diagnostic(prof))
    report(5, ratios_exact and flags == 0, f"exact ratios 1/2: {ratios_exact}, hard flags {flags}")


def test_06_entropy_dimension_bridge(report):
    labels = set()
    for seed in range(5):
        rng = np.random.default_rng(seed)
        cloud = PointCloud(rng.uniform(0, 1, 4096))
        labels.add(("geometric", entropy_dim_bridge(dyadic_entropy_profile(cloud, 10)).classification))
        ns = np.arange(1, 25)
        v = (0.5 + 0.1 * rng.random()) ** ns
        labels.add(("geometric", entropy_dim_bridge(EntropyProfile.from_arrays(ns, v, v)).classification))
    diag = entropy_dim_bridge(example_K_profile(0.5, 64, 24))
    labels.add(("diagonal", diag.classification))
    for N in (24, 32, 48):
        labels.add(("diagonal", entropy_dim_bridge(example_K_profile(0.5, N, 24)).classification))
    ok = labels == {("geometric", "finite-dim-consistent"),
                    ("diagonal", "infinite-dim-consistent")}
    report(6, ok, f"labels {sorted(labels)}, diagonal lower rate {diag.lower_rate:.4f}")


def test_07_taylor_quadrature(report):
    worst = 0.0
    for f, coef in ((power_curve(8), lambda k: 1.0),
                    (entire_exp(8), lambda k: 1.0 / math.factorial(k))):
        X = sample_ball(BallSpec(np.zeros(1), 0.99, 2.0), 100, seed=1).points
        for m in range(9):
            vals, _, _ = taylor_coefficients(f, m, X)
            want = np.zeros_like(vals)
            if m >= 1:
                want[:, m - 1] = coef(m) * X[:, 0] ** m
            worst = max(worst, float(np.abs(vals - want).max()))
    homog, tails = 0.0, True
    for seed in range(100):
        rng = np.random.default_rng(seed)
        lam = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / math.sqrt(2)
        theta = float(rng.uniform(0.1, 0.9))
        for f in (power_curve(8), entire_exp(8)):
            x = sample_ball(BallSpec(np.zeros(1), theta), 1, seed).points
            for m in range(9):
                a = taylor_coefficients(f, m, lam * x)[0]
                b = lam ** m * taylor_coefficients(f, m, x)[0]
                homog = max(homog, float(np.abs(a - b).max()))
            full, partial, prev = f.evaluate(x[0]), 0, None
            for M in range(12):
                partial = partial + taylor_coefficients(f, M, x)[0][0]
                tail = float(np.abs(full - partial).max())
                if prev is not None and prev > 1e-12:
                    tails &= tail <= (theta + 0.05) * prev
                prev = tail
    ok = worst <= 1e-12 and homog <= 1e-10 and tails
    report(7, ok, f"max coefficient error {worst:.2e}, homogeneity {homog:.2e}, "
                  f"geometric tails {tails}")


def test_08_transfer(report):
    t0 = time.perf_counter()
    f = power_curve(8, radius=0.9)
    cloud = image_cloud(f, 2 * 10 ** 4, seed=0)
    net = greedy_cover(cloud, 0.05)
    verified = verify_cover(net, cloud)
    plan = plan_from_net(net, f.deriv_bound)
    X = sample_ball(BallSpec(np.zeros(1), 0.9), 200, seed=1).points * (1 - 1e-9)
    table = transfer_witness_table(f, plan, range(1, 5), X)
    passed = {m: sum(w.error <= 0.10 for w in ws) for m, ws in table.items()}
    worst = max(w.error for ws in table.values() for w in ws)
    elapsed = time.perf_counter() - t0
    ok = verified and all(v == 200 for v in passed.values()) and elapsed < 60
    report(8, ok, f"net {len(net)} centers verified={verified}, C_n={plan.C_n}, "
                  f"passed {passed}, max error {worst:.4f}, {elapsed:.1f}s")


def _powers(r, m, N):
    return [HomogeneousPolynomial.monomial(tuple(m if k == i else 0 for k in range(N)))
            for i in range(r)]


def test_09_corank_bound(report):
    t0 = time.perf_counter()
    sharp = []
    for r, m in ((1, 2), (1, 3), (2, 2), (2, 3)):
        for N in (3, 4):
            k = corank(assemble_oxis(_powers(r, m, N)))
            sharp.append(k == corank_bounds(r, m)["monomial_count"])
    rng = np.random.default_rng(9)
    shapes = [(1, 2, 3), (1, 3, 4), (2, 2, 3), (2, 2, 4), (2, 3, 3)]
    perturbed = []
    for t in range(20):
        r, m, N = shapes[t % len(shapes)]
        mons = monomials(N, m)
        fam = []
        for i, base in enumerate(_powers(r, m, N)):
            picks = rng.choice(len(mons), 2, replace=False)
            extra = HomogeneousPolynomial(N, m, {mons[j]: int(rng.integers(-2, 3)) for j in picks})
            fam.append(base + extra if not (base + extra).is_zero() else base)
        system = assemble_oxis(fam)
        k = corank(system)
        members = all(system.satisfied_by(p) for p in fam)
        perturbed.append(k <= corank_bounds(r, m)["monomial_count"] and members)
    elapsed = time.perf_counter() - t0
    ok = all(sharp) and all(perturbed) and elapsed < 120
    report(9, ok, f"sharp {sum(sharp)}/{len(sharp)}, perturbed {sum(perturbed)}/20, "
                  f"{elapsed:.1f}s")


def _linear(coeffs):
    n = len(coeffs)
    return HomogeneousPolynomial(n, 1, {tuple(int(k == j) for k in range(n)): int(c)
                                         for j, c in enumerate(coeffs)})


def _family(seed):
    """Seeded independent quadratic family; odd seeds hide a low-rank structure."""
    sub = 0
    while True:
        rng = np.random.default_rng([seed, sub])
        nvars = int(rng.integers(2, 11))
        if seed % 2 == 0:
            mons = monomials(nvars, 2)
            N = int(rng.integers(1, min(10, len(mons)) + 1))
            fam = [HomogeneousPolynomial(nvars, 2, {a: int(c) for a, c in
                                                    zip(mons, rng.integers(-3, 4, len(mons)))})
                   for _ in range(N)]
        else:
            # quadratics in k < nvars linear forms: Jacobian rank at most k
            k = int(rng.integers(1, min(4, nvars) + 1))
            forms = [_linear(rng.integers(-3, 4, nvars)) for _ in range(k)]
            prods = [forms[a] * forms[b] for a in range(k) for b in range(a, k)]
            N = int(rng.integers(1, min(10, len(prods)) + 1))
            fam = []
            for _ in range(N):
                c = rng.integers(-2, 3, len(prods))
                acc = HomogeneousPolynomial.zero(nvars, 2)
                for ci, pr in zip(c, prods):
                    acc = acc + pr.scale(int(ci))
                fam.append(acc)
        if all(not p.is_zero() for p in fam) and bareiss_rank(coefficient_matrix(fam)) == len(fam):
            return fam
        sub += 1


def test_10_corollary_rank(report):
    failures, low_rank = 0, 0
    for seed in range(50):
        fam = _family(seed)
        res = corollary_check(fam, trials=5, seed=seed)
        need = math.ceil(len(fam) ** 0.5 - 2)
        failures += not (res.rank >= need and res.passed and res.chain_ok)
        low_rank += res.rank < fam[0].nvars
    report(10, failures == 0, f"50 families ({low_rank} with rank below nvars), "
                              f"{failures} failures")


def test_11_sigma_divergence(report):
    rows = sigma_partition_profile(1, 5)
    sums = [row.partial_sums[1.0] for row in rows]
    inc = np.diff([0.0] + sums)
    diverging = bool(np.all(inc > 0) and inc[-1] > inc[0])
    ns = np.arange(1, 61)
    v = 2.0 ** -ns
    rep = summability_diagnostic(EntropyProfile.from_arrays(ns, v, v), 1.5)
    tail = np.array(rep.partial_sums[29:])
    cauchy = float(tail.max() - tail.min())
    ok = diverging and cauchy <= 1e-3 and rep.verdict == "summable-consistent"
    report(11, ok, f"p=1 increments {inc[0]:.4g} -> {inc[-1]:.4g}, "
                   f"p=1.5 tail spread after n=30 {cauchy:.2e} ({rep.verdict})")
