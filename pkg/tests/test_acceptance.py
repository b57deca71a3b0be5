"""Acceptance gates: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.  Two
gates are expected to fail on mathematical grounds; the failure messages
carry the evidence (see the README's "acceptance status" section):

* gate 2 asserts the support-size coefficient sqrt(|S|/N^(2d/p)) for
  p in {1, 1.5}, where it is not a theorem (p >= 2 is) and random
  instances violate it at a measurable rate;
* gate 5 requires rejection sampling to find sets with peak coefficient
  below |S|^(0.6) at sizes where exhaustive/descent search shows no such
  set exists.
"""

import math
import time

import numpy as np
import pytest

from znsynth.constructions import (
    hayes_tail_experiment,
    lambda_constant_check,
    lambda_p_search,
    normalized_indicator_signal,
    rejection_sample_flat,
)
from znsynth.errors import SamplingBudgetExceeded
from znsynth.fourier import FreqSet, Signal, forward
from znsynth.inequalities import lp_norm, verify_indicator_bound
from znsynth.lattice import GridShape, encode
from znsynth.recovery import (
    RecoveryProblem,
    brute_force_recover,
    free_parameter_count,
    mask_spectrum,
    objective_and_gradient,
    random_instance,
    recover,
    symmetric_hidden_set,
)

from helpers import character_matrix, random_bandlimited, random_signal


def _criterion(num: int, ok: bool, detail: str) -> None:
    line = f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def _instance_pool_shapes() -> list[GridShape]:
    return [
        GridShape(n, d)
        for d in (1, 2, 3)
        for n in (2, 3, 4, 5, 8, 16)
        if n**d <= 512
    ]


def test_criterion_1_transform_matches_direct_sum_oracle():
    t0 = time.monotonic()
    grids = (
        [GridShape(n, 1) for n in (2, 3, 5, 8, 16, 17, 64, 243, 1024, 4096)]
        + [GridShape(n, 2) for n in (2, 3, 4, 7, 16, 64)]
        + [GridShape(n, 3) for n in (2, 3, 4, 8, 16)]
        + [GridShape(n, 4) for n in (2, 3, 8)]
        + [GridShape(n, 6) for n in (2, 4)]
        + [GridShape(2, 12)]
    )
    assert all(g.size <= 4096 for g in grids)
    base, extra = divmod(200, len(grids))
    rng = np.random.default_rng(20_240_101)
    checked = 0
    worst_dft = 0.0
    worst_plancherel = 0.0
    for gi, shape in enumerate(grids):
        W = character_matrix(shape, sign=-1) * shape.size**-0.5
        for _ in range(base + (1 if gi < extra else 0)):
            f = random_signal(shape, rng)
            fast = forward(f).values
            oracle = W @ f.values
            scale = float(np.abs(oracle).max())
            err = float(np.abs(fast - oracle).max()) / scale
            worst_dft = max(worst_dft, err)
            pl = abs(lp_norm(fast, 2) - lp_norm(f, 2)) / lp_norm(f, 2)
            worst_plancherel = max(worst_plancherel, pl)
            checked += 1
        del W
    elapsed = time.monotonic() - t0
    ok = (
        checked == 200
        and worst_dft <= 1e-9
        and worst_plancherel <= 1e-10
        and elapsed < 30.0
    )
    _criterion(
        1,
        ok,
        f"{checked} signals on {len(grids)} grids (N^d <= 4096): max transform "
        f"error {worst_dft:.2e} (tol 1e-9), max Plancherel error "
        f"{worst_plancherel:.2e} (tol 1e-10), {elapsed:.1f}s (< 30s)",
    )


def test_criterion_2_support_size_bound_suite():
    shapes = _instance_pool_shapes()
    rng = np.random.default_rng(2024)
    exponents = (1, 1.5, 2, 3, 6)
    per_p = {p: 0 for p in exponents}
    total = 0
    for p in exponents:
        for _ in range(200):
            shape = shapes[rng.integers(len(shapes))]
            size = int(rng.integers(1, shape.size + 1))
            S = FreqSet(shape, rng.choice(shape.size, size=size, replace=False))
            f = random_bandlimited(shape, S, rng)
            lhs = lp_norm(f, math.inf)
            rhs = math.sqrt(size / shape.modulus ** (2 * shape.dim / p)) * lp_norm(f, p)
            slack = math.inf if lhs == 0 else rhs / lhs
            if not slack >= 1 - 1e-9:
                per_p[p] += 1
            total += 1
    violations = sum(per_p.values())
    ok = total == 1000 and violations == 0
    detail = (
        f"{total} instances, {violations} violations of "
        f"||f||_inf <= sqrt(|S|/N^(2d/p)) ||f||_p"
    )
    if violations:
        detail += (
            f" (by p: {per_p}); the coefficient is provable only for p >= 2 "
            f"(for p < 2 the coefficient becomes |S|^(1/2) N^(-d/2); a point "
            f"mass with S = full grid is a closed-form counterexample at p=1)"
        )
    _criterion(2, ok, detail)


def test_criterion_3_indicator_dual_bound_suite_and_subspace_equality():
    shapes = _instance_pool_shapes()
    rng = np.random.default_rng(3024)
    violations = 0
    total = 0
    for p in (1, 1.5, 2, 3, 6):
        for _ in range(200):
            shape = shapes[rng.integers(len(shapes))]
            size = int(rng.integers(1, shape.size + 1))
            S = FreqSet(shape, rng.choice(shape.size, size=size, replace=False))
            f = random_bandlimited(shape, S, rng)
            report = verify_indicator_bound(f, S, p)
            if not report.slack_ratio >= 1 - 1e-9:
                violations += 1
            total += 1
    equality_worst = 0.0
    for n in (4, 8, 9):
        shape = GridShape(n, 2)
        for axis in (0, 1):
            members = [
                encode(tuple(x if j == axis else 0 for j in range(2)), shape)
                for x in range(n)
            ]
            H = FreqSet.from_indices(shape, members)
            f = Signal(shape, np.conj(forward(Signal(shape, H.indicator())).values))
            # conjugate keeps the spectrum on H itself; values are identical
            # in modulus to the plain transform
            for p in (1, 2, 4, math.inf):
                report = verify_indicator_bound(f, H, p)
                equality_worst = max(equality_worst, abs(report.slack_ratio - 1.0))
    ok = total == 1000 and violations == 0 and equality_worst <= 1e-9
    _criterion(
        3,
        ok,
        f"{total} random instances, {violations} violations; coordinate "
        f"subspaces (N in {{4,8,9}}, d=2, K=1, p in {{1,2,4,inf}}) attain "
        f"equality within {equality_worst:.2e} (tol 1e-9)",
    )


def test_criterion_4_tail_bound_on_peak_coefficient():
    t0 = time.monotonic()
    report = hayes_tail_experiment(
        GridShape(64, 1), size=16, a=16**0.75, trials=2000, seed=424242
    )
    elapsed = time.monotonic() - t0
    ok = report.passed and elapsed < 60.0
    _criterion(
        4,
        ok,
        f"P(phi >= |S|^0.75) = {report.empirical:.4f} over {report.trials} "
        f"trials <= bound {report.bound:.4f} + slack {report.mc_slack:.4f}, "
        f"{elapsed:.1f}s (< 60s)",
    )


def test_criterion_5_sharpness_family_found_by_flat_rejection():
    p = 5.0
    target = 2 ** (1 / p)
    lines = []
    failures = []
    for n in (64, 128, 256):
        shape = GridShape(n, 1)
        size = math.ceil(n**0.5)
        try:
            found = rejection_sample_flat(
                shape, size, epsilon=0.1, max_draws=10_000, seed=51_000 + n
            )
            f = normalized_indicator_signal(found.set)
            norm = lp_norm(f, p)
            sup = lp_norm(f, math.inf)
            good = norm <= target + 1e-12 and abs(sup - 1.0) <= 1e-9
            lines.append(f"N={n}: phi={found.statistic:.3f}, ||f||_5={norm:.4f}")
            if not good:
                failures.append(f"N={n}: norm {norm} vs {target}")
        except SamplingBudgetExceeded as exc:
            failures.append(f"N={n}: {exc}")
    ok = not failures
    detail = "; ".join(lines + failures)
    if failures:
        detail += (
            " -- the phi <= |S|^(0.6) threshold is unattainable at these "
            "sizes: for 4-subsets of Z_16 exhaustive search puts the global "
            "minimum above the threshold, and multi-restart swap descent "
            "does the same at N=64/128/256, so no draw budget can help; "
            "the norm target itself is met by most random sets (see "
            "test_small_norm_route_reaches_the_target below)"
        )
    _criterion(5, ok, detail)


def test_small_norm_route_reaches_the_target():
    # companion to gate 5: the family with ||f||_5 <= 2^(1/5) and
    # ||f||_inf = 1 exists at every requested N and is easy to sample when
    # the acceptance test targets the norm itself
    from znsynth.constructions import rejection_sample_small_norm

    p = 5.0
    target = 2 ** (1 / p)
    for n in (64, 128, 256):
        shape = GridShape(n, 1)
        found = rejection_sample_small_norm(
            shape, math.ceil(n**0.5), p, target, max_draws=200, seed=52_000 + n
        )
        f = normalized_indicator_signal(found.set)
        assert lp_norm(f, p) <= target + 1e-12
        assert lp_norm(f, math.inf) == pytest.approx(1.0, abs=1e-9)
        print(
            f"[gate 5 companion] N={n}: ||f||_5 = {found.statistic:.4f} "
            f"<= {target:.4f} after {found.draws} draws"
        )


def test_criterion_6_certified_endpoint_family():
    results = []
    ok = True
    for n in (32, 64):
        shape = GridShape(n, 1)
        size = math.ceil(n**0.5)
        cand = lambda_p_search(
            shape, size, p=4.0, budget=4, seed=61_000 + n, trials=64
        )
        C = cand.empirical_constant * 1.01
        f = normalized_indicator_signal(cand.set)
        norm = lp_norm(f, 4.0)
        sup = lp_norm(f, math.inf)
        good = (
            C <= 4.0
            and lambda_constant_check(cand.set, 4.0, C)
            and norm <= C + 1e-12
            and abs(sup - 1.0) <= 1e-9
        )
        ok = ok and good
        results.append(f"N={n}: C={C:.3f} (<= 4), ||f||_4={norm:.3f} <= C")
    _criterion(6, ok, "; ".join(results))


def test_criterion_7_recovery_exactness():
    t0 = time.monotonic()
    exact = 0
    oracle_agree = 0
    count = 100
    for i in range(count):
        shape = GridShape(8 if i % 2 == 0 else 16, 1)
        hidden_size = 2 + (i % 3)
        problem, truth = random_instance(shape, hidden_size, seed=70_000 + i)
        result = recover(problem, alphabet=(0.0, 1.0))
        if float(np.abs(result.signal.values - truth.values).max()) < 1e-6:
            exact += 1
        oracle = brute_force_recover(problem, (0.0, 1.0))
        if float(np.abs(oracle.signal.values - result.signal.values).max()) < 1e-6:
            oracle_agree += 1
    elapsed = time.monotonic() - t0
    ok = exact == count and oracle_agree == count and elapsed < 300.0
    _criterion(
        7,
        ok,
        f"{exact}/{count} exact (tol 1e-6), {oracle_agree}/{count} agree with "
        f"exhaustive enumeration, {elapsed:.0f}s (< 300s)",
    )


def test_criterion_8_solver_gradient_check():
    rng = np.random.default_rng(88)
    worst = 0.0
    points = 0
    for p in (2.0, 3.0, 4.0):
        for _ in range(17 if p < 4 else 16):
            shape = GridShape(16, 1)
            truth = Signal(shape, rng.standard_normal(16))
            hidden = symmetric_hidden_set(shape, int(rng.integers(2, 5)), rng)
            problem = RecoveryProblem(
                shape=shape,
                observed=mask_spectrum(forward(truth), hidden),
                hidden=hidden,
                p=p,
                delta=1.0,
            )
            t = free_parameter_count(problem)
            v = rng.standard_normal(t)
            _, grad = objective_and_gradient(problem, v)
            h = 1e-6
            for j in range(t):
                e = np.zeros(t)
                e[j] = h
                num = (
                    objective_and_gradient(problem, v + e)[0]
                    - objective_and_gradient(problem, v - e)[0]
                ) / (2 * h)
                denom = max(abs(num), 1e-8)
                worst = max(worst, abs(grad[j] - num) / denom)
            points += 1
    ok = points >= 50 and worst <= 1e-5
    _criterion(
        8,
        ok,
        f"{points} feasible points, p in {{2,3,4}}: max relative gradient "
        f"error {worst:.2e} vs central differences (tol 1e-5)",
    )


def test_criterion_9_deterministic_csv_bodies(tmp_path):
    from znsynth.cli import main
    from znsynth.serialization import csv_body

    pairs = []
    sweep_a = tmp_path / "sweep_w1.csv"
    sweep_b = tmp_path / "sweep_w8.csv"
    base = [
        "sweep", "--alpha", "0.5", "--p-mode", "critical",
        "--grid-range", "8..128", "--seed", "99", "--out",
    ]
    assert main(base + [str(sweep_a), "--workers", "1"]) == 0
    assert main(base + [str(sweep_b), "--workers", "8"]) == 0
    pairs.append(("sweep", sweep_a, sweep_b))

    tail_a = tmp_path / "tail_w1.csv"
    tail_b = tmp_path / "tail_w8.csv"
    targs = [
        "phi-stats", "--grid", "64x1", "--size", "16", "--tail-a", "8.0",
        "--trials", "400", "--seed", "99", "--out",
    ]
    assert main(targs + [str(tail_a), "--workers", "1"]) == 0
    assert main(targs + [str(tail_b), "--workers", "8"]) == 0
    pairs.append(("tail", tail_a, tail_b))

    mismatched = [
        name for name, a, b in pairs
        if csv_body(a.read_text()) != csv_body(b.read_text())
    ]
    ok = not mismatched
    _criterion(
        9,
        ok,
        "sweep and tail CSV bodies byte-identical across 1 and 8 workers"
        if ok
        else f"bodies differ for: {mismatched}",
    )
