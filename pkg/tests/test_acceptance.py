"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary under "acceptance criteria".
"""
import math
import time

import numpy as np
import pytest

from mubc.bounds import (
    alpha,
    b_plus,
    constrained_perturbation,
    constraint_residual,
    extremal_distribution,
    h_t_plus,
    h_t_plus_bar,
    mutual_info_bound,
    mutual_info_discrepancy,
)
from mubc.measure import (
    probabilities,
    probs_d2_closed_form,
    probs_d3_closed_form,
    purities,
    purity_sum_check,
    total_entropy,
)
from mubc.mub import standard_mubs
from mubc.search import (
    VERDICT_BOUND,
    VERDICT_COHERENT,
    SearchConfig,
    extendibility_report,
    maximize_total_entropy,
)
from mubc.state import (
    DensityMatrix,
    PureStateParamsD2,
    PureStateParamsD3,
    bloch_vector,
    mub_diagonal_mixture,
    pure_from_params_d2,
    pure_from_params_d3,
    random_pure,
    random_simplex_weights,
    rng_stream,
)

QUBIT_MAX = 1.547120
QUTRIT_BOUND = 3.47025
QUTRIT_REPORTED_MAX = 3.449119
QUTRIT_BOUND_CAP = 3.470253
MI_QUTRIT = 0.697664


def grid():
    for d in (2, 3, 5, 7):
        for n in range(2, d + 2):
            for purity in (1 / d, (1 / d + 1) / 2, 1.0):
                yield n, d, purity


@pytest.fixture(scope="module")
def qubit_runs():
    m = standard_mubs(2, 3)
    start = time.perf_counter()
    serial = maximize_total_entropy(m, SearchConfig(restarts=64, seed=42))
    elapsed = time.perf_counter() - start
    return m, serial, elapsed


@pytest.fixture(scope="module")
def qutrit_runs():
    m = standard_mubs(3, 4)
    start = time.perf_counter()
    serial = maximize_total_entropy(m, SearchConfig(restarts=200, seed=42))
    elapsed = time.perf_counter() - start
    return m, serial, elapsed


def test_criterion_01_qubit_bound(acceptance):
    start = time.perf_counter()
    value = h_t_plus(3, 2, 1.0)
    elapsed = time.perf_counter() - start
    ok = abs(value - QUBIT_MAX) < 1e-4 and elapsed < 1e-3
    acceptance("1 qubit bound", ok, f"h_t_plus(3,2,1) = {value:.9f}, |diff| = {abs(value - QUBIT_MAX):.2e}, {elapsed * 1e6:.1f} us")
    assert ok


def test_criterion_02_qubit_optimizer(acceptance, qubit_runs):
    _, res, elapsed = qubit_runs
    bound = h_t_plus(3, 2, 1.0)
    bloch = bloch_vector(res.best_state)
    bloch_err = float(np.max(np.abs(np.abs(bloch) - 1 / math.sqrt(3))))
    ok = abs(res.best_value - bound) < 1e-4 and bloch_err < 1e-3 and elapsed < 10
    acceptance(
        "2 qubit optimizer",
        ok,
        f"best = {res.best_value:.10f}, bound gap = {bound - res.best_value:.2e}, "
        f"max ||b_i| - 1/sqrt3| = {bloch_err:.2e}, {elapsed:.2f} s",
    )
    assert ok


def test_criterion_03_qutrit_values(acceptance, qutrit_runs):
    _, res, elapsed = qutrit_runs
    bound = h_t_plus(4, 3, 1.0)
    ok_bound = abs(bound - QUTRIT_BOUND) < 5e-5
    ok_search = QUTRIT_REPORTED_MAX <= res.best_value <= QUTRIT_BOUND_CAP + 1e-9
    ok = ok_bound and ok_search and elapsed < 60
    acceptance(
        "3 qutrit values",
        ok,
        f"h_t_plus(4,3,1) = {bound:.9f}, best = {res.best_value:.10f}, "
        f"recorded gap to bound = {bound - res.best_value:.6e}, {elapsed:.2f} s",
    )
    assert ok


def test_criterion_04_purity_sum(acceptance):
    worst_prop = 0.0
    worst_slack = -np.inf
    worst_eq = 0.0
    for d in (2, 3, 5):
        full = standard_mubs(d)
        for n in range(1, d + 2):
            m = full.subset(n)
            rng = rng_stream(404, 10 * d + n)
            for _ in range(100):
                rep = purity_sum_check(mub_diagonal_mixture(m, random_simplex_weights((n, d), rng)), m)
                worst_prop = max(worst_prop, rep.equality_deviation)
        # one table per state; prefixes give every N
        rng = rng_stream(405, d)
        states = [random_pure(d, seed=405, stream=1000 + i) for i in range(1000)]
        for _ in range(1000):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            mat = g @ g.conj().T
            states.append(DensityMatrix(mat / np.trace(mat).real))
        for rho in states:
            c = purities(probabilities(rho, full))
            pi = rho.purity
            worst_slack = max(worst_slack, float(np.max(np.cumsum(c) - (pi + 1))))
            worst_eq = max(worst_eq, abs(float(c.sum()) - (pi + 1)))
    ok = worst_prop < 1e-9 and worst_slack <= 1e-9 and worst_eq < 1e-9
    acceptance(
        "4 purity-sum identity and inequality",
        ok,
        f"max identity deviation = {worst_prop:.2e}, max slack = {worst_slack:.2e}, "
        f"max |sum C - purity - 1| at N=d+1 = {worst_eq:.2e}",
    )
    assert ok


def test_criterion_05_closed_forms(acceptance):
    rng = rng_stream(505)
    m2, m3 = standard_mubs(2), standard_mubs(3)
    worst2 = worst3 = 0.0
    for _ in range(1000):
        p2 = PureStateParamsD2(rng.uniform(), rng.uniform(0, 2 * np.pi))
        diff = probs_d2_closed_form(p2).p - probabilities(pure_from_params_d2(p2), m2).p
        worst2 = max(worst2, float(np.max(np.abs(diff))))
        r, q, _ = rng.dirichlet(np.ones(3))
        p3 = PureStateParamsD3(r, q, *rng.uniform(0, 2 * np.pi, 2))
        diff = probs_d3_closed_form(p3).p - probabilities(pure_from_params_d3(p3), m3).p
        worst3 = max(worst3, float(np.max(np.abs(diff))))
    ok = worst2 < 1e-12 and worst3 < 1e-12
    acceptance("5 closed-form tables", ok, f"max entry error d=2 {worst2:.2e}, d=3 {worst3:.2e}")
    assert ok


def test_criterion_06_trivial_collapses(acceptance):
    worst = 0.0
    for d in (2, 3, 5, 7):
        for n in range(1, d + 2):
            ln = n * math.log(d)
            worst = max(
                worst,
                alpha(d, 1 / d),
                abs(b_plus(n, d, 1 / d) - 1 / d),
                abs(h_t_plus(n, d, 1 / d) - ln),
                abs(h_t_plus_bar(n, d, 1.0, 1.0) - ln),
            )
    ok = worst < 1e-12
    acceptance("6 trivial collapses", ok, f"max deviation = {worst:.2e}")
    assert ok


def test_criterion_07_extremal_consistency(acceptance):
    worst_h = worst_c = 0.0
    for n, d, purity in grid():
        t = extremal_distribution(n, d, purity)
        worst_h = max(worst_h, abs(total_entropy(t) - h_t_plus(n, d, purity)))
        worst_c = max(worst_c, abs(constraint_residual(t, d, purity)))
    ok = worst_h < 1e-12 and worst_c < 1e-12
    acceptance("7 extremal table", ok, f"max entropy gap = {worst_h:.2e}, max constraint residual = {worst_c:.2e}")
    assert ok


def test_criterion_08_local_maximum(acceptance):
    worst = -np.inf
    for n, d, purity in grid():
        t = extremal_distribution(n, d, purity)
        base = total_entropy(t)
        rng = rng_stream(808, 100 * d + n)
        for _ in range(1000):
            q = constrained_perturbation(t, rng.standard_normal(t.shape), 1e-4)
            worst = max(worst, total_entropy(q) - base)
    ok = worst <= 1e-9
    acceptance("8 local maximum", ok, f"largest entropy increase = {worst:.2e}")
    assert ok


def test_criterion_09_extendibility(acceptance):
    two = extendibility_report(standard_mubs(2, 2))
    three = extendibility_report(standard_mubs(2, 3))
    floor = 1 / (2 * math.sqrt(3))
    ok_two = (
        two.verdict == VERDICT_COHERENT
        and two.min_coherence_defect < 1e-8
        and abs(two.achieved_max - 2 * math.log(2)) < 1e-6
    )
    ok_three = (
        three.verdict == VERDICT_BOUND
        and three.achieved_max < 3 * math.log(2) - 0.5
        and abs(three.min_coherence_defect - floor) < 1e-3
    )
    ok = ok_two and ok_three
    acceptance(
        "9 extendibility verdicts",
        ok,
        f"{{Z,X}}: {two.verdict}, defect {two.min_coherence_defect:.2e}, max {two.achieved_max:.9f}; "
        f"{{Z,X,Y}}: {three.verdict}, defect {three.min_coherence_defect:.6f}, max {three.achieved_max:.6f}",
    )
    assert ok


def test_criterion_10_mutual_information(acceptance):
    value = mutual_info_bound(3, 1.0)
    worst_zero = max(abs(mutual_info_bound(d, 1 / d)) for d in (2, 3, 5, 7))
    diag = mutual_info_discrepancy(3, 1.0)
    ok = abs(value - MI_QUTRIT) < 1e-6 and worst_zero < 1e-12 and diag.discrepancy != 0
    acceptance(
        "10 mutual-information bound",
        ok,
        f"bound(3,1) = {value:.9f}, max |bound(d,1/d)| = {worst_zero:.2e}, "
        f"alternative form {diag.alternative:.6f} (discrepancy {diag.discrepancy:.6f})",
    )
    assert ok


def test_criterion_11_determinism(acceptance, qubit_runs, qutrit_runs):
    rows = []
    for (m, serial, _), restarts in ((qubit_runs, 64), (qutrit_runs, 200)):
        again = maximize_total_entropy(m, SearchConfig(restarts=restarts, seed=42))
        parallel = maximize_total_entropy(m, SearchConfig(restarts=restarts, seed=42, parallel=True))
        rows.append(serial.best_value == again.best_value == parallel.best_value)
    ok = all(rows)
    acceptance("11 determinism", ok, f"serial/repeat/parallel bit-identical: d=2 {rows[0]}, d=3 {rows[1]}")
    assert ok
