"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import math
import time

import numpy as np
from scipy.sparse.csgraph import shortest_path

from conftest import record
from oracles import bisect_edge_birth
from sparsedtm import (
    DiscreteMeasure,
    Mass,
    MetricSpace,
    WeightedPointSet,
    build_sparse_weighted_rips,
    build_weighted_rips,
    bottleneck,
    dP_eval,
    dtm_eval,
    dtm_measure,
    dtm_weights,
    hausdorff,
    log_bottleneck,
    reduce,
    snr,
    wasserstein2,
    witnessed_kdistance_eval,
)
from sparsedtm.datasets import gen_cube_skeleton, gen_l1_cross, gen_torus_spiral, gen_witness_cross
from sparsedtm.dtm import witness_barycenters
from sparsedtm.sparse_rips import sparse_rips_sizes
from sparsedtm.sublevel import distance_function, grid_sublevel_filtration
from sparsedtm.weighted_rips import edge_births

SEED = 20240601


def rng():
    return np.random.Generator(np.random.PCG64(SEED))


def test_criterion_01_tight_euclidean_ratio():
    M = MetricSpace(np.array([-1.0, 1.0]))
    ratio = dP_eval(M, [0, 1], 2, [0.0]) / dtm_eval(M, [0, 1], 2, [0.0])
    rel = abs(ratio - math.sqrt(3)) / math.sqrt(3)
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        dP_eval(M, [0, 1], 2, [0.0])
        best = min(best, time.perf_counter() - t0)
    ok = rel <= 1e-12 and best < 1e-3
    record(1, ok, f"ratio={ratio!r} rel.err={rel:.1e} runtime={best * 1e3:.3f} ms")
    assert ok


def test_criterion_02_l1_tightness_family():
    errs, o_ratios, q_ratios = [], [], []
    for d in range(2, 11):
        M = MetricSpace(np.vstack([gen_l1_cross(d), np.zeros(d), -3 * np.eye(d)[0]]), metric="l1")
        P = list(range(2 * d))
        o, q = 2 * d, 2 * d + 1
        k = 2 * d
        dtm_o, dp_o = dtm_eval(M, P, k, o), dP_eval(M, P, k, o)
        dtm_q, dp_q = dtm_eval(M, P, k, q), dP_eval(M, P, k, q)
        errs += [
            abs(dtm_o - 1.0),
            abs(dp_o ** 2 - (5 - 2 / d)),
            abs(dtm_q ** 2 - (16 - 6 / d)),
            abs(dp_q ** 2 - (8 - 2 / d)),
        ]
        o_ratios.append(dp_o / dtm_o)
        q_ratios.append(dp_q / dtm_q)
    up = all(b > a for a, b in zip(o_ratios, o_ratios[1:])) and o_ratios[-1] < math.sqrt(5)
    down = all(b < a for a, b in zip(q_ratios, q_ratios[1:])) and q_ratios[-1] > 1 / math.sqrt(2)
    ok = max(errs) <= 1e-9 and up and down
    record(
        2, ok,
        f"max err={max(errs):.1e} dP/dtm(o): {o_ratios[0]:.4f}->{o_ratios[-1]:.4f} (sqrt5={math.sqrt(5):.4f}) "
        f"dP/dtm(q): {q_ratios[0]:.4f}->{q_ratios[-1]:.4f}",
    )
    assert ok


def test_criterion_03_sandwich_bounds():
    g = rng()
    slack = 1e-9
    violations = 0
    checks = 0
    for trial in range(200):
        n = int(g.integers(2, 51))
        # general metric: shortest paths of a random weighted graph, sample on a subset
        N = n + 10
        W = g.uniform(0.1, 3.0, size=(N, N))
        W = np.triu(W, 1) * (g.random((N, N)) < 0.4)
        W = W + W.T
        W[np.arange(N - 1), np.arange(1, N)] = W[np.arange(1, N), np.arange(N - 1)] = g.uniform(0.1, 3.0, N - 1)
        D = shortest_path(W, directed=False)
        Mg = MetricSpace(matrix=D)
        P = np.sort(g.choice(N, size=n, replace=False))
        k = float(g.uniform(0.5, n)) if trial % 2 else int(g.integers(1, n + 1))
        Wg = dtm_weights(Mg, P, k)
        for x in range(N):
            t = dtm_eval(Mg, P, k, x)
            p = dP_eval(Mg, P, k, x, weights=Wg)
            checks += 1
            violations += not (t / math.sqrt(2) - slack <= p <= math.sqrt(5) * t + slack)
        # Euclidean, plus the witnessed k-distance for integer k
        dim = int(g.integers(1, 4))
        X = g.normal(size=(n, dim))
        Me = MetricSpace(X)
        ki = int(g.integers(1, n + 1))
        We = dtm_weights(Me, range(n), ki)
        wit = witness_barycenters(Me, range(n), ki)
        for x in g.normal(scale=2.0, size=(10, dim)):
            t = dtm_eval(Me, range(n), ki, x)
            p = dP_eval(Me, range(n), ki, x, weights=We)
            w = witnessed_kdistance_eval(Me, range(n), ki, x, witnesses=wit)
            checks += 2
            violations += not (t / math.sqrt(2) - slack <= p <= math.sqrt(3) * t + slack)
            violations += not (t - slack <= w <= math.sqrt(6) * t + slack)
    ok = violations == 0
    record(3, ok, f"200 instances, {checks} inequality checks, violations={violations}")
    assert ok


def test_criterion_04_witnessed_lower_bound_construction():
    d, eps = 2, 0.1
    X = gen_witness_cross(d, eps)
    assert len(X) == 4 * d * d
    M = MetricSpace(X)
    P = range(len(X))
    k = 2 * d
    o = np.zeros(d)
    dtm_o = dtm_eval(M, P, k, o)
    dw_o = witnessed_kdistance_eval(M, P, k, o)
    want = 1 / (2 * d) + (2 * d - 1) / (2 * d) * (1 + math.sqrt(2) - eps) ** 2
    err1, err2 = abs(dtm_o - 1.0), abs(dw_o ** 2 - want)
    ok = err1 <= 1e-9 and err2 <= 1e-9
    record(4, ok, f"dtm(o)={dtm_o!r} dW(o)^2={dw_o ** 2!r} expected {want!r}")
    assert ok


def test_criterion_05_edge_birth_closed_form():
    g = rng()
    n = 10_000
    d = g.uniform(0, 10, n)
    wp = g.uniform(0, 6, n)
    wq = g.uniform(0, 6, n)
    t0 = time.perf_counter()
    births = edge_births(d, wp, wq)
    elapsed = time.perf_counter() - t0
    a, b = np.minimum(wp, wq), np.maximum(wp, wq)
    early = d * d <= b * b - a * a
    oracle = np.array([bisect_edge_birth(*t) for t in zip(d, wp, wq)])
    err = float(np.max(np.abs(births - oracle)))
    ok = err <= 1e-9 and early.sum() >= 1000 and (~early).sum() >= 1000 and elapsed < 1.0
    record(5, ok, f"max |closed - bisection|={err:.1e} branches={int(early.sum())}/{int((~early).sum())} "
                  f"runtime={elapsed * 1e3:.2f} ms")
    assert ok


def test_criterion_06_persistence_correctness():
    from oracles import betti_bruteforce, random_filtration
    from sparsedtm import Filtration, betti_at, build_rips

    sq = MetricSpace(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    D = reduce(build_rips(sq, range(4), 2), 1)
    square_ok = D.in_dim(1).tolist() == [[0.5, math.sqrt(2) / 2]]
    g = rng()
    mismatches = 0
    for _ in range(500):
        simplices, values = random_filtration(g, max_simplices=12)
        F = Filtration(simplices, values)
        top = F.dimension
        R = reduce(F, top)
        for alpha in (-1.0, 0.0, 1.0, 2.0, 3.0):
            want = betti_bruteforce(F.simplices, F.values, alpha, top)
            mismatches += want != [betti_at(R, dd, alpha) for dd in range(top + 1)]
    ok = square_ok and mismatches == 0
    record(6, ok, f"square dim-1 point {D.in_dim(1).tolist()}; 500 random filtrations, mismatches={mismatches}")
    assert ok


def test_criterion_07_weighted_rips_stability():
    g = rng()
    worst = worst_h = -math.inf
    for _ in range(50):
        n = int(g.integers(5, 41))
        delta = float(g.uniform(0.0, 0.05))
        X = g.uniform(0, 1, size=(n, 2))
        Y = X + g.uniform(-1, 1, size=X.shape) * delta / math.sqrt(2)
        both = MetricSpace(np.vstack([X, Y]))
        h = hausdorff(both, range(n), range(n, 2 * n))
        # one 1-Lipschitz weight function: the DTM of the first sample, evaluated on both
        k = int(g.integers(1, 6))
        MX = MetricSpace(X)
        wP = np.array([dtm_eval(MX, range(n), k, x) for x in X])
        wQ = np.array([dtm_eval(MX, range(n), k, y) for y in Y])
        DP = reduce(build_weighted_rips(MX, WeightedPointSet(range(n), wP), 2), 1)
        DQ = reduce(build_weighted_rips(MetricSpace(Y), WeightedPointSet(range(n), wQ), 2), 1)
        for dim in (0, 1):
            dB = bottleneck(DP, DQ, dim)
            worst = max(worst, dB - 2 * delta)
            worst_h = max(worst_h, dB - 2 * h)
    ok = worst <= 1e-9
    record(7, ok, f"50 trials, max (d_B - 2 delta) = {worst:.3e}, max (d_B - 2 d_H) = {worst_h:.3e}")
    assert ok


def test_criterion_08_sparse_interleaving():
    g = rng()
    t0 = time.perf_counter()
    worst = -math.inf
    for trial in range(30):
        n = int(g.integers(5, 41))
        X = g.uniform(0, 1, size=(n, 2))
        M = MetricSpace(X)
        W = dtm_weights(M, range(n), 3)
        R = reduce(build_weighted_rips(M, W, 2), 1)
        for eps in (0.1, 0.3, 0.5):
            T = reduce(build_sparse_weighted_rips(M, W, eps, 2), 1)
            bound = math.log((1 + math.sqrt(2) * eps) / (1 - eps))
            for dim in (0, 1):
                worst = max(worst, log_bottleneck(T, R, dim) - bound)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 120
    record(8, ok, f"30 trials x 3 eps, max (d_B^log - ln kappa) = {worst:.3e}, runtime={elapsed:.1f} s")
    assert ok


def test_criterion_09_wasserstein_stability():
    g = rng()
    worst = -math.inf
    grid = np.stack(np.meshgrid(np.linspace(-1, 2, 25), np.linspace(-1, 2, 25)), -1).reshape(-1, 2)
    for trial in range(30):
        a, b = int(g.integers(1, 16)), int(g.integers(1, 16))
        X = np.vstack([g.uniform(0, 1, size=(a, 2)), g.uniform(0, 1, size=(b, 2))])
        M = MetricSpace(X)
        mu = DiscreteMeasure(range(a), g.dirichlet(np.ones(a)))
        nu = DiscreteMeasure(range(a, a + b), g.dirichlet(np.ones(b)))
        w2 = wasserstein2(M, mu, nu)
        for m in (0.2, 0.5, 1.0):
            gap = max(abs(dtm_measure(M, mu, m, x) - dtm_measure(M, nu, m, x)) for x in grid)
            worst = max(worst, gap - w2 / math.sqrt(m))
    ok = worst <= 1e-9
    record(9, ok, f"30 trials x 3 masses on a 25x25 grid, max (gap - W2/sqrt m) = {worst:.3e}")
    assert ok


def test_criterion_10_linear_size():
    sparse_edges, full_edges = {}, {}
    for n in (1000, 2000):
        M = MetricSpace(gen_torus_spiral(n))
        sparse_edges[n] = sparse_rips_sizes(M, eps=0.5, max_dim=2)[1]
        # every pair is an edge of the untruncated Rips filtration
        full_edges[n] = int(np.count_nonzero(np.triu(np.isfinite(M.pairwise()), 1)))
    sparse_ratio = sparse_edges[2000] / sparse_edges[1000]
    full_ratio = full_edges[2000] / full_edges[1000]
    M = MetricSpace(gen_torus_spiral(2000))
    eps_grid = [round(0.1 * i, 1) for i in range(1, 10)]
    sizes = [sum(sparse_rips_sizes(M, eps=e, max_dim=2)) for e in eps_grid]
    i_min = int(np.argmin(sizes))
    interior = 0 < i_min < len(sizes) - 1
    ok = sparse_ratio <= 2.2 and abs(full_ratio - 4.0) <= 0.1 and interior
    record(
        10, ok,
        f"sparse edges {sparse_edges[1000]}->{sparse_edges[2000]} (x{sparse_ratio:.3f}), "
        f"full edges x{full_ratio:.3f}, sweep minimum at eps={eps_grid[i_min]} sizes={sizes}",
    )
    assert ok


def test_criterion_11_cube_skeleton_inference():
    t0 = time.perf_counter()
    X = gen_cube_skeleton()
    M = MetricSpace(X)
    W = dtm_weights(M, range(len(X)), 5)
    T = reduce(build_sparse_weighted_rips(M, W, 0.5, 3), 2)
    s1, s2 = snr(T, 1, 5), snr(T, 2, 1)
    # sublevel sets of the distance function to the cloud, on a grid over its bounding box
    Dp = reduce(grid_sublevel_filtration(distance_function(X), X, 0.05), 2)
    u2 = snr(Dp, 2, 1)
    elapsed = time.perf_counter() - t0
    ok = s1 >= 5 and s2 >= 5 and u2 <= 2 and elapsed < 60
    record(11, ok, f"T: snr dim1(j=5)={s1:.4g} dim2(j=1)={s2:.4g}; distance function: dim2(j=1)={u2:.4g}; "
                   f"runtime={elapsed:.1f} s")
    assert ok
