"""Exact quadratic Wasserstein distance between discrete measures."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .dtm import DiscreteMeasure
from .metric import MetricSpace

MAX_SUPPORT = 512


class TransportError(ValueError):
    pass


def transport_plan(cost: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Optimal plan of the transportation problem ``min <cost, plan>``.

    Solved as a linear program with the HiGHS simplex, which returns a vertex
    of the transportation polytope.
    """
    n, m = cost.shape
    rows = np.repeat(np.arange(n), m)
    cols = np.tile(np.arange(m), n)
    var = np.arange(n * m)
    A = coo_matrix(
        (np.ones(2 * n * m), (np.concatenate([rows, n + cols]), np.concatenate([var, var]))),
        shape=(n + m, n * m),
    )
    rhs = np.concatenate([a, b])
    res = linprog(cost.ravel(), A_eq=A.tocsr(), b_eq=rhs, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise TransportError(f"transportation solve failed: {res.message}")
    plan = np.maximum(res.x.reshape(n, m), 0.0)
    return plan, float(np.sum(plan * cost))


def wasserstein2(M: MetricSpace, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """W2 distance between two discrete measures of equal total mass."""
    if len(mu.ids) > MAX_SUPPORT or len(nu.ids) > MAX_SUPPORT:
        raise TransportError(f"supports limited to {MAX_SUPPORT} points")
    if abs(mu.total - nu.total) > 1e-9 * max(mu.total, nu.total):
        raise TransportError(f"total masses differ: {mu.total} vs {nu.total}")
    D = M.pairwise()[np.ix_(mu.ids, nu.ids)]
    # rescale nu so the equality constraints are exactly consistent
    b = nu.masses * (mu.total / nu.total)
    _, cost = transport_plan(D * D, mu.masses, b)
    return math.sqrt(max(cost, 0.0))
