"""Weighted Rips filtration of a weighted point set."""
from __future__ import annotations

import math

import numpy as np

from .dtm import WeightedPointSet
from .filtration import Filtration, flag_filtration
from .metric import MetricSpace


def edge_birth(d: float, wp: float, wq: float) -> float:
    """Smallest ``alpha`` with ``d <= r_p(alpha) + r_q(alpha)``, ``r(alpha) = sqrt(alpha^2 - w^2)``.

    >>> edge_birth(1.0, 0.0, 0.0)
    0.5
    >>> edge_birth(3.0, 0.0, 5.0)
    5.0
    """
    if d < 0 or wp < 0 or wq < 0:
        raise ValueError("distance and weights must be nonnegative")
    return float(edge_births(np.array([d]), np.array([wp]), np.array([wq]))[0])


def edge_births(d: np.ndarray, wp: np.ndarray, wq: np.ndarray) -> np.ndarray:
    """Vectorised :func:`edge_birth`."""
    d = np.asarray(d, dtype=float)
    a = np.minimum(wp, wq)
    b = np.maximum(wp, wq)
    a2, b2, d2 = a * a, b * b, d * d
    # ball of the heavier point is already large enough once it appears
    early = d2 <= b2 - a2
    with np.errstate(divide="ignore", invalid="ignore"):
        # written so that equal weights give exactly d / 2
        h = 0.5 * d + (a2 - b2) / (2.0 * d)
        late = np.hypot(b, h)
    return np.where(early, b, late)


def _sorted_weights(W: WeightedPointSet):
    order = np.argsort(W.ids, kind="stable")
    return W.ids[order], W.weights[order]


def _relabel(F: Filtration, ids: np.ndarray) -> Filtration:
    if np.array_equal(ids, np.arange(len(ids))):
        return F
    lut = ids.tolist()
    simplices = [tuple(lut[v] for v in s) for s in F.simplices]
    return Filtration(simplices, F.values, presorted=True)


def weighted_rips_edges(M: MetricSpace, W: WeightedPointSet):
    """All pairs ``(i, j)`` (positions in id order) with their births."""
    ids, w = _sorted_weights(W)
    D = M.pairwise(ids)
    iu, ju = np.triu_indices(len(ids), k=1)
    return ids, w, iu, ju, edge_births(D[iu, ju], w[iu], w[ju])


def build_weighted_rips(
    M: MetricSpace, W: WeightedPointSet, max_dim: int, alpha_max: float = math.inf
) -> Filtration:
    """Weighted Rips filtration up to simplices of dimension ``max_dim``.

    Vertices enter at their weight, edges at :func:`edge_birth`, higher
    simplices at the largest value of their edges.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    ids, w, iu, ju, births = weighted_rips_edges(M, W)
    keep = births <= alpha_max
    F = flag_filtration(
        w, np.column_stack([iu[keep], ju[keep]]), births[keep], max_dim, alpha_max=alpha_max
    )
    return _relabel(F, ids)


def build_rips(M: MetricSpace, ids, max_dim: int, alpha_max: float = math.inf) -> Filtration:
    """Plain Rips filtration with the ``d/2`` scale convention."""
    ids = np.asarray(ids, dtype=int)
    return build_weighted_rips(M, WeightedPointSet(ids, np.zeros(len(ids)), lipschitz=0.0), max_dim, alpha_max)
