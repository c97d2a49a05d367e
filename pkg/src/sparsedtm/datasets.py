"""Synthetic point clouds used by the experiments.

Random draws use NumPy's ``Generator`` with the PCG64 bit generator, whose
streams are identical across platforms for a given seed.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_cube_skeleton(per_edge: int = 9, outliers: bool = True) -> np.ndarray:
    """Regular sample of the edges of the unit cube, plus optional face-centre outliers.

    With the defaults: 8 corners and 9 points inside each of the 12 edges
    (spacing 0.1), i.e. 116 points, followed by the centres of the four faces
    orthogonal to the x and y axes. The two faces orthogonal to z stay empty.
    """
    corners = np.array(list(itertools.product((0.0, 1.0), repeat=3)))
    t = np.arange(1, per_edge + 1) / (per_edge + 1)
    pts = [corners]
    for a, b in itertools.combinations(corners, 2):
        if np.sum(a != b) == 1:
            pts.append(a + t[:, None] * (b - a))
    if outliers:
        pts.append(
            np.array(
                [
                    [0.0, 0.5, 0.5],
                    [1.0, 0.5, 0.5],
                    [0.5, 0.0, 0.5],
                    [0.5, 1.0, 0.5],
                ]
            )
        )
    return np.vstack(pts)


def gen_torus_spiral(n: int = 10000, R: float = 2.0, r: float = 0.5, windings: int = 20) -> np.ndarray:
    """``n`` points evenly spaced in angle on a curve winding around a torus."""
    if n < 1 or windings < 1 or not R > r > 0:
        raise ValueError("need n >= 1, windings >= 1 and R > r > 0")
    theta = 2.0 * math.pi * np.arange(n) / n
    phi = windings * theta
    ring = R + r * np.cos(phi)
    return np.column_stack([ring * np.cos(theta), ring * np.sin(theta), r * np.sin(phi)])


def add_gaussian_noise(points: np.ndarray, sigma: float, seed=0) -> np.ndarray:
    """Independent normal perturbation of every coordinate."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    points = np.asarray(points, dtype=float)
    if sigma == 0:
        return points.copy()
    return points + rng(seed).normal(0.0, sigma, size=points.shape)


def gen_l1_cross(d: int) -> np.ndarray:
    """The ``2d`` signed unit basis vectors of R^d."""
    eye = np.eye(d)
    return np.vstack([-eye, eye])


def gen_witness_cross(d: int, eps: float) -> np.ndarray:
    """``4 d^2`` points on the axes: unit vectors once, ``(1 + sqrt 2 - eps)`` multiples ``2d - 1`` times."""
    far = 1.0 + math.sqrt(2.0) - eps
    pts = []
    for axis in range(d):
        for sign in (-1.0, 1.0):
            e = np.zeros(d)
            e[axis] = sign
            pts.append(e)
            pts.extend([far * e] * (2 * d - 1))
    return np.array(pts)


def gen_uniform(n: int, dim: int = 2, seed=0) -> np.ndarray:
    return rng(seed).uniform(0.0, 1.0, size=(n, dim))


GENERATORS = {
    "cube-skeleton": gen_cube_skeleton,
    "torus-spiral": gen_torus_spiral,
    "l1-cross": gen_l1_cross,
    "witness-cross": gen_witness_cross,
    "uniform": gen_uniform,
}
