import math

import numpy as np
import pytest

from sparsedtm.datasets import (
    add_gaussian_noise,
    gen_cube_skeleton,
    gen_l1_cross,
    gen_torus_spiral,
    gen_uniform,
    gen_witness_cross,
)


def test_cube_skeleton_counts_and_geometry():
    X = gen_cube_skeleton()
    assert X.shape == (120, 3)
    assert 12 * 9 + 8 == 116
    skel = X[:116]
    assert skel.min() == 0.0 and skel.max() == 1.0
    # on an edge: at least two coordinates in {0, 1}
    on_faces = np.sum((skel == 0) | (skel == 1), axis=1)
    assert np.all(on_faces >= 2)
    assert len({tuple(p) for p in skel}) == 116
    # regular spacing 0.1 along each edge
    free = np.where(on_faces == 2, skel[np.arange(116), np.argmin((skel == 0) | (skel == 1), axis=1)], np.nan)
    np.testing.assert_allclose(np.sort(np.unique(np.round(free[~np.isnan(free)], 12))), np.arange(1, 10) / 10)
    out = X[116:]
    # outliers sit at face centres orthogonal to x and y; the z faces stay empty
    assert np.all(out[:, 2] == 0.5)
    assert sorted(map(tuple, out)) == sorted([(0, .5, .5), (1, .5, .5), (.5, 0, .5), (.5, 1, .5)])
    assert gen_cube_skeleton(outliers=False).shape == (116, 3)


def test_torus_spiral():
    X = gen_torus_spiral(1000)
    assert X.shape == (1000, 3)
    rho = np.hypot(X[:, 0], X[:, 1])
    np.testing.assert_allclose((rho - 2.0) ** 2 + X[:, 2] ** 2, 0.25, atol=1e-9)
    np.testing.assert_allclose(X[0], [2.5, 0.0, 0.0], atol=1e-15)
    theta = np.unwrap(np.arctan2(X[:, 1], X[:, 0]))
    np.testing.assert_allclose(np.diff(theta), 2 * math.pi / 1000, atol=1e-12)
    assert gen_torus_spiral().shape == (10000, 3)
    for bad in (dict(n=0), dict(R=0.5, r=0.5), dict(windings=0)):
        with pytest.raises(ValueError):
            gen_torus_spiral(**bad)


def test_gaussian_noise():
    X = gen_cube_skeleton()
    assert np.array_equal(add_gaussian_noise(X, 0.0, seed=3), X)
    a = add_gaussian_noise(X, 0.1, seed=3)
    assert np.array_equal(a, add_gaussian_noise(X, 0.1, seed=3))
    assert not np.array_equal(a, add_gaussian_noise(X, 0.1, seed=4))
    big = add_gaussian_noise(np.zeros((100000, 1)), 0.5, seed=1)
    assert abs(big.std() - 0.5) <= 0.02 * 0.5
    with pytest.raises(ValueError):
        add_gaussian_noise(X, -1.0)


def test_constructions():
    C = gen_l1_cross(3)
    assert C.shape == (6, 3)
    assert np.all(np.abs(C).sum(axis=1) == 1)
    W = gen_witness_cross(2, 0.1)
    assert W.shape == (16, 2)
    norms = np.sort(np.abs(W).sum(axis=1))
    assert np.sum(norms == 1.0) == 4
    np.testing.assert_allclose(norms[4:], 1 + math.sqrt(2) - 0.1)
    U = gen_uniform(50, 3, seed=2)
    assert U.shape == (50, 3) and np.array_equal(U, gen_uniform(50, 3, seed=2))
