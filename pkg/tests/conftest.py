import math

import numpy as np
import pytest

from volterra_radii import ConvolutionKernel


@pytest.fixture
def worked_kernel():
    """Scalar kernel K(j) = -2^{-j}: convergence radius 2, circle max 3."""
    return ConvolutionKernel(tails=[(-1.0, 0.5)], dim_out=1, dim_in=1)


@pytest.fixture
def growing_kernel():
    """Scalar kernel K(j) = -2^{j+1}: radius 1/2, finite-support resolvent."""
    return ConvolutionKernel(tails=[(-2.0, 2.0)], dim_out=1, dim_in=1)


@pytest.fixture
def zero_kernel():
    return ConvolutionKernel.zero(1)


def random_stable_kernel(rng, d=None, budget=0.85):
    """Random kernel with sum_j ||K(j)||_2 <= budget < 1, hence provably UES
    with convergence radius > 1."""
    if d is None:
        d = int(rng.integers(1, 5))
    head = [
        (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        for _ in range(rng.integers(0, 3))
    ]
    tails = []
    for _ in range(rng.integers(0, 3)):
        coeff = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        mod = rng.uniform(0.1, 0.6)
        arg = rng.uniform(0, 2 * math.pi)
        tails.append((coeff, mod * complex(math.cos(arg), math.sin(arg))))
    if not head and not tails:
        head = [rng.standard_normal((d, d)) + 0j]
    j0 = len(head)
    total = sum(np.linalg.norm(h, 2) for h in head)
    total += sum(
        np.linalg.norm(c, 2) * abs(r) ** j0 / (1 - abs(r)) for c, r in tails
    )
    scale = budget * rng.uniform(0.3, 1.0) / total
    return ConvolutionKernel(
        [scale * h for h in head], [(scale * c, r) for c, r in tails], d, d
    )


def random_kernel(rng, d=None, ratio_hi=0.9):
    """Random kernel without a stability guarantee (radius still > 1)."""
    if d is None:
        d = int(rng.integers(1, 5))
    head = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(rng.integers(1, 4))
    ]
    tails = []
    for _ in range(rng.integers(0, 3)):
        coeff = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        mod = rng.uniform(0.05, ratio_hi)
        arg = rng.uniform(0, 2 * math.pi)
        tails.append((coeff, mod * complex(math.cos(arg), math.sin(arg))))
    return ConvolutionKernel(head, tails, d, d)
