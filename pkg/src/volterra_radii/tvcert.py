"""Small-gain certificates for time-varying disturbances and a trajectory
simulator for empirical cross-checks.

A disturbance is a finite table of per-time coefficient rows plus one
"eventual" kernel bounding everything from time n0 on.  Only the eventual
regime decides a certificate: modifying finitely many rows never changes
uniform exponential stability.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import DimensionError, DivergentWeightError, InsufficientDataError
from .kernel import ConvolutionKernel, PhaseSpace, weighted_tail_sum
from .radii import radius_structured, radius_unstructured
from .spectral import decay_fit


@dataclass(frozen=True)
class Certificate:
    holds: bool
    test_kind: str
    threshold: float
    attained: float
    space: PhaseSpace


class DisturbanceSpec:
    """Rows Delta(n, .) for n < n0 plus a single eventual kernel for n >= n0."""

    __slots__ = ("rows", "eventual", "n0", "dim")

    def __init__(self, eventual, rows=(), n0=0):
        rows = tuple(sorted(((int(n), k) for n, k in rows), key=lambda e: e[0]))
        seen = set()
        for n, k in rows:
            if n < 0 or n >= n0:
                raise ValueError("table rows must satisfy 0 <= n < n0")
            if n in seen:
                raise ValueError(f"duplicate disturbance row at n = {n}")
            seen.add(n)
            if (k.dim_out, k.dim_in) != (eventual.dim_out, eventual.dim_in):
                raise DimensionError("disturbance rows must share the eventual kernel's shape")
        if not eventual.decays_exponentially:
            raise ValueError("eventual disturbance kernel must have a decay envelope")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "eventual", eventual)
        object.__setattr__(self, "n0", int(n0))
        object.__setattr__(self, "dim", eventual.dim_out)

    def __setattr__(self, name, value):
        raise AttributeError("DisturbanceSpec is immutable")

    def row_at(self, n):
        """Coefficient kernel active at time n (zero row when unspecified)."""
        if n >= self.n0:
            return self.eventual
        for m, k in self.rows:
            if m == n:
                return k
        return ConvolutionKernel.zero(self.eventual.dim_out, self.eventual.dim_in)


def weighted_row_norm(row, space, config=DEFAULT_CONFIG):
    """(sum_j ||e^{j gamma} Delta(j)||^{p'})^{1/p'}; sup over j when p' = inf.

    Equals the operator norm of the row on the space for scalar systems and
    upper-bounds it in general.  Geometric tails are summed in closed form.
    """
    pprime = space.conjugate
    g = math.exp(space.gamma)
    for _, ratio in row.tails:
        r = g * abs(ratio)
        if pprime == math.inf:
            if r > 1.0:
                raise DivergentWeightError(
                    f"weighted coefficients unbounded on {space.label()}"
                )
        elif r >= 1.0:
            raise DivergentWeightError(
                f"weighted l^{pprime:g} sum diverges on {space.label()}"
            )
    return weighted_tail_sum(row, space.gamma, pprime, config.state_norm)


def smallgain_certify(kernel, spec, space, config=DEFAULT_CONFIG, structure=None):
    """Sufficient UE-stability test: eventual row norms strictly below the
    certified time-varying radius of the base system.

    Finite-prefix rows are ignored for the verdict (they cannot affect UE
    stability); they are still validated for dimensions.
    """
    if spec.dim != kernel.dim_in:
        raise DimensionError("disturbance dimension differs from the state dimension")
    if structure is None:
        report = radius_unstructured(kernel, space, config)
    else:
        report = radius_structured(kernel, structure, space, config)
    threshold = report.r_t_lower
    attained = weighted_row_norm(spec.eventual, space, config)
    if space.p == 1.0:
        kind = "N1"
    elif space.p == 2.0:
        kind = "N2"
    elif space.p == math.inf:
        kind = "Ninf"
    else:
        kind = "radius_smallgain"
    return Certificate(
        holds=bool(attained < threshold),
        test_kind=kind,
        threshold=threshold,
        attained=attained,
        space=space,
    )


def base_zero_test(spec, p, beta, config=DEFAULT_CONFIG):
    """Zero-base-kernel stability test with explicit thresholds.

    For 1 < p <= inf the weighted l^{p'} power sum must stay strictly below
    (1 - e^{-p beta})^{1/(p-1)}; for p = 1 the weighted sup must stay below
    1 - e^{-beta}.  Exponents follow the p = inf conventions (threshold 1).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    space = PhaseSpace(p, beta)
    pprime = space.conjugate
    g = math.exp(beta)
    for _, ratio in spec.eventual.tails:
        r = g * abs(ratio)
        if pprime == math.inf:
            if r > 1.0:
                raise DivergentWeightError("weighted coefficients unbounded")
        elif r >= 1.0:
            raise DivergentWeightError("weighted power sum diverges")
    value = weighted_tail_sum(spec.eventual, beta, pprime, config.state_norm)
    if p == 1.0:
        attained = value
        threshold = 1.0 - math.exp(-beta)
    elif p == math.inf:
        attained = value  # p' = 1 sum, exponent 1/(p-1) -> 0 gives threshold 1
        threshold = 1.0
    else:
        attained = value**pprime
        threshold = (1.0 - math.exp(-p * beta)) ** (1.0 / (p - 1.0))
    return Certificate(
        holds=bool(attained < threshold),
        test_kind="general_p",
        threshold=threshold,
        attained=attained,
        space=space,
    )


def simulate(kernel, spec, init, tau=0, horizon=100, config=DEFAULT_CONFIG):
    """Trajectory x(tau..tau+horizon) of the (perturbed) system by direct
    recursion over the finitely supported prehistory.

    Returns (trajectory, decay): trajectory[k] = x(tau+k); the decay envelope
    is fitted over the second half of the horizon (None if unfittable).
    """
    if not kernel.is_square:
        raise DimensionError("simulation requires a square kernel")
    d = kernel.dim_in
    if init.dim != d:
        raise DimensionError("initial data dimension differs from the state dimension")
    if spec is not None and spec.dim != d:
        raise DimensionError("disturbance dimension differs from the state dimension")
    if tau < 0 or horizon < 1:
        raise ValueError("tau must be >= 0 and horizon >= 1")

    depth = init.depth
    length = depth + horizon + 1  # states x(tau-depth .. tau+horizon)
    buf = np.zeros((length, d), dtype=np.complex128)
    for m, v in init.entries:
        buf[depth + m] = v

    max_lag = length - 1
    base = kernel.coefficients_dense(max_lag + 1)
    dense_rows = {}
    if spec is not None:
        ev = spec.eventual.coefficients_dense(max_lag + 1)
        for n, k in spec.rows:
            dense_rows[n] = k.coefficients_dense(max_lag + 1)

    for step in range(horizon):
        n = tau + step
        i = depth + step  # buffer index of x(n)
        lags = i + 1  # states x(n), x(n-1), ..., x(tau-depth)
        coeffs = base[:lags]
        if spec is not None:
            if n >= spec.n0:
                coeffs = coeffs + ev[:lags]
            elif n in dense_rows:
                coeffs = coeffs + dense_rows[n][:lags]
        buf[i + 1] = np.einsum("jab,jb->a", coeffs, buf[i::-1])

    trajectory = buf[depth:]
    decay = None
    lo = horizon // 2
    if horizon - lo >= 1:
        try:
            decay = decay_fit(trajectory, (lo, horizon), config)
        except InsufficientDataError:
            decay = None
    return trajectory, decay
