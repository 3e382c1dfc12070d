"""Input-state and input-output operators: finite sections and Young bounds.

Finite lower-triangular block-Toeplitz sections give certified lower
bounds on the operator norms (sections are restrictions, and nested
sections are monotone).  The l1 coefficient sum gives the matching upper
bound via Young's convolution inequality; its tail is certified by a
geometric ratio test, flagged when the test never engages.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import conv_triangular
from .config import DEFAULT_CONFIG
from .errors import CertificationError, DimensionError, DomainError, NonDecayingStructureError
from .kernel import ConvolutionKernel
from .linalg import as_matrix, induced_norm
from .spectral import resolvent_sequence

RATIO_TEST_STEPS = 8


@dataclass(frozen=True)
class NormBounds:
    lower: float
    upper: float
    section_size: int
    q: float
    certified_upper: bool


@dataclass(frozen=True)
class PerturbationStructure:
    """Structured disturbance channel: output kernel E(.) and input matrix D."""

    E: ConvolutionKernel
    D: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "D", as_matrix(self.D))
        self.D.flags.writeable = False
        if self.E.dim_in != self.D.shape[0]:
            raise DimensionError(
                f"E maps the state space of dim {self.E.dim_in} but D has "
                f"{self.D.shape[0]} rows"
            )

    @property
    def state_dim(self):
        return self.E.dim_in

    @property
    def u1(self):
        return self.E.dim_out

    @property
    def u2(self):
        return int(self.D.shape[1])

    @property
    def output_decays(self):
        return self.E.decays_exponentially

    @classmethod
    def memoryless(cls, e_matrix, d_matrix):
        return cls(ConvolutionKernel.memoryless(e_matrix), as_matrix(d_matrix))

    @classmethod
    def unstructured(cls, dim):
        eye = np.eye(dim, dtype=np.complex128)
        return cls.memoryless(eye, eye)


def apply_input_state(kernel, f, n_max, config=DEFAULT_CONFIG):
    """Zero-initial-data response x(0..n_max) to the forcing f.

    Computed by convolution with the resolvent sequence and cross-checked
    against the defining recursion; disagreement raises.
    """
    if not kernel.is_square:
        raise DimensionError("input-state operator requires a square kernel")
    d = kernel.dim_in
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim == 1:
        f = f[:, None] if d == 1 else f[None, :]
    if f.shape[1] != d:
        raise DimensionError(f"forcing values must have dimension {d}")
    ff = np.zeros((n_max, d), dtype=np.complex128)
    ff[: min(len(f), n_max)] = f[:n_max]

    xs = resolvent_sequence(kernel, max(n_max - 1, 0), config)
    conv = conv_triangular(xs[:n_max], ff[:, :, None])[:, :, 0]
    out = np.zeros((n_max + 1, d), dtype=np.complex128)
    out[1:] = conv

    # defining recursion x(n+1) = sum_{j<=n} K(n-j) x(j) + f(n)
    coeffs = kernel.coefficients_dense(n_max)
    chk = np.zeros_like(out)
    for n in range(n_max):
        chk[n + 1] = ff[n] + np.einsum("jab,jb->a", coeffs[: n + 1], chk[n::-1])
    scale = 1.0 + float(np.max(np.abs(out)))
    if float(np.max(np.abs(out - chk))) > 1e-8 * scale:
        raise CertificationError("input-state convolution disagrees with the recursion")
    return out


def _toeplitz_lower(blocks, section):
    """Dense (section*p) x (section*q) lower-triangular block-Toeplitz matrix."""
    s, p, q = blocks.shape[0], blocks.shape[1], blocks.shape[2]
    n = min(section, s)
    big = np.zeros((section * p, section * q), dtype=np.complex128)
    for m in range(n):
        blk = blocks[m]
        for i in range(m, section):
            big[i * p : (i + 1) * p, (i - m) * q : (i - m + 1) * q] = blk
    return big


def _section_lower(blocks, q, section, mode):
    if q == 2.0:
        big = _toeplitz_lower(blocks[:section], section)
        return float(np.linalg.svd(big, compute_uv=False)[0])
    # block column (q=1) and block row (q=inf) sums coincide on the
    # triangular Toeplitz section: both peak at the full diagonal sum
    return float(sum(induced_norm(blocks[m], mode) for m in range(min(section, len(blocks)))))


def _young_upper(norms):
    """l1 sum with a geometric tail certificate over the last ratio window."""
    partial = float(np.sum(norms))
    window = norms[-(RATIO_TEST_STEPS + 1) :]
    if len(window) < RATIO_TEST_STEPS + 1:
        return math.inf, False
    if np.all(window == 0.0):
        return partial, True
    if np.any(window[:-1] == 0.0):
        return math.inf, False
    ratios = window[1:] / window[:-1]
    r = float(np.max(ratios))
    if r >= 1.0:
        return math.inf, False
    return partial + float(norms[-1]) * r / (1.0 - r), True


def gamma_norm(kernel, q, section=None, config=DEFAULT_CONFIG):
    """Bounds on the input-state operator norm on l^q, q in {1, 2, inf}."""
    if q not in (1.0, 2.0, math.inf):
        raise DomainError("only q in {1, 2, inf} is computed at section level")
    if not kernel.is_square:
        raise DimensionError("input-state norm requires a square kernel")
    section = section or config.section
    budget = max(section, config.n_max)
    xs = resolvent_sequence(kernel, budget, config)
    mode = config.state_norm
    lower = _section_lower(xs, float(q), section, mode)
    norms = np.array([induced_norm(x, mode) for x in xs])
    upper, certified = _young_upper(norms)
    if certified and lower > upper:
        upper = lower  # rounding guard: bounds may only cross by float noise
    return NormBounds(lower, upper, section, float(q), certified)


def io_coefficients(kernel, structure, n_max, config=DEFAULT_CONFIG):
    """Markov coefficients H(m) = sum_{i<=m} E(i) X(m-i) of the feedback loop."""
    if structure.state_dim != kernel.dim_in or not kernel.is_square:
        raise DimensionError("structure state dimension differs from the kernel's")
    xs = resolvent_sequence(kernel, n_max, config)
    e_dense = structure.E.coefficients_dense(n_max + 1)
    return conv_triangular(e_dense, xs)


def io_norm(kernel, structure, q, section=None, config=DEFAULT_CONFIG):
    """Bounds on the input-output operator norm on l^q for the structure (D, E)."""
    if q not in (1.0, 2.0, math.inf):
        raise DomainError("only q in {1, 2, inf} is computed at section level")
    if not structure.output_decays:
        raise NonDecayingStructureError(
            "output kernel must decay exponentially (all tail ratios inside the unit circle)"
        )
    section = section or config.section
    budget = max(section, config.n_max)
    h = io_coefficients(kernel, structure, budget, config)
    g = h @ structure.D
    mode = config.state_norm
    lower = _section_lower(g, float(q), section, mode)
    norms = np.array([induced_norm(m, mode) for m in g])
    upper, certified = _young_upper(norms)
    if certified and lower > upper:
        upper = lower
    return NormBounds(lower, upper, section, float(q), certified)
