"""Convolution kernels, phase spaces and prehistories.

A kernel is stored as a finite head ``head[0..J-1]`` of complex matrices
plus a mixture of geometric tails contributing ``coeff * ratio**j`` for
``j >= J``.  Every Z-transform then has an exact closed form, which is the
representation all circle evaluations rely on.  General kernels are
approximated by truncation at ingestion time.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import DimensionError, DomainError
from .linalg import as_matrix, induced_norm, vec_norm


@dataclass(frozen=True)
class PhaseSpace:
    """Descriptor (p, gamma, variant) of a weighted-lp or weighted-c0 space.

    ``variant`` is ``"ellp"`` or ``"czero"``; the c0 variant forces p = inf.
    gamma > 0 means fading (older history weighted down), gamma = 0 non-fading.
    """

    p: float
    gamma: float
    variant: str = "ellp"

    def __post_init__(self):
        if self.variant not in ("ellp", "czero"):
            raise ValueError("variant must be 'ellp' or 'czero'")
        if self.variant == "czero" and self.p != math.inf:
            raise ValueError("czero variant requires p = inf")
        if self.p < 1:
            raise ValueError("p must lie in [1, inf]")

    @property
    def conjugate(self):
        """Hoelder conjugate p' with 1/p + 1/p' = 1."""
        if self.p == 1:
            return math.inf
        if self.p == math.inf:
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def is_fading(self):
        return self.gamma > 0

    @classmethod
    def parse(cls, text):
        """Parse the CLI syntax ``p:gamma[:variant]`` (p may be 'inf')."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad space spec {text!r}, expected p:gamma[:variant]")
        p = math.inf if parts[0] in ("inf", "Inf", "INF") else float(parts[0])
        gamma = float(parts[1])
        variant = parts[2] if len(parts) == 3 else "ellp"
        return cls(p, gamma, variant)

    def label(self):
        p = "inf" if self.p == math.inf else f"{self.p:g}"
        base = "B0" if self.variant == "czero" else "B"
        return f"{base}^({p},{self.gamma:g})"


class ConvolutionKernel:
    """Matrix-valued kernel ``j -> K(j)`` with geometric decay envelope."""

    __slots__ = ("head", "tails", "dim_out", "dim_in")

    def __init__(self, head=(), tails=(), dim_out=None, dim_in=None):
        head = [as_matrix(h) for h in head]
        raw_tails = [(as_matrix(c), complex(r)) for c, r in tails]
        shapes = [h.shape for h in head] + [c.shape for c, _ in raw_tails]
        if dim_out is None or dim_in is None:
            if not shapes:
                raise DimensionError("dimensions required for an empty kernel")
            dim_out, dim_in = shapes[0]
        for s in shapes:
            if s != (dim_out, dim_in):
                raise DimensionError(f"matrix shape {s} differs from {(dim_out, dim_in)}")

        # Merge equal ratios, drop vanishing coefficients, order canonically.
        merged = {}
        for coeff, ratio in raw_tails:
            if ratio == 0:
                raise ValueError("tail ratios must be nonzero")
            merged[ratio] = merged.get(ratio, 0) + coeff
        clean = [(c, r) for r, c in merged.items() if np.any(c != 0)]
        clean.sort(key=lambda t: (cmath.phase(t[1]), abs(t[1])))

        for h in head:
            h.flags.writeable = False
        for c, _ in clean:
            c.flags.writeable = False
        object.__setattr__(self, "head", tuple(head))
        object.__setattr__(self, "tails", tuple(clean))
        object.__setattr__(self, "dim_out", int(dim_out))
        object.__setattr__(self, "dim_in", int(dim_in))

    def __setattr__(self, name, value):
        raise AttributeError("ConvolutionKernel is immutable")

    @classmethod
    def zero(cls, dim_out, dim_in=None):
        return cls((), (), dim_out, dim_in if dim_in is not None else dim_out)

    @classmethod
    def memoryless(cls, matrix):
        """Kernel supported at j = 0 only."""
        return cls(head=[matrix])

    @property
    def is_square(self):
        return self.dim_out == self.dim_in

    @property
    def head_length(self):
        return len(self.head)

    def coefficient_at(self, j):
        """K(j): head entry below the head length, tail mixture above."""
        if j < 0:
            raise DomainError("coefficient index must be nonnegative")
        if j < len(self.head):
            return self.head[j]
        out = np.zeros((self.dim_out, self.dim_in), dtype=np.complex128)
        for coeff, ratio in self.tails:
            out += coeff * ratio**j
        return out

    def coefficients_dense(self, count):
        """Stack K(0..count-1) into a (count, dim_out, dim_in) array.

        Tail powers come from cumulative products, which stay exact for
        dyadic ratios (complex ** on large exponents would not).
        """
        out = np.zeros((count, self.dim_out, self.dim_in), dtype=np.complex128)
        for j, h in enumerate(self.head[:count]):
            out[j] = h
        j0 = len(self.head)
        if count > j0:
            for coeff, ratio in self.tails:
                pows = np.empty(count - j0, dtype=np.complex128)
                pows[0] = ratio**j0
                if count - j0 > 1:
                    pows[1:] = ratio
                    pows = np.cumprod(pows)
                out[j0:] += coeff[None, :, :] * pows[:, None, None]
        return out

    @property
    def convergence_radius(self):
        """Radius of convergence of the Z-transform power series."""
        if not self.tails:
            return math.inf
        return min(1.0 / abs(r) for _, r in self.tails)

    @property
    def decays_exponentially(self):
        """True when the kernel is finitely supported or all ratios lie inside
        the unit circle (equivalently, convergence radius > 1)."""
        return self.convergence_radius > 1.0

    def ztransform_grid(self, zetas):
        """Closed-form Z-transform on an array of points inside the disc."""
        zetas = np.asarray(zetas, dtype=np.complex128)
        out = np.zeros(zetas.shape + (self.dim_out, self.dim_in), dtype=np.complex128)
        for j, h in enumerate(self.head):
            out += (zetas**j)[..., None, None] * h
        J = len(self.head)
        for coeff, ratio in self.tails:
            w = ratio * zetas
            out += ((w**J) / (1.0 - w))[..., None, None] * coeff
        return out

    def ztransform(self, zeta):
        """Z-transform at a single point; the series must converge there."""
        if abs(zeta) >= self.convergence_radius:
            raise DomainError(
                f"|zeta| = {abs(zeta):g} is outside the open convergence disc "
                f"(radius {self.convergence_radius:g})"
            )
        return self.ztransform_grid(np.asarray(zeta, dtype=np.complex128))

    def defined_on(self, space):
        """Whether the weighted l^{p'} summability condition holds on the space."""
        pprime = space.conjugate
        g = math.exp(space.gamma)
        for _, ratio in self.tails:
            r = g * abs(ratio)
            if pprime == math.inf:
                if r > 1.0:
                    return False
            elif r >= 1.0:
                return False
        return True

    def scaled(self, factor):
        """Kernel with every coefficient multiplied by a scalar."""
        return ConvolutionKernel(
            [factor * h for h in self.head],
            [(factor * c, r) for c, r in self.tails],
            self.dim_out,
            self.dim_in,
        )

    def plus_memoryless(self, matrix):
        """Kernel with ``matrix`` added to K(0)."""
        length = max(1, len(self.head))
        head = [np.array(self.coefficient_at(j)) for j in range(length)]
        head[0] = head[0] + as_matrix(matrix, self.dim_out, self.dim_in)
        return ConvolutionKernel(head, self.tails, self.dim_out, self.dim_in)

    def premultiply(self, matrix):
        """Kernel j -> M K(j) for a fixed matrix M."""
        m = as_matrix(matrix)
        if m.shape[1] != self.dim_out:
            raise DimensionError("premultiplier width differs from the kernel output dim")
        return ConvolutionKernel(
            [m @ h for h in self.head],
            [(m @ c, r) for c, r in self.tails],
            m.shape[0],
            self.dim_in,
        )

    def __eq__(self, other):
        if not isinstance(other, ConvolutionKernel):
            return NotImplemented
        return (
            self.dim_out == other.dim_out
            and self.dim_in == other.dim_in
            and len(self.head) == len(other.head)
            and all(np.array_equal(a, b) for a, b in zip(self.head, other.head))
            and len(self.tails) == len(other.tails)
            and all(
                ra == rb and np.array_equal(ca, cb)
                for (ca, ra), (cb, rb) in zip(self.tails, other.tails)
            )
        )

    def __hash__(self):
        return hash((self.dim_out, self.dim_in, len(self.head), len(self.tails)))

    def __repr__(self):
        return (
            f"ConvolutionKernel({self.dim_out}x{self.dim_in}, "
            f"head={len(self.head)}, tails={len(self.tails)})"
        )


class Prehistory:
    """Finitely supported initial data: values at nonpositive offsets."""

    __slots__ = ("entries", "dim")

    def __init__(self, entries, dim=None):
        norm_entries = []
        seen = set()
        for m, value in entries:
            m = int(m)
            if m > 0:
                raise ValueError("prehistory offsets must be <= 0")
            if m in seen:
                raise ValueError(f"duplicate prehistory offset {m}")
            seen.add(m)
            v = np.asarray(value, dtype=np.complex128).reshape(-1)
            if dim is None:
                dim = v.size
            if v.size != dim:
                raise DimensionError("prehistory entries must share the state dimension")
            v.flags.writeable = False
            norm_entries.append((m, v))
        if dim is None:
            raise DimensionError("dimension required for an empty prehistory")
        norm_entries.sort(key=lambda e: -e[0])
        object.__setattr__(self, "entries", tuple(norm_entries))
        object.__setattr__(self, "dim", int(dim))

    def __setattr__(self, name, value):
        raise AttributeError("Prehistory is immutable")

    @classmethod
    def impulse(cls, value):
        """Prehistory concentrated at offset 0."""
        return cls([(0, value)])

    @property
    def depth(self):
        """Largest delay with a stored value (0 for empty)."""
        return max((-m for m, _ in self.entries), default=0)


def add_kernels(a, b):
    """Coefficient-wise sum of two kernels of identical shape.

    Heads are extended to the longer one (tail values materialize exactly),
    tails are pooled; equal ratios merge in the constructor.
    """
    if (a.dim_out, a.dim_in) != (b.dim_out, b.dim_in):
        raise DimensionError("kernel shapes differ")
    J = max(a.head_length, b.head_length)
    head = [a.coefficient_at(j) + b.coefficient_at(j) for j in range(J)]
    return ConvolutionKernel(
        head, list(a.tails) + list(b.tails), a.dim_out, a.dim_in
    )


def phase_norm(phi, space, config=DEFAULT_CONFIG):
    """Weighted l^p norm of a prehistory over its support (sup for p = inf)."""
    mode = config.state_norm
    terms = [
        math.exp(space.gamma * m) * vec_norm(v, mode) for m, v in phi.entries
    ]
    if not terms:
        return 0.0
    if space.p == math.inf:
        return max(terms)
    return sum(t ** space.p for t in terms) ** (1.0 / space.p)


def weighted_tail_sum(kernel, gamma, pprime, mode, rel_tol=1e-16, hard_cap=200000):
    """(sum_j ||e^{gamma j} K(j)||^{p'})^{1/p'}, sup over j when p' = inf.

    Geometric tails are summed in closed form when a single tail is present;
    mixtures are accumulated until the envelope bound falls below ``rel_tol``
    of the running total.  Divergence must be excluded by the caller.
    """
    g = math.exp(gamma)
    J = len(kernel.head)
    terms = [
        g**j * induced_norm(kernel.coefficient_at(j), mode) for j in range(J)
    ]

    if not kernel.tails:
        pass
    elif len(kernel.tails) == 1:
        coeff, ratio = kernel.tails[0]
        cn = induced_norm(coeff, mode)
        r = g * abs(ratio)
        if pprime == math.inf:
            # terms cn * r^j, j >= J: decreasing (r <= 1), sup at j = J
            terms.append(cn * r**J)
        else:
            q = r**pprime
            total_tail = (cn**pprime) * (q**J) / (1.0 - q)
            head_sum = sum(t**pprime for t in terms)
            return (head_sum + total_tail) ** (1.0 / pprime)
    else:
        env_c = sum(induced_norm(c, mode) for c, _ in kernel.tails)
        env_r = g * max(abs(r) for _, r in kernel.tails)
        j = J
        if pprime == math.inf:
            best = max(terms, default=0.0)
            while j < hard_cap:
                t = g**j * induced_norm(kernel.coefficient_at(j), mode)
                best = max(best, t)
                if env_c * env_r**j < rel_tol * max(best, 1e-300) and env_r < 1.0:
                    break
                if env_r >= 1.0 and j - J > 4096:
                    # bounded oscillation: the sup over the remaining range is
                    # at most the envelope constant, fold it in conservatively
                    best = max(best, env_c * env_r**j)
                    break
                j += 1
            return max(best, 0.0)
        total = sum(t**pprime for t in terms)
        while j < hard_cap:
            t = g**j * induced_norm(kernel.coefficient_at(j), mode)
            total += t**pprime
            q = env_r**pprime
            tail_bound = (env_c**pprime) * (q ** (j + 1)) / (1.0 - q)
            if tail_bound < rel_tol * max(total, 1e-300):
                break
            j += 1
        return total ** (1.0 / pprime)

    if pprime == math.inf:
        return max(terms, default=0.0)
    return sum(t**pprime for t in terms) ** (1.0 / pprime)
