"""Stability radii and worst-case disturbance synthesis.

The time-invariant radius w.r.t. a structure (D, E) is the reciprocal of
the transfer maximum max_{|zeta|=1} ||Ehat(zeta) [I - zeta*Khat(zeta)]^{-1} D||;
unstructured and delayed-feedback radii add the phase-space factor
(1 - e^{-p*gamma})^{1/p}.  Time-varying radii match these exactly in the
Euclidean mode and are otherwise reported as a certified interval.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import (
    BaseUnstableError,
    CertificationError,
    DimensionError,
    ModeError,
    NonDecayingStructureError,
    SpaceNotSupportedError,
)
from .kernel import PhaseSpace
from .linalg import as_matrix, golden_max, induced_norm
from .operators import PerturbationStructure, gamma_norm, io_norm
from .spectral import (
    _circle_scan,
    _tie_break_index,
    pencil_grid,
    winding_number_det,
)

_TWO_PI = 2.0 * math.pi

VALIDITY_FADING = "fading_ok"
VALIDITY_NONFADING_DECAYING = "nonfading_decaying_E"
VALIDITY_ZERO_NONDECAYING = "zero_by_nondecaying_E"
VALIDITY_ZERO_UNSTRUCTURED = "zero_unstructured_nonfading"
VALIDITY_BASE_NOT_UES = "base_not_ues"


@dataclass(frozen=True)
class RadiusReport:
    r_c: float
    r_t_lower: float
    r_t_exact: bool
    transfer_max: Optional[float]
    zeta_star: Optional[complex]
    space_factor: float
    space: PhaseSpace
    validity: str


def ensure_ues(kernel, config=DEFAULT_CONFIG):
    """Raise BaseUnstableError unless the unperturbed system is UES with a
    Z-transform reaching past the unit circle (required by every radius)."""
    if not kernel.is_square:
        raise DimensionError("stability radii require a square kernel")
    if kernel.convergence_radius <= 1.0:
        raise BaseUnstableError(
            "kernel is not defined on any fading phase space "
            "(Z-transform convergence radius <= 1)"
        )
    mode = config.state_norm
    _, zetas, gains, scale = _circle_scan(kernel, config.grid_size, mode)
    sigma = float(np.min(gains))
    if sigma <= config.sigma_tol * scale:
        k = int(np.argmin(gains))
        raise BaseUnstableError(
            f"pencil singular on the unit circle near zeta = {complex(zetas[k]):.6g}"
        )
    if winding_number_det(kernel, config) != 0:
        raise BaseUnstableError("pencil has zeros inside the unit disc")


def space_factor(space):
    """(1 - e^{-p*gamma})^{1/p} with the p = inf conventions (factor 1)."""
    if space.p == math.inf:
        return 1.0
    return (1.0 - math.exp(-space.p * space.gamma)) ** (1.0 / space.p)


def _check_space(space):
    if space.gamma < 0:
        raise SpaceNotSupportedError("spaces with gamma < 0 are not supported")
    if space.gamma == 0 and space.p != math.inf:
        raise SpaceNotSupportedError(
            "non-fading spaces are supported only in the p = inf variants"
        )


def _require_defined(kernel, space):
    if not kernel.defined_on(space):
        raise BaseUnstableError(
            f"system is not defined on {space.label()} (weighted coefficient "
            "sum diverges), hence not UES there"
        )


def transfer_max_on_circle(kernel, structure, config=DEFAULT_CONFIG):
    """Maximum of ||Ehat(zeta) [I - zeta*Khat(zeta)]^{-1} D|| on |zeta| = 1.

    Uniform grid of config.grid_size points, then golden-section refinement
    around the best cell; ties break toward the smallest principal argument.
    """
    ensure_ues(kernel, config)
    if not structure.output_decays:
        raise NonDecayingStructureError(
            "transfer function needs an exponentially decaying output kernel"
        )
    if structure.state_dim != kernel.dim_in:
        raise DimensionError("structure state dimension differs from the kernel's")
    mode = config.state_norm
    n = config.grid_size
    thetas = _TWO_PI * np.arange(n) / n
    zetas = np.exp(1j * thetas)

    def gain_many(zs):
        pencils = pencil_grid(kernel, zs)
        rhs = np.broadcast_to(structure.D, (len(zs),) + structure.D.shape)
        sol = np.linalg.solve(pencils, rhs)
        g = structure.E.ztransform_grid(zs) @ sol
        return induced_norm(g, mode)

    vals = gain_many(zetas)
    best = float(np.max(vals))
    near = np.flatnonzero(vals >= best - 1e-12 * (1.0 + best))
    k = _tie_break_index(zetas, vals, near)

    def gain(theta):
        return float(gain_many(np.array([cmath.exp(1j * theta)]))[0])

    h = _TWO_PI / n
    theta_ref, val_ref = golden_max(gain, thetas[k] - h, thetas[k] + h, config.refine_tol)
    if val_ref > vals[k]:
        return float(val_ref), cmath.exp(1j * theta_ref)
    return float(vals[k]), complex(zetas[k])


def transfer_profile(kernel, structure, config=DEFAULT_CONFIG):
    """Grid profile (thetas, ||G(e^{i theta})||) of the transfer norm, plot-ready."""
    ensure_ues(kernel, config)
    if not structure.output_decays:
        raise NonDecayingStructureError(
            "transfer function needs an exponentially decaying output kernel"
        )
    mode = config.state_norm
    n = config.grid_size
    thetas = _TWO_PI * np.arange(n) / n
    zetas = np.exp(1j * thetas)
    pencils = pencil_grid(kernel, zetas)
    rhs = np.broadcast_to(structure.D, (n,) + structure.D.shape)
    g = structure.E.ztransform_grid(zetas) @ np.linalg.solve(pencils, rhs)
    return thetas, induced_norm(g, mode)


def _tv_lower_banach(kernel, structure, config):
    """Certified lower bound for the time-varying radius via the Young side
    of the input-output norm (q-independent)."""
    bounds = io_norm(kernel, structure, 2.0, config.section, config)
    if not bounds.certified_upper or bounds.upper == 0.0:
        return 0.0
    return 1.0 / bounds.upper


def radius_structured(kernel, structure, space, config=DEFAULT_CONFIG):
    """Radii w.r.t. perturbations D*Delta(n)*E on the given phase space."""
    _check_space(space)
    _require_defined(kernel, space)
    ensure_ues(kernel, config)
    if structure.state_dim != kernel.dim_in:
        raise DimensionError("structure state dimension differs from the kernel's")

    if space.gamma == 0:
        if not structure.output_decays:
            return RadiusReport(
                r_c=0.0,
                r_t_lower=0.0,
                r_t_exact=True,
                transfer_max=None,
                zeta_star=None,
                space_factor=1.0,
                space=space,
                validity=VALIDITY_ZERO_NONDECAYING,
            )
        validity = VALIDITY_NONFADING_DECAYING
    else:
        if not structure.E.defined_on(space):
            raise NonDecayingStructureError(
                f"output kernel is not bounded on {space.label()}"
            )
        validity = VALIDITY_FADING

    m, zeta_star = transfer_max_on_circle(kernel, structure, config)
    factor = 1.0
    r_c = factor / m if m > 0 else math.inf
    exact = config.state_norm == 2.0
    r_t_lower = r_c if exact else min(_tv_lower_banach(kernel, structure, config), r_c)
    return RadiusReport(
        r_c=r_c,
        r_t_lower=r_t_lower,
        r_t_exact=exact,
        transfer_max=m,
        zeta_star=zeta_star,
        space_factor=factor,
        space=space,
        validity=validity,
    )


def radius_unstructured(kernel, space, config=DEFAULT_CONFIG):
    """Radii w.r.t. unstructured perturbations N(n) acting on the prehistory."""
    _check_space(space)
    _require_defined(kernel, space)
    ensure_ues(kernel, config)

    if space.gamma == 0:
        return RadiusReport(
            r_c=0.0,
            r_t_lower=0.0,
            r_t_exact=True,
            transfer_max=None,
            zeta_star=None,
            space_factor=1.0,
            space=space,
            validity=VALIDITY_ZERO_UNSTRUCTURED,
        )

    structure = PerturbationStructure.unstructured(kernel.dim_in)
    m, zeta_star = transfer_max_on_circle(kernel, structure, config)
    factor = space_factor(space)
    r_c = factor / m
    exact = config.state_norm == 2.0 and space.p == 2.0
    if exact:
        r_t_lower = r_c
    else:
        bounds = gamma_norm(kernel, _section_q(space.p), config.section, config)
        if bounds.certified_upper and bounds.upper > 0:
            r_t_lower = min(factor / bounds.upper, r_c)
        else:
            r_t_lower = 0.0
    return RadiusReport(
        r_c=r_c,
        r_t_lower=r_t_lower,
        r_t_exact=exact,
        transfer_max=m,
        zeta_star=zeta_star,
        space_factor=factor,
        space=space,
        validity=VALIDITY_FADING,
    )


def _section_q(p):
    """Section computations run at q in {1,2,inf}; the Young upper bound used
    for the certified side is q-independent, so a representative is enough."""
    return p if p in (1.0, 2.0, math.inf) else 2.0


def radius_delayed_feedback(kernel, d_matrix, frak_e, space, config=DEFAULT_CONFIG):
    """Radii for the delayed-feedback scheme with memoryless output frak_e."""
    _check_space(space)
    _require_defined(kernel, space)
    ensure_ues(kernel, config)
    d_matrix = as_matrix(d_matrix)
    frak_e = as_matrix(frak_e)
    structure = PerturbationStructure.memoryless(frak_e, d_matrix)
    if structure.state_dim != kernel.dim_in:
        raise DimensionError("feedback matrices do not match the state dimension")

    trivial = not np.any(frak_e) or not np.any(d_matrix)
    if space.gamma == 0 and not trivial:
        return RadiusReport(
            r_c=0.0,
            r_t_lower=0.0,
            r_t_exact=True,
            transfer_max=None,
            zeta_star=None,
            space_factor=1.0,
            space=space,
            validity=VALIDITY_ZERO_NONDECAYING,
        )

    m, zeta_star = transfer_max_on_circle(kernel, structure, config)
    factor = space_factor(space)
    r_c = factor / m if m > 0 else math.inf
    exact = config.state_norm == 2.0 and space.p == 2.0
    if exact or m == 0:
        r_t_lower = r_c
        exact = True if m == 0 else exact
    else:
        lo = _tv_lower_banach(kernel, structure, config)
        r_t_lower = min(factor * lo, r_c) if lo > 0 else 0.0
    return RadiusReport(
        r_c=r_c,
        r_t_lower=r_t_lower,
        r_t_exact=exact,
        transfer_max=m,
        zeta_star=zeta_star,
        space_factor=factor,
        space=space,
        validity=VALIDITY_NONFADING_DECAYING if space.gamma == 0 else VALIDITY_FADING,
    )


def synthesize_destabilizer(kernel, structure, margin=0.0, config=DEFAULT_CONFIG):
    """Rank-one disturbance of norm (1+margin)/M singularizing the pencil.

    Aligns the top singular pair of the transfer matrix at the maximizing
    circle point; at margin 0 the perturbed pencil is singular there, and
    that post-condition is machine-checked on every call.
    """
    if config.state_norm != 2.0:
        raise ModeError("destabilizer synthesis is available in 2-norm mode only")
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    m, zeta_star = transfer_max_on_circle(kernel, structure, config)
    if m == 0.0:
        raise NonDecayingStructureError("transfer function vanishes; no finite disturbance destabilizes")
    pencil = pencil_grid(kernel, np.array([zeta_star]))[0]
    sol = np.linalg.solve(pencil, structure.D)
    g = structure.E.ztransform_grid(np.array([zeta_star]))[0] @ sol
    u_mat, svals, vh = np.linalg.svd(g)
    sigma = float(svals[0])
    u1 = u_mat[:, 0]
    v1 = vh[0].conj()
    delta = (1.0 + margin) / (zeta_star * sigma) * np.outer(v1, u1.conj())

    khat = kernel.ztransform_grid(np.array([zeta_star]))[0]
    ehat = structure.E.ztransform_grid(np.array([zeta_star]))[0]
    perturbed = (
        np.eye(kernel.dim_out, dtype=np.complex128)
        - zeta_star * (khat + structure.D @ delta @ ehat)
    )
    smin = float(np.linalg.svd(perturbed, compute_uv=False)[-1])
    slack = margin * induced_norm(structure.D, 2.0) * induced_norm(ehat, 2.0) * induced_norm(
        delta, 2.0
    )
    if smin > 1e-8 * (1.0 + induced_norm(perturbed, 2.0)) + slack:
        raise CertificationError(
            f"synthesized disturbance failed to singularize the pencil (sigma_min={smin:g})"
        )
    return delta, zeta_star
