"""Command-line front end.

Subcommands: analyze, resolvent, norms, radius, destabilize, certify,
simulate.  Kernel files follow the JSON schema documented in ``serialize``.
Exit codes: 0 success, 1 usage, 2 domain errors, 3 numerical-certification
failures.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .config import AnalysisConfig
from .errors import (
    BoundaryZeroError,
    CertificationError,
    InsufficientDataError,
    SchemaError,
    SingularError,
    VolterraError,
)
from .kernel import PhaseSpace, add_kernels
from .linalg import induced_norm
from .operators import PerturbationStructure, gamma_norm, io_norm
from .radii import (
    radius_delayed_feedback,
    radius_structured,
    radius_unstructured,
    synthesize_destabilizer,
    transfer_max_on_circle,
    transfer_profile,
)
from .serialize import json_dumps
from .spectral import resolvent_sequence, ue_verdict
from .tvcert import base_zero_test, simulate, smallgain_certify

_NUMERICAL_ERRORS = (SingularError, CertificationError, InsufficientDataError, BoundaryZeroError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_json(path, what):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"{what} file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} file is not valid JSON: {path}: {exc}") from exc


def _load_kernel(path):
    return serialize.kernel_from_dict(_load_json(path, "kernel"))


def _config_from(args):
    try:
        return AnalysisConfig(
            grid_size=args.grid_size,
            sigma_tol=args.sigma_tol,
            refine_tol=args.refine_tol,
            n_max=args.nmax,
            section=args.section,
            state_norm={"2": 2.0, "1": 1.0, "inf": math.inf}[args.state_norm],
            seed=args.seed,
            nu_max=args.nu_max,
        )
    except ValueError as exc:
        raise SchemaError(f"bad configuration: {exc}") from exc


def _space_from(text):
    try:
        return PhaseSpace.parse(text)
    except ValueError as exc:
        raise SchemaError(f"bad --space value: {exc}") from exc


def _emit(report):
    print(json_dumps(report))


def _cmd_analyze(args, config):
    kernel = _load_kernel(args.kernel)
    verdict = ue_verdict(kernel, config)
    _emit(serialize.verdict_to_dict(verdict, config))
    return 0


def _cmd_resolvent(args, config):
    kernel = _load_kernel(args.kernel)
    xs = resolvent_sequence(kernel, config.n_max, config)
    sys.stdout.write(serialize.resolvent_csv(xs))
    return 0


def _cmd_norms(args, config):
    kernel = _load_kernel(args.kernel)
    q = {"1": 1.0, "2": 2.0, "inf": math.inf}[args.q]
    if args.structure:
        structure = serialize.structure_from_dict(_load_json(args.structure, "structure"))
        bounds = io_norm(kernel, structure, q, config.section, config)
    else:
        bounds = gamma_norm(kernel, q, config.section, config)
    _emit(serialize.bounds_to_dict(bounds, config))
    return 0


def _structure_for_radius(args, kernel):
    if args.unstructured:
        return "unstructured", None
    if args.structure:
        return "structured", serialize.structure_from_dict(
            _load_json(args.structure, "structure")
        )
    obj = _load_json(args.delayed, "delayed-feedback")
    if "frak_e" not in obj or "D" not in obj:
        raise SchemaError("delayed-feedback file must carry 'frak_e' and 'D' matrices")
    return "delayed", (
        serialize.matrix_from_dict(obj["D"], "D"),
        serialize.matrix_from_dict(obj["frak_e"], "frak_e"),
    )


def _cmd_radius(args, config):
    kernel = _load_kernel(args.kernel)
    space = _space_from(args.space)
    mode, payload = _structure_for_radius(args, kernel)
    if mode == "unstructured":
        report = radius_unstructured(kernel, space, config)
        profile_structure = PerturbationStructure.unstructured(kernel.dim_in)
    elif mode == "structured":
        report = radius_structured(kernel, payload, space, config)
        profile_structure = payload
    else:
        d_matrix, frak_e = payload
        report = radius_delayed_feedback(kernel, d_matrix, frak_e, space, config)
        profile_structure = PerturbationStructure.memoryless(frak_e, d_matrix)
    if args.profile:
        thetas, norms = transfer_profile(kernel, profile_structure, config)
        Path(args.profile).write_text(serialize.profile_csv(thetas, norms))
    _emit(serialize.radius_to_dict(report, config))
    return 0


def _cmd_destabilize(args, config):
    kernel = _load_kernel(args.kernel)
    if args.structure:
        structure = serialize.structure_from_dict(_load_json(args.structure, "structure"))
    else:
        structure = PerturbationStructure.unstructured(kernel.dim_in)
    delta, zeta_star = synthesize_destabilizer(kernel, structure, args.margin, config)
    m, _ = transfer_max_on_circle(kernel, structure, config)

    khat = kernel.ztransform_grid(np.array([zeta_star]))[0]
    ehat = structure.E.ztransform_grid(np.array([zeta_star]))[0]
    perturbed_pencil = (
        np.eye(kernel.dim_out, dtype=np.complex128)
        - zeta_star * (khat + structure.D @ delta @ ehat)
    )
    sigma_min = float(np.linalg.svd(perturbed_pencil, compute_uv=False)[-1])

    if args.emit_perturbed:
        closed_loop = structure.E.premultiply(structure.D @ delta)
        perturbed_kernel = add_kernels(kernel, closed_loop)
        Path(args.emit_perturbed).write_text(
            json_dumps(serialize.kernel_to_dict(perturbed_kernel)) + "\n"
        )

    _emit(
        {
            "schema": serialize.schema("destabilize"),
            "delta": {
                "rows": delta.shape[0],
                "cols": delta.shape[1],
                "data": serialize.matrix_to_flat(delta),
            },
            "delta_norm": float(induced_norm(delta, 2.0)),
            "zeta_star": complex(zeta_star),
            "transfer_max": m,
            "margin": float(args.margin),
            "verification": {"perturbed_sigma_min": sigma_min, "singular": True},
            "config": config.as_dict(),
        }
    )
    return 0


def _cmd_certify(args, config):
    spec = serialize.disturbance_from_dict(_load_json(args.disturbance, "disturbance"))
    if args.base_zero:
        p = math.inf if args.p == "inf" else float(args.p)
        cert = base_zero_test(spec, p, args.beta, config)
    else:
        if not args.kernel or not args.space:
            raise SchemaError("certify needs a kernel and --space unless --base-zero is given")
        kernel = _load_kernel(args.kernel)
        space = _space_from(args.space)
        structure = None
        if args.structure:
            structure = serialize.structure_from_dict(_load_json(args.structure, "structure"))
        cert = smallgain_certify(kernel, spec, space, config, structure=structure)
    _emit(serialize.certificate_to_dict(cert, config))
    return 0


def _cmd_simulate(args, config):
    kernel = _load_kernel(args.kernel)
    init = serialize.prehistory_from_dict(_load_json(args.init, "prehistory"))
    spec = None
    if args.disturbance:
        spec = serialize.disturbance_from_dict(_load_json(args.disturbance, "disturbance"))
    traj, decay = simulate(kernel, spec, init, args.tau, args.horizon, config)
    Path(args.out).write_text(serialize.trajectory_csv(traj, args.tau))
    _emit(
        {
            "schema": serialize.schema("simulate"),
            "tau": args.tau,
            "horizon": args.horizon,
            "decay": serialize.decay_to_dict(decay),
            "csv": args.out,
            "config": config.as_dict(),
        }
    )
    return 0


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--grid-size", type=int, default=4096, help="circle grid (power of two, >= 64)")
    common.add_argument("--sigma-tol", type=float, default=1e-9, help="relative singularity tolerance")
    common.add_argument("--refine-tol", type=float, default=1e-8, help="golden-section refinement tolerance")
    common.add_argument("--nmax", type=int, default=256, help="resolvent horizon")
    common.add_argument("--section", type=int, default=128, help="Toeplitz section size for norm bounds")
    common.add_argument("--state-norm", choices=("2", "1", "inf"), default="2", help="state-space norm")
    common.add_argument("--seed", type=int, default=42, help="seed recorded for randomized checks")
    common.add_argument("--nu-max", type=float, default=50.0, help="cap on fitted decay rates")

    parser = _Parser(
        prog="volterra-radii",
        description=(
            "Uniform exponential stability, stability radii and small-gain "
            "certificates for convolution difference systems with infinite delay."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="UE-stability verdict (JSON)")
    p.add_argument("kernel", help="kernel description file")

    p = sub.add_parser(
        "resolvent", parents=[common], help="fundamental solution X(n) as CSV on stdout"
    )
    p.add_argument("kernel")

    p = sub.add_parser(
        "norms", parents=[common], help="input-state/input-output norm bounds (JSON)"
    )
    p.add_argument("kernel")
    p.add_argument("--q", choices=("1", "2", "inf"), default="2", help="sequence-space exponent")
    p.add_argument("--structure", help="structure file: switches to the input-output operator")

    p = sub.add_parser(
        "radius", parents=[common], help="stability radii (JSON; optional circle profile CSV)"
    )
    p.add_argument("kernel")
    p.add_argument("--space", required=True, help="phase space as p:gamma[:variant], e.g. 2:0.5:ellp")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--unstructured", action="store_true", help="unstructured perturbations")
    group.add_argument("--structure", help="structure file with kernel E and matrix D")
    group.add_argument("--delayed", help="delayed-feedback file with matrices frak_e and D")
    p.add_argument("--profile", help="write the circle profile ||G(e^{i*theta})|| to this CSV file")

    p = sub.add_parser(
        "destabilize", parents=[common], help="worst-case rank-one disturbance at the radius (JSON)"
    )
    p.add_argument("kernel")
    p.add_argument("--structure", help="structure file (default: unstructured identity)")
    p.add_argument("--margin", type=float, default=0.0, help="relative excess over the radius")
    p.add_argument("--emit-perturbed", help="write the perturbed kernel to this JSON file")

    p = sub.add_parser(
        "certify",
        parents=[common],
        help="small-gain certificate for a time-varying disturbance (JSON)",
    )
    p.add_argument("kernel", nargs="?", help="base kernel file (omit with --base-zero)")
    p.add_argument("--disturbance", required=True, help="disturbance description file")
    p.add_argument("--space", help="phase space as p:gamma[:variant]")
    p.add_argument("--structure", help="optional structure file for the radius threshold")
    p.add_argument("--base-zero", action="store_true", help="zero-base-kernel test with explicit thresholds")
    p.add_argument("--p", default="2", help="exponent p for --base-zero (number or 'inf')")
    p.add_argument("--beta", type=float, default=0.5, help="weight beta for --base-zero")

    p = sub.add_parser(
        "simulate", parents=[common], help="trajectory CSV plus decay estimate (JSON)"
    )
    p.add_argument("kernel")
    p.add_argument("--init", required=True, help="prehistory file")
    p.add_argument("--disturbance", help="optional disturbance file")
    p.add_argument("--tau", type=int, default=0, help="initial time")
    p.add_argument("--horizon", type=int, default=100, help="number of steps")
    p.add_argument("--out", required=True, help="trajectory CSV path")

    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "resolvent": _cmd_resolvent,
    "norms": _cmd_norms,
    "radius": _cmd_radius,
    "destabilize": _cmd_destabilize,
    "certify": _cmd_certify,
    "simulate": _cmd_simulate,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 1
    try:
        config = _config_from(args)
        return _COMMANDS[args.command](args, config)
    except _NUMERICAL_ERRORS as exc:
        _emit_error(exc)
        return 3
    except VolterraError as exc:
        _emit_error(exc)
        return 2
    except ValueError as exc:
        _emit_error(exc)
        return 2


def _emit_error(exc):
    print(f"error: {exc}", file=sys.stderr)
    _emit(
        {
            "schema": serialize.schema("error"),
            "error": type(exc).__name__,
            "message": str(exc),
        }
    )


if __name__ == "__main__":
    raise SystemExit(main())
