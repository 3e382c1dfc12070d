"""File schemas and deterministic report emission.

Kernel description file (the unit of exchange for every CLI command):

    {"dim_out": d, "dim_in": d,
     "head":  [<matrix>, ...],
     "tails": [{"coeff": <matrix>, "ratio": [re, im]}, ...]}

where <matrix> is a row-major list of ``[re, im]`` pairs of length
``dim_out * dim_in``.  Standalone matrices carry their shape:
``{"rows": r, "cols": c, "data": <matrix>}``.

JSON reports are emitted with a fixed field order and floats printed at 17
significant digits, so identical inputs produce byte-identical output.
Infinities are encoded as the strings "inf"/"-inf".
"""

import math

import numpy as np

from .errors import SchemaError
from .kernel import ConvolutionKernel, Prehistory

SCHEMA_PREFIX = "volterra-radii"


# ---------------------------------------------------------------- loading


def _complex_from(pair, what):
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise SchemaError(f"{what}: expected an [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _flat_matrix_from(data, rows, cols, what):
    if not isinstance(data, (list, tuple)) or len(data) != rows * cols:
        raise SchemaError(f"{what}: expected {rows * cols} [re, im] pairs")
    values = [_complex_from(p, what) for p in data]
    return np.array(values, dtype=np.complex128).reshape(rows, cols)


def kernel_from_dict(obj, what="kernel"):
    try:
        d_out = int(obj["dim_out"])
        d_in = int(obj["dim_in"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: missing or bad dim_out/dim_in") from exc
    head = [
        _flat_matrix_from(m, d_out, d_in, f"{what}.head[{i}]")
        for i, m in enumerate(obj.get("head", []))
    ]
    tails = []
    for i, t in enumerate(obj.get("tails", [])):
        coeff = _flat_matrix_from(t.get("coeff"), d_out, d_in, f"{what}.tails[{i}].coeff")
        ratio = _complex_from(t.get("ratio"), f"{what}.tails[{i}].ratio")
        tails.append((coeff, ratio))
    try:
        return ConvolutionKernel(head, tails, d_out, d_in)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def matrix_from_dict(obj, what="matrix"):
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: missing or bad rows/cols") from exc
    return _flat_matrix_from(obj.get("data"), rows, cols, what)


def structure_from_dict(obj):
    from .operators import PerturbationStructure

    if "E" not in obj or "D" not in obj:
        raise SchemaError("structure file must carry 'E' (kernel) and 'D' (matrix)")
    return PerturbationStructure(
        kernel_from_dict(obj["E"], "structure.E"), matrix_from_dict(obj["D"], "structure.D")
    )


def disturbance_from_dict(obj):
    from .tvcert import DisturbanceSpec

    if "eventual" not in obj:
        raise SchemaError("disturbance file must carry an 'eventual' kernel")
    eventual = kernel_from_dict(obj["eventual"], "disturbance.eventual")
    rows = [
        (int(r["n"]), kernel_from_dict(r["kernel"], f"disturbance.rows[{i}]"))
        for i, r in enumerate(obj.get("rows", []))
    ]
    try:
        return DisturbanceSpec(eventual, rows, int(obj.get("n0", 0)))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def prehistory_from_dict(obj):
    entries = []
    for i, e in enumerate(obj.get("entries", [])):
        value = [_complex_from(p, f"prehistory.entries[{i}]") for p in e["value"]]
        entries.append((int(e["m"]), np.array(value, dtype=np.complex128)))
    if not entries:
        raise SchemaError("prehistory file carries no entries")
    try:
        return Prehistory(entries)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


# ---------------------------------------------------------------- dumping


def matrix_to_flat(a):
    a = np.asarray(a)
    return [[_f(v.real), _f(v.imag)] for v in a.reshape(-1)]


def kernel_to_dict(kernel):
    return {
        "dim_out": kernel.dim_out,
        "dim_in": kernel.dim_in,
        "head": [matrix_to_flat(h) for h in kernel.head],
        "tails": [
            {"coeff": matrix_to_flat(c), "ratio": [_f(r.real), _f(r.imag)]}
            for c, r in kernel.tails
        ],
    }


def _f(x):
    """Normalize floats for emission (collapse -0.0; keep finiteness tags)."""
    x = float(x)
    if x == 0.0:
        return 0.0
    return x


def _format_float(x):
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        raise ValueError("refusing to serialize NaN")
    return f"{x:.17g}"


def json_dumps(obj, indent=0):
    """Deterministic JSON: insertion-ordered keys, floats at 17 digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_format_float(obj.real)}, {_format_float(obj.imag)}]"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{k}": {json_dumps(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(
            isinstance(v, (int, float, complex, np.integer, np.floating, str)) for v in obj
        )
        if flat:
            return "[" + ", ".join(json_dumps(v, indent + 1) for v in obj) + "]"
        items = [f"{inner}{json_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


# ------------------------------------------------------- report builders


def schema(kind):
    return f"{SCHEMA_PREFIX}/{kind}/v1"


def decay_to_dict(decay):
    if decay is None:
        return None
    return {"C": _f(decay.C), "nu": _f(decay.nu), "capped": decay.capped}


def space_to_dict(space):
    return {
        "p": "inf" if space.p == math.inf else _f(space.p),
        "gamma": _f(space.gamma),
        "variant": space.variant,
    }


def _complex_or_none(z):
    return None if z is None else complex(z)


def verdict_to_dict(v, config):
    return {
        "schema": schema("verdict"),
        "ue_resolvent_sense": v.ue_resolvent_sense,
        "convergence_radius": _f(v.convergence_radius)
        if not math.isinf(v.convergence_radius)
        else math.inf,
        "winding_number": v.winding_number,
        "min_singular_value": None if v.min_singular_value is None else _f(v.min_singular_value),
        "witness_zeta": _complex_or_none(v.witness_zeta),
        "decay": decay_to_dict(v.decay),
        "fading_space_applicable": v.fading_space_applicable,
        "marginal": v.marginal,
        "text": v.text,
        "config": config.as_dict(),
    }


def bounds_to_dict(b, config):
    return {
        "schema": schema("norms"),
        "lower": _f(b.lower),
        "upper": math.inf if math.isinf(b.upper) else _f(b.upper),
        "section_size": b.section_size,
        "q": "inf" if b.q == math.inf else _f(b.q),
        "certified_upper": b.certified_upper,
        "config": config.as_dict(),
    }


def radius_to_dict(r, config):
    return {
        "schema": schema("radius"),
        "r_c": math.inf if math.isinf(r.r_c) else _f(r.r_c),
        "r_t_lower": _f(r.r_t_lower),
        "r_t_exact": r.r_t_exact,
        "transfer_max": None if r.transfer_max is None else _f(r.transfer_max),
        "zeta_star": _complex_or_none(r.zeta_star),
        "space_factor": _f(r.space_factor),
        "space": space_to_dict(r.space),
        "validity": r.validity,
        "config": config.as_dict(),
    }


def certificate_to_dict(c, config):
    return {
        "schema": schema("certificate"),
        "holds": c.holds,
        "test_kind": c.test_kind,
        "threshold": _f(c.threshold),
        "attained": _f(c.attained),
        "space": space_to_dict(c.space),
        "config": config.as_dict(),
    }


# ------------------------------------------------------------ CSV output


def resolvent_csv(xs):
    """Columns: n, re/im of every entry (row-major), operator 2-norm."""
    d_out, d_in = xs.shape[1], xs.shape[2]
    cols = ["n"]
    for a in range(d_out):
        for b in range(d_in):
            cols += [f"x{a}{b}_re", f"x{a}{b}_im"]
    cols.append("norm2")
    lines = [",".join(cols)]
    for n, x in enumerate(xs):
        vals = []
        for v in x.reshape(-1):
            vals += [f"{v.real:.17g}", f"{v.imag:.17g}"]
        nrm = np.linalg.norm(x, 2)
        lines.append(f"{n}," + ",".join(vals) + f",{nrm:.17g}")
    return "\n".join(lines) + "\n"


def trajectory_csv(traj, tau):
    """Columns: n, re/im of every state coordinate, Euclidean norm."""
    d = traj.shape[1]
    cols = ["n"] + [f"x{i}_{part}" for i in range(d) for part in ("re", "im")] + ["norm2"]
    lines = [",".join(cols)]
    for k, x in enumerate(traj):
        vals = []
        for v in x:
            vals += [f"{v.real:.17g}", f"{v.imag:.17g}"]
        lines.append(f"{tau + k}," + ",".join(vals) + f",{np.linalg.norm(x):.17g}")
    return "\n".join(lines) + "\n"


def profile_csv(thetas, norms):
    """Circle profile ||G(e^{i theta})|| against theta, plot-ready."""
    lines = ["theta,norm"]
    for t, v in zip(thetas, norms):
        lines.append(f"{t:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"
