import json
import math

import numpy as np
import pytest

from volterra_radii import ConvolutionKernel
from volterra_radii.cli import main
from volterra_radii.serialize import json_dumps, kernel_from_dict, kernel_to_dict

WORKED = {
    "dim_out": 1,
    "dim_in": 1,
    "head": [],
    "tails": [{"coeff": [[-1.0, 0.0]], "ratio": [0.5, 0.0]}],
}

ZERO = {"dim_out": 1, "dim_in": 1, "head": [], "tails": []}


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.json"
    path.write_text(json.dumps(WORKED))
    return str(path)


@pytest.fixture
def zero_file(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(ZERO))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestAnalyze:
    def test_worked_kernel_verdict(self, worked_file, capsys):
        code, out = run(capsys, "analyze", worked_file)
        assert code == 0
        rep = json.loads(out)
        assert rep["ue_resolvent_sense"] is True
        assert rep["winding_number"] == 0
        assert rep["convergence_radius"] == 2
        assert rep["schema"] == "volterra-radii/verdict/v1"
        assert rep["config"]["seed"] == 42

    def test_deterministic_output(self, worked_file, capsys):
        _, first = run(capsys, "analyze", worked_file)
        _, second = run(capsys, "analyze", worked_file)
        assert first == second


class TestResolvent:
    def test_zero_kernel_csv(self, zero_file, capsys):
        code, out = run(capsys, "resolvent", zero_file, "--nmax", "4")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,x00_re,x00_im,norm2"
        assert lines[1].startswith("1,") is False  # header then n=0 row
        assert lines[1] == "0,1,0,1"
        assert all(line.split(",")[1] == "0" for line in lines[2:])


class TestRadius:
    def test_unstructured_value(self, worked_file, capsys):
        code, out = run(
            capsys, "radius", worked_file, "--space", "2:0.5:ellp", "--unstructured"
        )
        assert code == 0
        rep = json.loads(out)
        expect = math.sqrt(1 - math.exp(-1.0)) / 3.0
        assert abs(rep["r_c"] - expect) < 1e-9
        assert rep["r_t_exact"] is True
        assert rep["validity"] == "fading_ok"

    def test_profile_csv(self, worked_file, tmp_path, capsys):
        profile = tmp_path / "profile.csv"
        code, out = run(
            capsys,
            "radius",
            worked_file,
            "--space",
            "2:0.5",
            "--unstructured",
            "--profile",
            str(profile),
        )
        assert code == 0
        lines = profile.read_text().strip().splitlines()
        assert lines[0] == "theta,norm"
        assert len(lines) == 4097
        vals = [float(line.split(",")[1]) for line in lines[1:]]
        assert abs(max(vals) - 3.0) < 1e-6

    def test_structured_file(self, worked_file, tmp_path, capsys):
        st = {
            "E": {"dim_out": 1, "dim_in": 1, "head": [[[1.0, 0.0]]], "tails": []},
            "D": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]},
        }
        st_file = tmp_path / "structure.json"
        st_file.write_text(json.dumps(st))
        code, out = run(
            capsys, "radius", worked_file, "--space", "2:0.5", "--structure", str(st_file)
        )
        assert code == 0
        rep = json.loads(out)
        assert abs(rep["r_c"] - 1.0 / 3.0) < 1e-9
        assert rep["space_factor"] == 1

    def test_delayed_file(self, worked_file, tmp_path, capsys):
        fd = {
            "frak_e": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]},
            "D": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]},
        }
        fd_file = tmp_path / "delayed.json"
        fd_file.write_text(json.dumps(fd))
        code, out = run(
            capsys, "radius", worked_file, "--space", "inf:0:czero", "--delayed", str(fd_file)
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["r_c"] == 0
        assert rep["validity"] == "zero_by_nondecaying_E"


class TestDestabilize:
    def test_emits_delta_and_perturbed_kernel(self, worked_file, tmp_path, capsys):
        pert_file = tmp_path / "perturbed.json"
        code, out = run(
            capsys, "destabilize", worked_file, "--emit-perturbed", str(pert_file)
        )
        assert code == 0
        rep = json.loads(out)
        delta = rep["delta"]["data"][0]
        assert abs(complex(delta[0], delta[1]) - (-1.0 / 3.0)) < 1e-8
        assert abs(rep["delta_norm"] - 1.0 / 3.0) < 1e-8
        assert rep["verification"]["perturbed_sigma_min"] < 1e-10

        code, out = run(capsys, "analyze", str(pert_file))
        assert code == 0
        verdict = json.loads(out)
        assert verdict["ue_resolvent_sense"] is False
        zeta = complex(*verdict["witness_zeta"])
        assert abs(zeta - (-1.0)) < 1e-6

    def test_kernel_roundtrip(self, worked_file, tmp_path, capsys):
        pert_file = tmp_path / "pert.json"
        code, _ = run(capsys, "destabilize", worked_file, "--emit-perturbed", str(pert_file))
        assert code == 0
        loaded = kernel_from_dict(json.loads(pert_file.read_text()))
        dumped = kernel_to_dict(loaded)
        again = kernel_from_dict(json.loads(json_dumps(dumped)))
        assert loaded == again


class TestCertify:
    def test_smallgain(self, worked_file, tmp_path, capsys):
        dist = {
            "n0": 0,
            "rows": [],
            "eventual": {"dim_out": 1, "dim_in": 1, "head": [[[-0.3, 0.0]]], "tails": []},
        }
        d_file = tmp_path / "dist.json"
        d_file.write_text(json.dumps(dist))
        code, out = run(
            capsys, "certify", worked_file, "--disturbance", str(d_file), "--space", "2:0.5"
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["holds"] is False
        assert rep["test_kind"] == "N2"
        assert abs(rep["attained"] - 0.3) < 1e-12

    def test_structured_threshold(self, worked_file, tmp_path, capsys):
        dist = {
            "n0": 0,
            "rows": [],
            "eventual": {"dim_out": 1, "dim_in": 1, "head": [[[-0.3, 0.0]]], "tails": []},
        }
        st = {
            "E": {"dim_out": 1, "dim_in": 1, "head": [[[1.0, 0.0]]], "tails": []},
            "D": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]},
        }
        d_file = tmp_path / "dist.json"
        d_file.write_text(json.dumps(dist))
        st_file = tmp_path / "structure.json"
        st_file.write_text(json.dumps(st))
        code, out = run(
            capsys, "certify", worked_file, "--disturbance", str(d_file),
            "--space", "2:0.5", "--structure", str(st_file),
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["holds"] is True
        assert abs(rep["threshold"] - 1.0 / 3.0) < 1e-9

    def test_base_zero_no_kernel(self, tmp_path, capsys):
        dist = {
            "n0": 0,
            "rows": [],
            "eventual": {"dim_out": 1, "dim_in": 1, "head": [[[0.4, 0.0]]], "tails": []},
        }
        d_file = tmp_path / "dist.json"
        d_file.write_text(json.dumps(dist))
        code, out = run(
            capsys,
            "certify",
            "--base-zero",
            "--p",
            "1",
            "--beta",
            str(math.log(2.0)),
            "--disturbance",
            str(d_file),
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["holds"] is True
        assert abs(rep["threshold"] - 0.5) < 1e-12


class TestSimulate:
    def test_trajectory_csv_and_decay(self, worked_file, tmp_path, capsys):
        init = {"entries": [{"m": 0, "value": [[1.0, 0.0]]}]}
        init_file = tmp_path / "init.json"
        init_file.write_text(json.dumps(init))
        out_csv = tmp_path / "traj.csv"
        code, out = run(
            capsys,
            "simulate",
            worked_file,
            "--init",
            str(init_file),
            "--horizon",
            "20",
            "--out",
            str(out_csv),
        )
        assert code == 0
        rep = json.loads(out)
        assert abs(rep["decay"]["nu"] - math.log(2.0)) < 1e-6
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0] == "n,x0_re,x0_im,norm2"
        assert len(lines) == 22


class TestNorms:
    def test_gamma_norm_json(self, worked_file, capsys):
        code, out = run(capsys, "norms", worked_file, "--q", "1", "--section", "64")
        assert code == 0
        rep = json.loads(out)
        assert abs(rep["lower"] - 3.0) < 1e-3
        assert rep["upper"] == 3
        assert rep["certified_upper"] is True

    def test_io_norm_with_structure(self, worked_file, tmp_path, capsys):
        st = {
            "E": {"dim_out": 1, "dim_in": 1, "head": [[[1.0, 0.0]]], "tails": []},
            "D": {"rows": 1, "cols": 1, "data": [[1.0, 0.0]]},
        }
        st_file = tmp_path / "structure.json"
        st_file.write_text(json.dumps(st))
        code, out = run(
            capsys, "norms", worked_file, "--q", "1", "--section", "64",
            "--structure", str(st_file),
        )
        assert code == 0
        rep = json.loads(out)
        assert abs(rep["lower"] - 3.0) < 1e-3
        assert rep["upper"] == 3


class TestExitCodes:
    def test_usage_error(self, capsys):
        assert main(["analyze"]) == 1

    def test_unknown_flag(self, worked_file, capsys):
        assert main(["analyze", worked_file, "--bogus"]) == 1

    def test_missing_file(self, capsys):
        code, out = run(capsys, "analyze", "/nonexistent/kernel.json")
        assert code == 2
        assert json.loads(out)["error"] == "SchemaError"

    def test_domain_error(self, worked_file, capsys):
        code, out = run(
            capsys, "radius", worked_file, "--space", "2:-0.5", "--unstructured"
        )
        assert code == 2
        assert json.loads(out)["error"] == "SpaceNotSupportedError"

    def test_numerical_error_mode(self, worked_file, capsys):
        code, out = run(capsys, "destabilize", worked_file, "--state-norm", "inf")
        assert code == 2  # ModeError is a domain-class failure

    def test_base_unstable(self, tmp_path, capsys):
        growing = {
            "dim_out": 1,
            "dim_in": 1,
            "head": [],
            "tails": [{"coeff": [[-2.0, 0.0]], "ratio": [2.0, 0.0]}],
        }
        g_file = tmp_path / "growing.json"
        g_file.write_text(json.dumps(growing))
        code, out = run(capsys, "radius", str(g_file), "--space", "2:0.2", "--unstructured")
        assert code == 2
        assert json.loads(out)["error"] == "BaseUnstableError"


class TestRoundTripEquality:
    def test_serializer_roundtrip_random(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            d = int(rng.integers(1, 4))
            head = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))]
            tails = [
                (
                    rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)),
                    complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)) or 0.3,
                )
            ]
            k = ConvolutionKernel(head, tails, d, d)
            again = kernel_from_dict(json.loads(json_dumps(kernel_to_dict(k))))
            assert k == again
