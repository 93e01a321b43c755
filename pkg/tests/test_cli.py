import json
import subprocess
import sys

import numpy as np
import pytest

import detvar
from detvar import serialize as ser
from detvar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def jout(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestSchmidt:
    def test_bell_fixture(self, capsys, fixtures):
        obj = jout(capsys, "schmidt", str(fixtures / "bell_2x2_pure.json"))
        assert obj["d"] == 2 and obj["v0_dim"] == "EMPTY"
        assert obj["singular_values"] == pytest.approx([2**-0.5, 2**-0.5])

    def test_product_fixture(self, capsys, fixtures):
        obj = jout(capsys, "schmidt", str(fixtures / "product_11_2x2_pure.json"))
        assert obj["d"] == 1 and obj["v0_dim"] == 0

    def test_rank3_constructed_4x4(self, capsys, tmp_path):
        amps = np.zeros(16, dtype=complex)
        amps[0], amps[5], amps[10] = 0.6, 0.48, 0.64  # three diagonal terms
        v = detvar.PureState(4, 4, amps)
        f = tmp_path / "v.json"
        f.write_text(ser.json_dumps(ser.pure_to_obj(v)))
        obj = jout(capsys, "schmidt", str(f))
        assert obj["d"] == 3 and obj["v0_dim"] == 0

    def test_rank_one_density_accepted(self, capsys, tmp_path):
        v = detvar.random_pure_state(2, 2, np.random.default_rng(1))
        rho = detvar.pure_projector(v)
        f = tmp_path / "proj.json"
        f.write_text(ser.json_dumps(ser.density_to_obj(rho)))
        obj = jout(capsys, "schmidt", str(f))
        assert obj["d"] == detvar.schmidt_number(v).d

    def test_mixed_density_rejected(self, capsys, fixtures):
        code, out, err = run(capsys, "schmidt", str(fixtures / "maxmixed_2x2_density.json"))
        assert code == 2
        assert json.loads(err)["error"] == "NotPure"


class TestMembership:
    def test_maximally_mixed_not_member(self, capsys, fixtures):
        obj = jout(
            capsys,
            "membership",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--point",
            '{"coords":[[1,0],[0.5,0.5]]}',
            "--k",
            "1",
        )
        assert obj == {"k": 1, "margin": obj["margin"], "member": False, "rank": 2}

    def test_kernel_point_of_product_projector(self, capsys, fixtures):
        obj = jout(
            capsys,
            "membership",
            str(fixtures / "product_11_2x2_pure.json"),
            "--point",
            "[[0,0],[1,0]]",
            "--k",
            "0",
        )
        assert obj["member"] is True and obj["rank"] == 0

    def test_bad_point_json_exits_2(self, capsys, fixtures):
        code, _, err = run(
            capsys,
            "membership",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--point",
            "{oops",
        )
        assert code == 2 and "ParseError" in err

    def test_k_out_of_range_exits_2(self, capsys, fixtures):
        code, _, err = run(
            capsys,
            "membership",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--point",
            "[[1,0],[0,0]]",
            "--k",
            "7",
        )
        assert code == 2 and "KOutOfRange" in err

    def test_bad_rel_eps_exits_2(self, capsys, fixtures):
        code, _, err = run(
            capsys,
            "membership",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--point",
            "[[1,0],[0,0]]",
            "--rel-eps",
            "0.5",
        )
        assert code == 2 and "rel-eps" in err


class TestCovariance:
    def test_maximally_mixed_full_agreement(self, capsys, fixtures):
        obj = jout(
            capsys,
            "covariance",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--samples",
            "30",
            "--k",
            "1",
        )
        assert obj["agree"] == 30 and obj["disagree"] == 0

    def test_rank2_2x3_agreement(self, capsys, fixtures):
        obj = jout(
            capsys,
            "covariance",
            str(fixtures / "rank2_2x3_density.json"),
            "--samples",
            "60",
            "--k",
            "1",
        )
        assert obj["disagree"] == 0
        assert obj["agree"] + obj["near_threshold"] == 60

    def test_deterministic_output(self, capsys, fixtures):
        args = ("covariance", str(fixtures / "rank2_2x3_density.json"), "--samples", "25", "--seed", "7")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_disagreement_exit_code(self, capsys, fixtures, monkeypatch):
        from detvar.invariants import CovarianceReport

        monkeypatch.setattr(
            "detvar.cli.invariants.check_covariance",
            lambda *a, **kw: CovarianceReport(9, 1, 0, 5.0),
        )
        code, out, _ = run(
            capsys, "covariance", str(fixtures / "maxmixed_2x2_density.json"), "--samples", "10"
        )
        assert code == 3 and json.loads(out)["disagree"] == 1

    def test_bad_samples_exits_2(self, capsys, fixtures):
        code, _, err = run(
            capsys, "covariance", str(fixtures / "maxmixed_2x2_density.json"), "--samples", "0"
        )
        assert code == 2 and "samples" in err


class TestMinors:
    def test_pure_state_k0_linear_forms(self, capsys, fixtures):
        obj = jout(capsys, "minors", str(fixtures / "bell_2x2_pure.json"), "--k", "0")
        assert obj["count"] == 2 and obj["zero_omitted"] == 0
        s = 2**-0.5
        assert obj["minors"][0]["terms"][0]["exps"] == [1, 0]
        assert obj["minors"][0]["terms"][0]["coef"] == pytest.approx([s, 0.0])
        assert obj["minors"][1]["terms"][0]["exps"] == [0, 1]
        assert obj["minors"][1]["terms"][0]["coef"] == pytest.approx([s, 0.0])

    def test_zero_minors_omitted_and_counted(self, capsys, fixtures):
        obj = jout(capsys, "minors", str(fixtures / "product_11_2x2_pure.json"), "--k", "0")
        assert obj["count"] == 1 and obj["zero_omitted"] == 1

    def test_out_file_and_summary(self, capsys, fixtures, tmp_path):
        out = tmp_path / "minors.json"
        obj = jout(
            capsys,
            "minors",
            str(fixtures / "ensemble_2x2_t3.json"),
            "--k",
            "1",
            "--out",
            str(out),
        )
        assert "minors" not in obj
        dumped = json.loads(out.read_text())
        assert len(dumped) == obj["count"]
        polys = [ser.parse_multipoly(x) for x in dumped]
        assert all(p.degree == 2 for p in polys)

    def test_spot_evaluation_matches_numeric_oracle(self, capsys, fixtures):
        obj = jout(capsys, "minors", str(fixtures / "ensemble_2x2_t3.json"), "--k", "1")
        e = ser.load_state(str(fixtures / "ensemble_2x2_t3.json"))
        pb = detvar.pencil_blocks(e)
        polys = [ser.parse_multipoly(x) for x in obj["minors"]]
        rng = np.random.default_rng(0)
        from itertools import combinations

        pairs = [(r, c) for r in combinations(range(2), 2) for c in combinations(range(3), 2)]
        for _ in range(5):
            r = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            numeric = sum(ri * ai for ri, ai in zip(r, pb.blocks))
            for p, (rows, cols) in zip(polys, pairs):
                assert p.eval(r) == pytest.approx(
                    np.linalg.det(numeric[np.ix_(rows, cols)]), rel=1e-10, abs=1e-12
                )


class TestLinearity:
    def test_product_ensemble_runs_structure_check(self, capsys, fixtures):
        obj = jout(
            capsys,
            "linearity",
            str(fixtures / "product_ensemble_2x2_s2.json"),
            "--k",
            "1",
            "--samples",
            "3",
        )
        assert obj["verdict"] == "ConsistentWithSeparable"
        assert obj["structure"]["violations"] == []

    def test_plain_ensemble_no_structure_key(self, capsys, fixtures):
        obj = jout(
            capsys, "linearity", str(fixtures / "ensemble_2x2_t3.json"), "--k", "1", "--samples", "3"
        )
        assert "structure" not in obj
        assert obj["verdict"] in ("ConsistentWithSeparable", "Inconclusive")

    def test_structure_violation_exit_code(self, capsys, fixtures, monkeypatch):
        from detvar.symbolic import StructureReport

        monkeypatch.setattr(
            "detvar.cli.symbolic.separable_minor_structure",
            lambda *a, **kw: StructureReport(1, (((0, 1), (0, 1), 1.0),), 1.0),
        )
        code, out, _ = run(
            capsys,
            "linearity",
            str(fixtures / "product_ensemble_2x2_s2.json"),
            "--k",
            "1",
            "--samples",
            "2",
        )
        assert code == 3
        assert json.loads(out)["structure"]["violations"]


class TestPpt:
    def test_bell_is_npt_minus_half(self, capsys, fixtures):
        obj = jout(capsys, "ppt", str(fixtures / "bell_2x2_pure.json"))
        assert obj["verdict"] == "NPT"
        assert obj["min_eigenvalue"] == pytest.approx(-0.5)
        assert obj["ppt_equivalent_to_separable"] is True

    def test_product_projector_is_ppt(self, capsys, fixtures):
        obj = jout(capsys, "ppt", str(fixtures / "product_11_2x2_pure.json"))
        assert obj["verdict"] == "PPT"

    def test_maximally_mixed_min_eigenvalue(self, capsys, fixtures):
        obj = jout(capsys, "ppt", str(fixtures / "maxmixed_2x2_density.json"))
        assert obj["verdict"] == "PPT"
        assert obj["min_eigenvalue"] == pytest.approx(0.25)

    def test_separable_fixture_is_ppt(self, capsys, fixtures):
        obj = jout(capsys, "ppt", str(fixtures / "product_ensemble_2x2_s2.json"))
        assert obj["verdict"] == "PPT"


class TestSlice:
    LINE = '{"p":[[1,0],[0,0]],"q":[[0,0],[1,0]]}'

    def test_maximally_mixed_constant_eigenvalue(self, capsys, fixtures):
        code, out, _ = run(
            capsys,
            "slice",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--line",
            self.LINE,
            "--samples",
            "9",
        )
        assert code == 0
        rows = out.strip().splitlines()
        assert rows[0] == "theta,min_eigenvalue,rank,member"
        for row in rows[1:]:
            theta, ev, rank, member = row.split(",")
            assert float(ev) == pytest.approx(0.25, abs=1e-12)
            assert rank == "2"

    def test_product_projector_kernel_at_far_end(self, capsys, fixtures):
        code, out, _ = run(
            capsys,
            "slice",
            str(fixtures / "product_11_2x2_pure.json"),
            "--line",
            self.LINE,
            "--samples",
            "5",
            "--k",
            "0",
        )
        rows = out.strip().splitlines()[1:]
        first = rows[0].split(",")
        last = rows[-1].split(",")
        assert float(first[1]) == pytest.approx(0.0, abs=1e-12) or first[2] == "1"
        assert float(last[1]) == pytest.approx(0.0, abs=1e-14)
        assert last[2] == "0" and last[3] == "1"

    def test_separable_zeros_at_linear_form_roots(self, capsys, tmp_path):
        # line through the roots of the two product-term forms: the
        # minimum eigenvalue vanishes at both ends (rank drop to 1)
        # and is strictly positive in between
        rng = np.random.default_rng(6)
        pe = detvar.random_product_ensemble(2, 2, 2, rng)
        rho = detvar.density_from_ensemble(detvar.product_ensemble_to_ensemble(pe))
        f = tmp_path / "sep.json"
        f.write_text(ser.json_dumps(ser.density_to_obj(rho)))
        a1, a2 = pe.factors_a[:, 0], pe.factors_a[:, 1]
        root1 = [a1[1], -a1[0]]  # annihilates sum_i r_i a1_i
        root2 = [a2[1], -a2[0]]
        line = ser.json_dumps(
            {"p": [[z.real, z.imag] for z in root1], "q": [[z.real, z.imag] for z in root2]}
        )
        code, out, _ = run(capsys, "slice", str(f), "--line", line, "--samples", "21", "--k", "1")
        assert code == 0
        rows = [r.split(",") for r in out.strip().splitlines()[1:]]
        evs = [float(r[1]) for r in rows]
        ranks = [int(r[2]) for r in rows]
        assert evs[0] == pytest.approx(0.0, abs=1e-12) and ranks[0] == 1
        assert evs[-1] == pytest.approx(0.0, abs=1e-12) and ranks[-1] == 1
        assert min(evs[5:16]) > 1e-4 and all(r == 2 for r in ranks[5:16])

    def test_out_file(self, capsys, fixtures, tmp_path):
        target = tmp_path / "slice.csv"
        obj = jout(
            capsys,
            "slice",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--line",
            self.LINE,
            "--samples",
            "4",
            "--out",
            str(target),
        )
        assert obj["rows"] == 4
        assert target.read_text().startswith("theta,")

    def test_missing_line_point_exits_2(self, capsys, fixtures):
        code, _, err = run(
            capsys,
            "slice",
            str(fixtures / "maxmixed_2x2_density.json"),
            "--line",
            '{"p":[[1,0],[0,0]]}',
        )
        assert code == 2 and "line" in err


class TestSubprocessEntry:
    def test_module_invocation_end_to_end(self, fixtures):
        proc = subprocess.run(
            [sys.executable, "-m", "detvar", "ppt", str(fixtures / "bell_2x2_pure.json")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["verdict"] == "NPT"

    def test_module_invocation_parse_error(self, fixtures):
        proc = subprocess.run(
            [sys.executable, "-m", "detvar", "schmidt", "/nonexistent.json"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2
        assert json.loads(proc.stderr)["error"] == "ParseError"


class TestRunConfig:
    def test_invariants_enforced(self):
        from detvar.cli import RunConfig
        from detvar import ParseError

        with pytest.raises(ParseError, match="samples"):
            RunConfig(samples=0)
        with pytest.raises(ParseError, match="rel-eps"):
            RunConfig(rel_eps=0.5)
        with pytest.raises(ParseError, match="rel-eps"):
            RunConfig(rel_eps=0.0)
        cfg = RunConfig(seed=7, samples=3, rel_eps=1e-8, k=1, output_path="x")
        assert cfg.tolerance.rel_eps == 1e-8


class TestWitnessPayload:
    def test_witness_carries_minor_and_certificate(self, capsys, tmp_path):
        rho = detvar.random_density_matrix(3, 3, 3, np.random.default_rng(11))
        e = detvar.eigen_ensemble(rho)
        f = tmp_path / "ens.json"
        f.write_text(ser.json_dumps(ser.ensemble_to_obj(e)))
        obj = jout(capsys, "linearity", str(f), "--k", "2", "--samples", "10", "--seed", "2")
        assert obj["verdict"] == "NonlinearVarietyWitness"
        w = obj["witness"]
        assert w["minor"]["degree"] == 3 and w["minor"]["vars"] == 3
        assert w["division_certificate"]["planes"]
        assert {"point_a", "point_b", "curved_point", "line_midpoint"} <= set(w)


class TestInputCanonicalization:
    def test_membership_accepts_ensemble_file(self, capsys, fixtures):
        obj = jout(
            capsys,
            "membership",
            str(fixtures / "ensemble_2x2_t3.json"),
            "--point",
            "[[1,0],[0.2,0.1]]",
        )
        assert "member" in obj

    def test_minors_rejects_density_file(self, capsys, fixtures):
        code, _, err = run(capsys, "minors", str(fixtures / "maxmixed_2x2_density.json"))
        assert code == 2 and "ensemble" in err
