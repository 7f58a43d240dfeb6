import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dirac_barrier.cli import main
from dirac_barrier.kinematics import EnergyZone, barrier_channel, make_kinematics
from dirac_barrier.phases import IncomingState
from dirac_barrier.records import RECORD_FIELDS, read_records, render, run_record, write_records


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestRecords:
    def test_record_fields_and_validation(self):
        rec = run_record(make_kinematics(2.0, 0.3, 1.0, 0.5, 1.0), IncomingState(0.6, 0.8, 0.2, 0.0))
        assert tuple(rec) == RECORD_FIELDS
        assert rec["zone"] == "diffusion"
        assert rec["zone_consistent"] is True and rec["flagged"] is False
        assert rec["on_shell_residual"] <= 1e-15
        total = rec["r_plus"] + rec["r_minus"] + rec["t_plus"] + rec["t_minus"]
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("suffix", [".csv", ".jsonl"])
    def test_round_trip_is_lossless(self, tmp_path, suffix):
        records = [
            run_record(make_kinematics(E, 0.4, 1.0, 2.5, 1.3), IncomingState(0.6, 0.8, 0.1, -0.4))
            for E in (1.2, 2.0, 3.7, 7.1)
        ]
        path = tmp_path / f"out{suffix}"
        write_records(path, records, suffix[1:])
        back = read_records(path)
        assert len(back) == len(records)
        for a, b in zip(records, back):
            assert set(a) == set(b)
            for key in RECORD_FIELDS:
                assert a[key] == b[key], key

    def test_csv_formatting(self):
        rec = run_record(make_kinematics(2.0, 0.3, 1.0, 0.5, 1.0), IncomingState(1.0, 0.0))
        header, row = render([rec], "csv").splitlines()
        assert header.split(",") == list(RECORD_FIELDS)
        cells = dict(zip(header.split(","), row.split(",")))
        assert cells["zone_consistent"] == "true"
        assert float(cells["p1"]) == rec["p1"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render([], "xml")


class TestAmplitudesCommand:
    def test_documented_point(self, capsys, tmp_path):
        out = tmp_path / "point.jsonl"
        code, stdout, err = run(capsys, "amplitudes", "--E", "2", "--angle", "0.3", "--V0", "4", "--L", "1", "--out", str(out))
        assert code == 0
        (rec,) = read_records(out)
        # E - V0 = -2 lies below -sqrt(p2^2 + m^2), so this point is in the Klein band
        k = make_kinematics(2.0, 0.3, 1.0, 4.0, 1.0)
        assert rec["zone"] == barrier_channel(k).zone.value == "klein"
        assert rec["unitarity_residual"] <= 1e-11
        assert "zone" in stdout and "Klein zone" in err

    def test_tunneling_point(self, capsys, tmp_path):
        out = tmp_path / "point.csv"
        assert run(capsys, "amplitudes", "--E", "2", "--angle", "0.3", "--V0", "2.5", "--out", str(out))[0] == 0
        (rec,) = read_records(out)
        assert rec["zone"] == "tunneling" and rec["unitarity_residual"] <= 1e-11

    def test_free_propagation(self, capsys, tmp_path):
        out = tmp_path / "free.csv"
        assert run(capsys, "amplitudes", "--V0", "0", "--angle", "0.7", "--out", str(out))[0] == 0
        (rec,) = read_records(out)
        assert math.hypot(rec["T_re"], rec["T_im"]) == pytest.approx(1.0, abs=1e-15)

    def test_grazing_rejected(self, capsys):
        code, _, err = run(capsys, "amplitudes", "--angle", "1.5707963")
        assert code == 2
        assert "grazing" in err

    @pytest.mark.parametrize(
        "argv, fragment",
        [
            (["--E", "0.5"], "E > m"),
            (["--m", "-1"], "mass"),
            (["--L", "0"], "width"),
            (["--Iplus-mag", "0.5"], "expected 1"),
        ],
    )
    def test_domain_errors_exit_two(self, capsys, argv, fragment):
        code, _, err = run(capsys, "amplitudes", *argv)
        assert code == 2
        assert fragment in err

    def test_degrees(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "amplitudes", "--angle", "30", "--deg", "--V0", "0.5", "--out", str(a))
        run(capsys, "amplitudes", "--angle", repr(math.radians(30)), "--V0", "0.5", "--out", str(b))
        assert read_records(a)[0]["p2"] == pytest.approx(read_records(b)[0]["p2"], rel=1e-15)


class TestSweep:
    def test_two_steps_two_rows(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        assert run(capsys, "sweep", "--variable", "E", "--start", "1.5", "--stop", "3", "--steps", "2", "--out", str(out))[0] == 0
        assert len(read_records(out)) == 2

    def test_stdout_when_no_out(self, capsys):
        code, stdout, _ = run(capsys, "sweep", "--variable", "V0", "--start", "0", "--stop", "1", "--steps", "3")
        assert code == 0
        assert len(stdout.splitlines()) == 4

    def test_width_sweep_shows_resonance_spikes(self, capsys, tmp_path):
        k = make_kinematics(3.0, 0.3, 1.0, 1.0, 1.0)
        q1 = barrier_channel(k).q1.real
        steps = 301
        stop = 3 * math.pi / q1
        out = tmp_path / "L.jsonl"
        args = ["sweep", "--variable", "L", "--start", "0.001", "--stop", repr(stop), "--steps", str(steps)]
        assert run(capsys, *args, "--E", "3", "--angle", "0.3", "--V0", "1", "--out", str(out))[0] == 0
        recs = read_records(out)
        L = np.array([r["L"] for r in recs])
        t = np.array([r["transmittance"] for r in recs])
        for n in (1, 2, 3):
            i = int(np.argmin(abs(L - n * math.pi / q1)))
            assert t[i] == pytest.approx(1.0, abs=1e-3)
        assert t.min() < 0.99

    def test_phase_scan_follows_sinusoid(self, capsys, tmp_path):
        out = tmp_path / "phase.csv"
        code = run(capsys, "phase-scan", "--E", "2", "--angle", "0.5", "--V0", "0.8", "--Iplus-mag", "0.6", "--Iminus-mag", "0.8", "--out", str(out))[0]
        assert code == 0
        recs = read_records(out)
        assert len(recs) == 65
        phi = np.array([r["alpha"] - r["beta"] for r in recs])
        r_plus = np.array([r["r_plus"] for r in recs])
        design = np.column_stack([np.ones_like(phi), np.sin(phi), np.cos(phi)])
        coef, *_ = np.linalg.lstsq(design, r_plus, rcond=None)
        assert np.abs(design @ coef - r_plus).max() <= 1e-12
        assert abs(coef[2]) <= 1e-12
        assert coef[1] < 0

    def test_bad_spec_writes_nothing(self, capsys, tmp_path):
        out = tmp_path / "never.csv"
        assert run(capsys, "sweep", "--variable", "E", "--start", "3", "--stop", "2", "--out", str(out))[0] == 2
        assert run(capsys, "sweep", "--variable", "E", "--start", "2", "--stop", "3", "--steps", "1", "--out", str(out))[0] == 2
        # the grid walks below E = m half way through: nothing may be written
        assert run(capsys, "sweep", "--variable", "E", "--start", "0.5", "--stop", "3", "--steps", "5", "--out", str(out))[0] == 2
        assert not out.exists()
        assert list(tmp_path.iterdir()) == []

    def test_failure_keeps_previous_file(self, capsys, tmp_path):
        out = tmp_path / "keep.csv"
        out.write_text("old\n")
        assert run(capsys, "sweep", "--variable", "angle", "--start", "0", "--stop", "1.6", "--out", str(out))[0] == 2
        assert out.read_text() == "old\n"

    def test_deterministic_bytes(self, capsys, tmp_path):
        paths = [tmp_path / "a.jsonl", tmp_path / "b.jsonl"]
        for p in paths:
            run(capsys, "sweep", "--variable", "angle", "--start", "-1", "--stop", "1", "--steps", "41", "--V0", "2.2", "--out", str(p))
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestZones:
    def test_no_barrier_all_diffusion(self, capsys, tmp_path):
        out = tmp_path / "z.csv"
        assert run(capsys, "zones", "--V0", "0", "--grid", "20", "15", "--out", str(out))[0] == 0
        assert {r["zone"] for r in read_records(out)} == {"diffusion"}

    def test_high_barrier_has_klein_band(self, capsys, tmp_path):
        out = tmp_path / "z.jsonl"
        assert run(capsys, "zones", "--V0", "10", "--E-range", "1.01", "12", "--angle-range", "0", "0", "--grid", "200", "1", "--out", str(out))[0] == 0
        recs = read_records(out)
        low = [r for r in recs if r["E"] < 1.5]
        assert low and all(r["zone"] == "klein" for r in low)
        assert {"klein", "tunneling", "diffusion"} <= {r["zone"] for r in recs}

    def test_band_edges_follow_loci(self, capsys, tmp_path):
        out = tmp_path / "z.jsonl"
        V0, m = 4.0, 1.0
        run(capsys, "zones", "--V0", str(V0), "--E-range", "1.01", "9", "--angle-range", "-1.2", "1.2", "--grid", "120", "31", "--out", str(out))
        recs = read_records(out)
        energies = sorted({r["E"] for r in recs})
        spacing = energies[1] - energies[0]
        for r in recs:
            edge = math.hypot(r["p2"], m)
            lower, upper = V0 - edge, V0 + edge
            if r["zone"] == "klein":
                assert r["E"] < lower
            elif r["zone"] == "diffusion":
                assert r["E"] > upper
            else:
                assert lower - spacing <= r["E"] <= upper + spacing

    def test_bad_range(self, capsys):
        assert run(capsys, "zones", "--E-range", "0.5", "3")[0] == 2


class TestResonancesCommand:
    def test_width_table(self, capsys, tmp_path):
        out = tmp_path / "res.csv"
        code, stdout, _ = run(capsys, "resonances", "--E", "3", "--angle", "0.3", "--V0", "1", "--out", str(out))
        assert code == 0
        recs = read_records(out)
        assert [r["n"] for r in recs] == [1, 2, 3, 4, 5]
        q1 = barrier_channel(make_kinematics(3.0, 0.3, 1.0, 1.0, 1.0)).q1.real
        for r in recs:
            assert r["value"] == r["n"] * math.pi / q1
            assert abs(r["abs_T"] - 1) <= 1e-10
        assert len(stdout.splitlines()) == 6

    def test_energy_scan_warns_on_zone_crossing(self, capsys):
        code, stdout, err = run(capsys, "resonances", "--variable", "E", "--start", "1.05", "--stop", "6", "--V0", "1", "--L", "3", "--angle", "0.3")
        assert code == 0
        assert "outside the diffusion zone" in err
        assert len(stdout.splitlines()) > 1

    def test_tunneling_rejected(self, capsys):
        assert run(capsys, "resonances", "--E", "2", "--V0", "1.5")[0] == 2

    def test_zero_order(self, capsys):
        code, stdout, _ = run(capsys, "resonances", "--E", "3", "--V0", "1", "--n-max", "0")
        assert code == 0 and len(stdout.splitlines()) == 1


class TestDemoAndVerify:
    @pytest.mark.parametrize("theta, alpha, expected", [("0", "1.3", 2.0), ("0.4", repr(math.pi / 2), 2.0), (repr(math.pi / 4), "0", 1.0)])
    def test_isospin(self, capsys, theta, alpha, expected):
        code, stdout, _ = run(capsys, "demo-isospin", "--theta", theta, "--alpha", alpha)
        assert code == 0
        assert float(stdout.split("ratio=")[1]) == pytest.approx(expected, abs=1e-14)

    def test_isospin_divergence(self, capsys):
        assert run(capsys, "demo-isospin", "--theta", repr(math.pi / 4), "--alpha", repr(math.pi))[0] == 2

    def test_verify_passes(self, capsys):
        code, stdout, _ = run(capsys, "verify", "--samples", "100")
        assert code == 0
        assert stdout.splitlines()[-1] == "RESULT PASS"

    def test_injected_fault_fails(self, capsys):
        code, stdout, _ = run(capsys, "verify", "--samples", "20", "--tolerance", "1e-30")
        assert code == 1
        assert "worst sample: E=" in stdout

    def test_klein_only(self, capsys, tmp_path):
        out = tmp_path / "v.txt"
        code, stdout, _ = run(capsys, "verify", "--samples", "200", "--zones", "klein", "--out", str(out))
        assert code == 0
        assert "zones=klein" in stdout
        assert any(line.startswith("PASS unitarity") for line in stdout.splitlines())
        assert out.read_text() == stdout

    def test_bad_zone_list(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--zones", "boundary"])
        assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "p.jsonl"
    proc = subprocess.run(
        [sys.executable, "-m", "dirac_barrier", "amplitudes", "--E", "2.5", "--V0", "1", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["zone"] == "diffusion"
