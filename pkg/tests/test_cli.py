import csv
import io
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from zenopure import ParseError, ValidationError
from zenopure.cli import fmt, main, purify_table, render_csv, spectrum_table
from zenopure.scenario import bundled_names, load_scenario, parse_grid, parse_number, parse_scenario

REPO = Path(__file__).resolve().parent.parent
ZETA = 2.4619188346815495

BASE = """
[scenario]
name = demo
n_steps = 5
tau = {tau}

[model]
topology = single_pair
frequencies = 5, 6
couplings = 1

[probe]
theta = 0

[initial]
preset = maximally_mixed_a
{extra}
"""


def scenario_text(tau="1.0", extra=""):
    return BASE.format(tau=tau, extra=extra)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParsing:
    def test_numbers(self):
        assert parse_number("pi/2") == math.pi / 2
        assert parse_number("0.5*pi") == 0.5 * math.pi
        assert parse_number("-1e-3") == -1e-3
        with pytest.raises(ValueError):
            parse_number("2 + pi")

    def test_grid(self):
        np.testing.assert_allclose(parse_grid("0:1:0.5").values(), [0, 0.5, 1])
        with pytest.raises(ValidationError):
            parse_grid("0:1")

    def test_bundled(self):
        assert bundled_names() == ["fig2a", "fig2b", "fig4", "fig7a", "fig7b"]
        scn = load_scenario("fig2a")
        assert scn.hamiltonian.frequencies == (5.0, 6.0)
        assert scn.tau == pytest.approx(math.pi / (2 * math.sqrt(1.25)))
        assert scn.n_steps == 20
        scn = load_scenario("fig4")
        assert scn.tau == pytest.approx(ZETA / math.sqrt(2))
        assert scn.initial.beta == 1.0
        assert load_scenario("fig7a").tau == pytest.approx(0.5 * math.pi)

    def test_load_from_path(self):
        scn = load_scenario(REPO / "scenarios" / "fig4_optimize.ini")
        assert scn.needs_optimization and scn.tau is None
        assert scn.grid.step == 0.001

    @pytest.mark.parametrize("tau", ["-1", "0", "abc"])
    def test_bad_tau(self, tau):
        with pytest.raises(ValidationError):
            parse_scenario(scenario_text(tau=tau))

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="colour"):
            parse_scenario(scenario_text(extra="colour = blue"))

    def test_unknown_section(self):
        with pytest.raises(ValidationError, match="extras"):
            parse_scenario(scenario_text() + "\n[extras]\nx = 1\n")

    def test_missing_section(self):
        text = scenario_text().replace("[probe]\ntheta = 0\n", "")
        with pytest.raises(ValidationError, match="probe"):
            parse_scenario(text)

    def test_malformed(self):
        with pytest.raises(ParseError):
            parse_scenario("no section header here\n")

    def test_preset_needs_right_topology(self):
        with pytest.raises(ValidationError):
            parse_scenario(scenario_text(tau="zeta_over_sqrt2"))

    def test_optimize_needs_grid(self):
        with pytest.raises(ValidationError):
            parse_scenario(scenario_text(tau="optimize"))
        scn = parse_scenario(scenario_text(tau="optimize") + "\n[optimize]\nstart = 0.1\nstop = 2\nstep = 0.1\n")
        assert scn.needs_optimization

    def test_collects_all_problems(self):
        text = scenario_text(tau="-1").replace("n_steps = 5", "n_steps = 0")
        with pytest.raises(ValidationError) as info:
            parse_scenario(text)
        assert len(info.value.problems) >= 2


class TestFormat:
    def test_fmt(self):
        assert fmt(0.25) == "0.250000"
        assert fmt(1 / 3) == "0.333333"
        assert fmt(-1e-9) == "0.000000"
        assert fmt(True) == "true" and fmt(np.bool_(False)) == "false"
        assert fmt(3) == "3"

    def test_round_trip(self):
        scn = load_scenario("fig2a")
        header, table = purify_table(scn)
        parsed = rows(render_csv((header, table)))
        assert len(parsed) == 21
        for raw, row in zip(table, parsed):
            assert float(row["fidelity"]) == pytest.approx(raw[1], abs=5e-7)
            assert float(row["probability"]) == pytest.approx(raw[2], abs=5e-7)


class TestCommands:
    def test_scenario_list(self, capsys):
        code, out, _ = run_cli(capsys, "scenario", "list")
        assert code == 0
        assert out.split() == ["fig2a", "fig2b", "fig4", "fig7a", "fig7b"]

    def test_spectrum(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--scenario", "fig2a")
        assert code == 0
        table = rows(out)
        assert [r["modulus"] for r in table] == ["1.000000", "0.447214"]
        assert table[0]["unique_max"] == "true"

    def test_spectrum_exceptional_point(self, capsys):
        _, out, _ = run_cli(capsys, "spectrum", "--scenario", "fig4")
        table = rows(out)
        assert len(table) == 4
        assert {r["diagonalizable"] for r in table} == {"false"}

    def test_sweep(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--scenario", "fig4", "--sweep", "0:1:0.5")
        assert code == 0
        table = rows(out)
        assert [r["tau"] for r in table] == ["0.000000", "0.500000", "1.000000"]
        # no evolution: every eigenvalue has unit modulus
        assert all(table[0][f"modulus_{k}"] == "1.000000" for k in range(4))
        assert table[0]["gap_ratio"] == "1.000000"

    def test_purify_fig2b(self, capsys):
        _, out, _ = run_cli(capsys, "purify", "--scenario", "fig2b")
        table = rows(out)
        assert table[1]["fidelity"] == "1.000000"
        assert table[1]["probability"] == "0.500000"

    def test_purify_fig7b_start(self, capsys):
        _, out, _ = run_cli(capsys, "purify", "--scenario", "fig7b")
        table = rows(out)
        assert table[0]["probability"] == "0.500000"
        assert table[-1]["probability"] == "0.125000"

    def test_optimize(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", "--scenario", str(REPO / "scenarios" / "fig2a_optimize.ini"))
        assert code == 0
        assert rows(out)[0]["tau"] == "1.405000"

    def test_optimize_requires_mode(self, capsys):
        code, _, err = run_cli(capsys, "optimize", "--scenario", "fig4")
        assert code == 1
        assert "optimize" in err

    def test_out_dir(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "purify", "--scenario", "fig2a", "--out", str(tmp_path))
        assert code == 0
        target = tmp_path / "fig2a_trace.csv"
        assert out.strip() == str(target)
        assert target.read_text().startswith("N,fidelity,probability\n")

    def test_deterministic(self, capsys, tmp_path):
        run_cli(capsys, "spectrum", "--scenario", "fig7a", "--out", str(tmp_path / "a"))
        run_cli(capsys, "spectrum", "--scenario", "fig7a", "--out", str(tmp_path / "b"))
        a = (tmp_path / "a" / "fig7a_spectrum.csv").read_bytes()
        b = (tmp_path / "b" / "fig7a_spectrum.csv").read_bytes()
        assert a == b

    def test_validation_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text(scenario_text(tau="-1"))
        code, _, err = run_cli(capsys, "purify", "--scenario", str(bad))
        assert code == 1
        assert "tau" in err
        code, _, _ = run_cli(capsys, "purify", "--scenario", "no_such_scenario")
        assert code == 1

    def test_numerical_failure_exit_code(self, capsys, tmp_path):
        # every grid point sits where sqrt(2) gbar tau is a multiple of pi
        text = scenario_text(tau="optimize").replace("single_pair", "chain")
        text = text.replace("frequencies = 5, 6", "frequencies = 2, 2, 2").replace("couplings = 1", "couplings = 1, 1")
        text = text.replace("theta = 0", "theta = pi")
        step = math.pi / math.sqrt(2)
        text += f"\n[optimize]\nstart = {step!r}\nstop = {2 * step!r}\nstep = {step!r}\n"
        path = tmp_path / "nofeasible.ini"
        path.write_text(text)
        code, _, err = run_cli(capsys, "optimize", "--scenario", str(path))
        assert code == 2
        assert "numerical failure" in err

    def test_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "zenopure.cli", "spectrum", "--scenario", "fig2b"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("tau,n,re,im,modulus")
