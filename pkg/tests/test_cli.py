"""End-to-end CLI checks: exit codes, config merging, and output files.

Everything runs in-process through cli.main(argv) so the tests see exact
exit codes and can monkeypatch the experiment layer where a failure path
is cheaper to fake than to provoke.
"""

import json
from types import SimpleNamespace

import pytest

from halfspace_lpp import cli
from halfspace_lpp.experiments.io import CSV_HEADER


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- usage errors

def test_no_arguments_shows_usage(capsys):
    code, out, err = run([], capsys)
    assert code == 1
    assert "Usage" in out + err


def test_missing_n_is_a_usage_error(capsys):
    code, _, err = run(["comparisons"], capsys)
    assert code == 1
    assert "missing field: N" in err


def test_misspelled_command_gets_a_hint(capsys):
    code, _, err = run(["localisation", "--n", "10"], capsys)
    assert code == 1
    assert "no such command 'localisation'" in err
    assert "did you mean 'localization'?" in err


def test_unknown_config_key_gets_a_hint(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('N = 30\nkapa = 1.0\n')
    code, _, err = run(["comparisons", "--config", str(cfg)], capsys)
    assert code == 1
    assert "unknown config key 'kapa'" in err
    assert "did you mean 'kappa'?" in err


def test_malformed_toml_is_reported(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("N = [unclosed\n")
    code, _, err = run(["comparisons", "--config", str(cfg)], capsys)
    assert code == 1
    assert "malformed config" in err


def test_bad_float_list_is_a_usage_error(tmp_path, capsys):
    code, _, err = run(
        ["crossing", "--n", "30", "--gaps", "a,b", "--out", str(tmp_path / "x.csv")],
        capsys,
    )
    assert code == 1
    assert "comma-separated numbers" in err


def test_invalid_frame_is_a_usage_error(tmp_path, capsys):
    # delta this large pushes the derived density outside (0,1) at N=2
    code, _, err = run(
        ["comparisons", "--n", "2", "--delta", "40", "--out", str(tmp_path / "x.csv")],
        capsys,
    )
    assert code == 1
    assert "outside (0,1)" in err


# ---------------------------------------------------------------- catalog

def test_list_experiments_text(capsys):
    code, out, _ = run(["list-experiments"], capsys)
    assert code == 0
    for name in ("comparisons", "crossing", "localization", "covariance",
                 "tails", "modulus", "kernel", "rw-bounds"):
        assert name in out


def test_list_experiments_json_schema(capsys):
    code, out, _ = run(["list-experiments", "--json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload) == 8
    for entry in payload:
        assert set(entry) == {"name", "anchors"}
        assert entry["anchors"] and all(isinstance(a, str) for a in entry["anchors"])


# ---------------------------------------------------------------- happy path

def test_comparisons_writes_csv_and_sidecar(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    code, stdout, _ = run(
        ["comparisons", "--n", "30", "--replicas", "10", "--seed", "3",
         "--pairs", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert f"wrote {out}" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 7  # six families
    sidecar = json.loads((tmp_path / "cmp.json").read_text())
    assert sidecar["experiment"] == "comparisons"
    assert sidecar["N"] == 30
    assert sidecar["seed"] == 3
    assert sidecar["kappa"] == 2.0  # subcommand default echoed back
    assert sidecar["tau"] == 1.0  # frame default echoed back


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(f'N = 30\nseed = 5\nreplicas = 10\nout = "{tmp_path / "a.csv"}"\n')
    code, _, _ = run(
        ["comparisons", "--config", str(cfg), "--seed", "9", "--pairs", "2"],
        capsys,
    )
    assert code == 0
    sidecar = json.loads((tmp_path / "a.json").read_text())
    assert sidecar["seed"] == 9
    assert sidecar["replicas"] == 10


def test_default_out_respects_data_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LPP_DATA_DIR", str(tmp_path))
    code, stdout, _ = run(
        ["comparisons", "--n", "30", "--replicas", "10", "--pairs", "2"],
        capsys,
    )
    assert code == 0
    assert (tmp_path / "comparisons.csv").exists()
    assert str(tmp_path / "comparisons.csv") in stdout


def test_covariance_oracle_toggle(tmp_path, capsys):
    base = ["covariance", "--n", "40", "--replicas", "1000", "--model", "pp"]
    code, _, _ = run(base + ["--out", str(tmp_path / "with.csv")], capsys)
    assert code == 0
    code, _, _ = run(
        base + ["--no-restart-oracle", "--out", str(tmp_path / "without.csv")],
        capsys,
    )
    assert code == 0
    with_rows = (tmp_path / "with.csv").read_text().splitlines()
    without_rows = (tmp_path / "without.csv").read_text().splitlines()
    assert any("restart_var" in line for line in with_rows)
    assert not any("restart" in line for line in without_rows)
    assert json.loads((tmp_path / "with.json").read_text())["restart_oracle"] is True
    assert json.loads((tmp_path / "without.json").read_text())["restart_oracle"] is False


def test_kernel_explicit_grid(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, _, _ = run(
        ["kernel", "--n", "20", "--s-grid", "88,95", "--x-nodes", "24",
         "--contour-nodes", "128", "--m-max", "10", "--out", str(out)],
        capsys,
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "S,cdf,truncation_bound,quad_points"
    assert len(lines) == 3
    for line in lines[1:]:
        s, cdf, bound, nodes = line.split(",")
        assert 0.0 <= float(cdf) <= 1.0
        assert float(bound) >= 0.0
        assert int(nodes) == 24
    sidecar = json.loads((tmp_path / "k.json").read_text())
    assert sidecar["s_values"] == [88.0, 95.0]
    assert "replicas" not in sidecar  # deterministic command, no MC knobs


def test_kernel_auto_grid_is_centered(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, _, _ = run(
        ["kernel", "--n", "20", "--x-nodes", "16", "--contour-nodes", "96",
         "--m-max", "6", "--out", str(out)],
        capsys,
    )
    assert code == 0
    sidecar = json.loads(out.with_suffix(".json").read_text())
    values = sidecar["s_values"]
    assert len(values) == 5
    spacing = {round(b - a, 9) for a, b in zip(values, values[1:])}
    assert len(spacing) == 1  # evenly spaced around the predicted threshold


# ---------------------------------------------------------------- determinism

def test_csv_bytes_independent_of_threads_and_rerun(tmp_path, capsys):
    outs = []
    for tag, threads in (("a", "1"), ("b", "4"), ("c", "1")):
        out = tmp_path / f"{tag}.csv"
        code, _, _ = run(
            ["crossing", "--n", "30", "--replicas", "50", "--gaps", "1,2",
             "--u2", "0.25", "--threads", threads, "--out", str(out)],
            capsys,
        )
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


# ---------------------------------------------------------------- exit code 2

def test_invariant_violation_exits_two_after_writing(tmp_path, capsys, monkeypatch):
    report = SimpleNamespace(
        csv_rows=lambda: [],
        invariant_failures=("stat_minus_le_stat_plus: 3 violations out of 10 checks",),
    )
    monkeypatch.setattr(cli.ex, "check_comparisons", lambda *a, **k: report)
    out = tmp_path / "bad.csv"
    code, stdout, err = run(
        ["comparisons", "--n", "30", "--replicas", "10", "--out", str(out)],
        capsys,
    )
    assert code == 2
    assert "invariant violated: stat_minus_le_stat_plus" in err
    # the evidence is written before the failure is raised
    assert out.exists()
    assert f"wrote {out}" in stdout
