import csv
import io
import json
import re

import pytest

from chanent import acceptance, cli
from chanent.errors import NumericalError
from chanent.spec_io import standard_spec


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def specs(tmp_path):
    paths = {}
    for name, kind, params in [
        ("erasure", "erasure", {"d": 2, "p": 0.5}),
        ("identity2", "identity", {"d": 2}),
        ("random2", "randomizing", {"d": 2}),
        ("dephasing", "dephasing", {"probs": [0.8, 0.2]}),
        ("erasure3", "erasure", {"d": 3, "p": 0.5}),
    ]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(standard_spec(kind, name, **params)))
        paths[name] = str(path)
    return paths


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_entropy_of_erasure(specs):
    code, out, _ = run(["entropy", "--channel", specs["erasure"], "--output", "csv"])
    (row,) = csv_rows(out)
    assert code == 0
    assert float(row["value"]) == pytest.approx(0.5, abs=1e-6)
    assert row["exactness"] == "certified"


def test_min_entropy_of_identity_is_exact(specs):
    code, out, _ = run(["min-entropy", "--channel", specs["identity2"], "--output", "csv"])
    (row,) = csv_rows(out)
    assert float(row["value"]) == -1.0
    assert row["exactness"] == "closed_form"


def test_bosonic_thermal(specs):
    code, out, _ = run(["bosonic", "--family", "thermal", "--eta", "0.5", "--nb", "0", "--unconstrained"])
    assert code == 0
    assert "bosonic thermal: -1 " in out


def test_csv_columns(specs):
    _, out, _ = run(["renyi", "--channel", specs["dephasing"], "--alpha", "2", "--restarts", "2", "--output", "csv"])
    header = out.splitlines()[0].split(",")
    assert header == list(cli.COLUMNS)
    (row,) = csv_rows(out)
    assert row["alpha"] == "2.0" and row["seed"] == "42" and row["route"]


def test_json_output(specs):
    _, out, _ = run(["ext-min-entropy", "--channel", specs["random2"], "--output", "json"])
    (row,) = json.loads(out)
    assert row["value"] == pytest.approx(1.0, abs=1e-8)
    assert row["route"] == "barrier_sdp"


@pytest.mark.parametrize(
    "mode, kind, extra, expected",
    [
        ("choi", "relative", [], 2.0),
        ("generalized", "max", [], 2.0),
        ("adversarial-choi", "relative", [], 2.0),
        ("choi", "renyi", ["--alpha", "2"], 2.0),
        ("choi", "petz", ["--alpha", "0.5"], 2.0),
    ],
)
def test_divergence(specs, mode, kind, extra, expected):
    argv = ["divergence", "--left", specs["identity2"], "--right", specs["random2"], "--mode", mode, "--kind", kind]
    code, out, _ = run(argv + extra + ["--output", "json", "--restarts", "2"])
    assert code == 0
    assert json.loads(out)[0]["value"] == pytest.approx(expected, abs=1e-5)


def test_adversarial_rows_carry_heuristic_tag(specs):
    argv = ["divergence", "--left", specs["dephasing"], "--right", specs["random2"], "--mode", "adversarial"]
    code, out, _ = run(argv + ["--kind", "max", "--restarts", "2"])
    assert code == 0 and "heuristic_bound" in out


def test_choi_suite_rows(specs):
    _, out, _ = run(["choi-suite", "--channel", specs["identity2"], "--alpha", "2", "--output", "csv"])
    rows = csv_rows(out)
    assert len(rows) == 5
    for row in rows:
        assert float(row["value"]) == pytest.approx(-1.0, abs=1e-6)


def test_sweep_grid_order_and_count():
    argv = ["sweep", "--quantity", "min-entropy", "--standard", "erasure", "--param", "d=2,3", "--param", "p=0.1,0.5,0.9"]
    code, out, _ = run(argv + ["--output", "csv"])
    rows = csv_rows(out)
    assert code == 0
    assert [r["channel_name"] for r in rows] == [
        f"erasure(d={d},p={p})" for d in (2, 3) for p in (0.1, 0.5, 0.9)
    ]
    assert all(r["subcommand"] == "sweep:min-entropy" for r in rows)


def test_sweep_over_files_and_alphas(specs):
    argv = ["sweep", "--quantity", "renyi", "--channel", specs["dephasing"], specs["erasure"], "--alphas", "0.5,2"]
    _, out, _ = run(argv + ["--restarts", "2", "--output", "csv"])
    rows = csv_rows(out)
    assert [(r["channel_name"], r["alpha"]) for r in rows] == [
        ("dephasing", "0.5"), ("dephasing", "2.0"), ("erasure", "0.5"), ("erasure", "2.0")
    ]


def test_parallel_sweep_matches_serial(specs):
    argv = ["sweep", "--quantity", "entropy", "--standard", "depolarizing", "--param", "p=0.1,0.4,0.7,1.0"]
    serial = run(argv + ["--output", "csv"])[1]
    parallel = run(argv + ["--output", "csv", "--jobs", "2"])[1]
    assert serial == parallel


def test_repeated_runs_are_byte_identical(specs):
    argv = ["renyi", "--channel", specs["erasure3"], "--alpha", "1.5", "--restarts", "3", "--output", "csv"]
    assert run(argv)[1] == run(argv)[1]


@pytest.mark.parametrize(
    "argv, message",
    [
        (["entropy"], "--channel"),
        (["renyi", "--channel", "{erasure}", "--alpha", "0.2"], "alpha"),
        (["entropy", "--channel", "/nonexistent.json"], "No such file"),
        (["divergence", "--left", "{erasure}", "--right", "{identity2}"], "different dimensions"),
        (["divergence", "--left", "{identity2}", "--right", "{random2}", "--kind", "renyi"], "needs --alpha"),
        (["bosonic", "--family", "thermal", "--eta", "1.5", "--unconstrained"], "eta"),
        (["sweep", "--quantity", "entropy"], "needs --channel or --standard"),
        (["frobnicate"], "invalid choice"),
    ],
)
def test_validation_errors_exit_2(specs, argv, message):
    argv = [a.format(**specs) for a in argv]
    code, out, err = run(argv)
    assert code == 2
    assert message in err
    assert out == ""


def test_bad_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim_in": 2,\n "dim_out": }')
    code, _, err = run(["entropy", "--channel", str(path)])
    assert code == 2
    assert err.startswith("entropy: error:") and "line 2, column" in err


def test_numerical_failure_exits_3(specs, monkeypatch):
    def broken(*args, **kwargs):
        raise NumericalError("objective returned NaN")

    monkeypatch.setattr(cli, "channel_entropy", broken)
    code, _, err = run(["entropy", "--channel", specs["erasure"]])
    assert code == 3 and "numerical failure" in err


def test_check_reports_each_criterion(monkeypatch):
    fake = [
        (1, "ok", lambda policy: [acceptance.Measurement("x", 0.0, 1.0)]),
        (2, "bad", lambda policy: [acceptance.Measurement("y", 2.0, 1.0)]),
    ]
    monkeypatch.setattr(acceptance, "CRITERIA", fake)
    code, out, _ = run(["check"])
    assert code == 4
    lines = out.splitlines()
    assert re.match(r"\[PASS\] criterion +1 ok: x ", lines[0])
    assert re.match(r"\[FAIL\] criterion +2 bad: y ", lines[1])
    assert lines[-1] == "1/2 criteria passed"
    code, out, _ = run(["check", "--only", "1"])
    assert code == 0


def test_module_entry_point(specs):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "chanent", "min-entropy", "--channel", specs["identity2"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("min-entropy identity2: -1 ")
