import subprocess
import sys

import pytest

from biocircuit_tf.circuit import corpus
from biocircuit_tf.cli import main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name, text in corpus().items():
        (tmp_path / name).write_text(text)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_derive_prints_both_routes_and_writes_certificate(workdir, capsys):
    code, out, _ = run(capsys, "derive", "activated.gnc")
    assert code == 0
    assert out.splitlines() == [
        "block-diagram: (gamma_A)/(s + alpha)",
        "ode: (gamma_A)/(s + alpha)",
        "EQUIVALENT",
        "certificate: activated.tfcert.json",
    ]
    assert (workdir / "activated.tfcert.json").exists()
    code, out, _ = run(capsys, "replay", "activated.tfcert.json")
    assert code == 0 and out.startswith("ACCEPT")


def test_derive_out_option(workdir, capsys):
    code, _, _ = run(capsys, "derive", "cascade2.gnc", "--out", "c.json")
    assert code == 0 and (workdir / "c.json").exists()


def test_validate(workdir, capsys):
    code, out, _ = run(capsys, "validate", "activated.gnc", "--set", "alpha=1", "--set", "gamma_A=2", "--s", "1,2,5")
    assert code == 0 and out.rstrip().endswith("VALID")


def test_validate_complex_points(workdir, capsys):
    code, out, _ = run(capsys, "validate", "feedback_pos.gnc", "--s", "1+1j,3")
    assert code == 0


def test_check_equiv_with_wrong_expectation(workdir, capsys):
    (workdir / "wrong.gnc").write_text(corpus()["activated.gnc"] + "expect gamma_A/(s + 2*alpha)\n")
    code, out, _ = run(capsys, "check-equiv", "wrong.gnc")
    assert code == 1 and out.rstrip().endswith("NOT EQUIVALENT")
    (workdir / "right.gnc").write_text(corpus()["activated.gnc"] + "expect gamma_A/(s + alpha)\n")
    assert run(capsys, "check-equiv", "right.gnc")[0] == 0


def test_simulate_csv(workdir, capsys):
    code, out, _ = run(capsys, "simulate", "activated.gnc", "--duration", "0.01", "--dt", "0.001")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,u,y" and len(lines) == 12
    code, _, _ = run(capsys, "simulate", "activated.gnc", "--duration", "0.01", "--out", "y.csv")
    assert code == 0 and (workdir / "y.csv").read_text().startswith("t,u,y\n")


def test_obligations_listing(workdir, capsys):
    code, out, _ = run(capsys, "obligations", "activated.gnc")
    assert code == 0
    assert "[open] LaplaceExists(u)" in out
    assert "[numerically-sampled: pass] NonzeroDenom(s + alpha)" in out
    code, out, _ = run(capsys, "obligations", "activated.gnc", "--set", "alpha=-1", "--s", "1")
    assert code == 1 and "[numerically-sampled: FAIL] Positivity(alpha)" in out


def test_sampled_nonzero_denominator_failure(workdir, capsys):
    code, out, _ = run(capsys, "obligations", "activated.gnc", "--set", "alpha=-2", "--s", "2")
    assert code == 1 and "[numerically-sampled: FAIL] NonzeroDenom(s + alpha)" in out


def test_usage_errors_exit_2(workdir, capsys):
    assert run(capsys, "derive", "activated.gnc", "--set", "beta=1")[0] == 2
    assert run(capsys, "derive", "missing.gnc")[0] == 2
    assert run(capsys, "validate", "activated.gnc", "--tolerance", "0")[0] == 2
    assert run(capsys, "validate", "activated.gnc", "--dt", "-1")[0] == 2
    assert run(capsys, "validate", "activated.gnc", "--s", "-1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "derive", "activated.gnc", "--set", "alpha")[0] == 2


def test_parse_error_reports_span(workdir, capsys):
    (workdir / "bad.gnc").write_text("param a\ngene Y degrad a\n")
    code, _, err = run(capsys, "derive", "bad.gnc")
    assert code == 2
    assert err.startswith("bad.gnc:2:8: error:")


def test_unbound_parameter_on_simulate(workdir, capsys):
    (workdir / "free.gnc").write_text(corpus()["activated.gnc"].replace(" = 2", ""))
    code, _, err = run(capsys, "simulate", "free.gnc")
    assert code == 2 and "gamma_A" in err


def test_replay_rejects_tampered_and_malformed(workdir, capsys):
    run(capsys, "derive", "activated.gnc")
    doc = (workdir / "activated.tfcert.json").read_text()
    (workdir / "t.json").write_text(doc.replace('"alpha"', '"2*alpha"', 1))
    assert run(capsys, "replay", "t.json")[0] == 1
    (workdir / "m.json").write_text("{")
    assert run(capsys, "replay", "m.json")[0] == 2


def test_derive_is_deterministic(workdir, capsys):
    run(capsys, "derive", "feedback_pos.gnc", "--out", "a.json")
    run(capsys, "derive", "feedback_pos.gnc", "--out", "b.json")
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()


def test_module_entry_point(workdir):
    proc = subprocess.run(
        [sys.executable, "-m", "biocircuit_tf", "check-equiv", "repressed.gnc"],
        capture_output=True, text=True, cwd=workdir,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "block-diagram: (-gamma_R)/(s + alpha)"
