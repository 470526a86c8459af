import json

import pytest

from sftlab.cli import EXIT_BUDGET, EXIT_CHECK, EXIT_OK, EXIT_USAGE, dims, int_list, main, read_config
from sftlab.models import build
from sftlab.sft import parse_spec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def data_rows(text):
    return [ln.split(",") for ln in text.splitlines() if ln and not ln.startswith("#")]


def test_int_list_and_dims():
    assert int_list("2..4,7") == [2, 3, 4, 7]
    assert dims("3x5") == (3, 5) and dims("4") == (4, 4)


def test_census_vertex(capsys):
    code, out, _ = run(capsys, "census", "--model", "vertex")
    assert code == EXIT_OK
    assert out.startswith("# schema: census/1\n# config: model=vertex\n")
    rows = {r[0]: r for r in data_rows(out)[1:]}
    assert rows["total"][1] == "248" and rows["trace_M4"][1] == "90"


def test_census_on_a_volume(capsys):
    code, out, _ = run(capsys, "census", "--model", "full:2", "--volume", "3x3")
    assert code == EXIT_OK and data_rows(out)[-1] == ["3x3", "512"]


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--what", "lemma", "--model", "potts:2", "--cases", "random:2:1",
                       "--volumes", "2x2", "--format", "json")
    assert code == EXIT_OK
    body = json.loads("\n".join(ln for ln in out.splitlines() if not ln.startswith("#")))
    assert body


def test_failed_check_exit_code(capsys):
    code, out, _ = run(capsys, "free-energy", "--beta", "1.0", "--onsager", "--widths", "3..4", "--tol", "1e-9")
    assert code == EXIT_CHECK


@pytest.mark.parametrize("argv", [
    [],
    ["nonsense"],
    ["census"],
    ["census", "--model", "ising"],
    ["sample", "--model", "yprime", "--sweeps", "1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err.startswith("sftlab:")


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("SFTLAB_BUDGET", "5")
    code, _, err = run(capsys, "census", "--model", "vertex", "--volume", "4x4")
    assert code == EXIT_BUDGET and "budget" in err


def test_config_round_trip(capsys, tmp_path):
    first = tmp_path / "a.csv"
    again = tmp_path / "b.csv"
    assert main(["peierls", "--ell-max", "10", "--beta", "2.0", "--out", str(first)]) == EXIT_OK
    cfg = read_config(first)
    assert cfg["beta"] == "2.0" and cfg["ell_max"] == "10"
    assert main(["peierls", "--config", str(first), "--out", str(again)]) == EXIT_OK
    assert first.read_bytes() == again.read_bytes()
    # command-line flags win over the config file
    assert main(["peierls", "--config", str(first), "--beta", "3.0", "--out", str(again)]) == EXIT_OK
    assert "beta=3.0" in again.read_text()


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("model=vertex\ncolour=blue\n")
    code, _, err = run(capsys, "census", "--config", str(cfg))
    assert code == EXIT_USAGE and "colour" in err


def test_model_export_round_trip(tmp_path):
    path = tmp_path / "spec.txt"
    for name in ("vertex", "edge-potts:2:2", "yprime"):
        assert main(["model", "export", "--name", name, "--out", str(path)]) == EXIT_OK
        assert parse_spec(path.read_text()).same_language(build(name)[0])


def test_sample_and_scan_outputs(capsys):
    code, out, _ = run(capsys, "sample", "--model", "potts:2", "--N", "3", "--size", "6x6", "--sweeps", "20",
                       "--thin", "10", "--burn-in", "0", "--chains", "2", "--seed", "1")
    assert code == EXIT_OK
    rows = data_rows(out)
    assert rows[0][:3] == ["chain", "sweep", "max_share"] and len(rows) == 5
    code, out, _ = run(capsys, "phase-scan", "--family", "potts:2", "--grid", "1,4", "--replicates", "2",
                       "--size", "6", "--sweeps", "40")
    assert code == EXIT_OK
    assert "# monotone_within_errors=" in out and len(data_rows(out)) == 3


def test_gluing_and_entropy(capsys):
    code, out, _ = run(capsys, "gluing", "--model", "edge-potts:2:2", "--gap", "2", "--trials", "5")
    assert code == EXIT_OK and data_rows(out)[-1] == ["5", "5", "0", "0"]
    code, out, _ = run(capsys, "entropy", "--model", "full:2", "--widths", "2..3")
    assert code == EXIT_OK


def test_gnuplot_hint(capsys, tmp_path):
    code, out, _ = run(capsys, "peierls", "--ell-max", "8", "--gnuplot-hint")
    assert code == EXIT_OK
    assert out.splitlines()[-1].startswith("# gnuplot: ") and "'ell':'ratio'" in out
    code, out, _ = run(capsys, "peierls", "--ell-max", "8")
    assert "gnuplot" not in out
