import csv

import pytest

from holoentropy import __version__
from holoentropy.cli import REPRO, run

LIGHT = {
    "disc-boxdim": ["--count", "20000", "--n_max", "5"],
    "transfer-power-curve": ["--count", "1500", "--witnesses", "10", "--net_radius", "0.2",
                             "--m", "1,2"],
    "diag-k": ["--n_max", "8"],
}


def read(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


def test_entropy_csv_contract(tmp_path):
    out = tmp_path / "e.csv"
    assert run(["entropy", "--n_max", "6", "--out", str(out)]) == 0
    head, rows = read(out)
    assert head == f"# command=entropy seed=0 version={__version__}"
    assert list(rows[0]) == ["n", "lower", "upper", "method"]
    assert [int(r["n"]) for r in rows] == list(range(1, 7))


def test_corank_sharp_report(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert run(["repro", "corank-sharp", "--r", "2", "--m", "2", "--Nvars", "3",
                "--out", str(out)]) == 0
    assert "corank=3 bound=3 pass" in capsys.readouterr().out
    _, rows = read(out)
    assert rows[0]["corank"] == "3" and rows[0]["passed"] == "true"


def test_diag_k_repro(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["repro", "diag-k", "--epsilon", "0.5", "--N", "10", "--out", str(out)]) == 0
    head, rows = read(out)
    assert head.startswith("# command=repro diag-k seed=0")
    assert float(rows[0]["lower"]) == 0.5
    assert float(rows[0]["upper"]) == pytest.approx(3 + 2 ** -10)
    for r in rows:
        assert float(r["envelope_lower"]) <= float(r["lower"])
        assert float(r["upper"]) <= float(r["envelope_upper"])


@pytest.mark.parametrize("rid", sorted(REPRO))
def test_every_repro_id_runs_and_is_deterministic(tmp_path, rid):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    extra = LIGHT.get(rid, [])
    assert run(["repro", rid, "--seed", "3", "--out", str(a)] + extra) == 0
    assert run(["repro", rid, "--seed", "3", "--out", str(b)] + extra) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith(f"# command=repro {rid} seed=3 version=")


def test_schema_violations_exit_2(tmp_path, capsys):
    assert run(["entropy", "--bogus", "1", "--out", str(tmp_path / "x.csv")]) == 2
    assert "bogus" in capsys.readouterr().err
    assert run(["entropy", "--n_max", "many"]) == 2
    assert run(["repro", "no-such-id"]) == 2
    assert run([]) == 2
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("command: sigma\nextra: 1\n")
    assert run(["--config", str(cfg)]) == 2


def test_computation_error_exit_1(tmp_path, capsys):
    assert run(["sigma", "--N_max", "6", "--out", str(tmp_path / "s.csv")]) == 1
    err = capsys.readouterr().err
    assert "exceeds the factorial cap" in err
    assert not (tmp_path / "s.csv").exists()


def test_yaml_config_and_overrides(tmp_path):
    cfg = tmp_path / "run.yaml"
    out = tmp_path / "sigma.csv"
    cfg.write_text(f"command: sigma\nseed: 4\nout: {out}\nparams:\n  r: 2\n  N_max: 3\n")
    assert run(["--config", str(cfg)]) == 0
    head, rows = read(out)
    assert "seed=4" in head and len(rows) == 3
    assert float(rows[0]["lower"]) == pytest.approx(2 ** -0.5 * 2 ** -2)
    assert run(["--config", str(cfg), "--N_max", "2"]) == 0
    assert len(read(out)[1]) == 2


def test_out_dir_env_and_plot_data(tmp_path, monkeypatch):
    monkeypatch.setenv("HOLOENTROPY_OUT_DIR", str(tmp_path))
    assert run(["sigma", "--N_max", "3", "--plot-data"]) == 0
    assert (tmp_path / "sigma.csv").exists()
    dat = (tmp_path / "sigma.lower.dat").read_text().split("\n")
    assert dat[0].split()[0] == "1" and len(dat[0].split()) == 2


def test_summability_commands(tmp_path, capsys):
    assert run(["summability", "--profile", "sigma", "--p", "1",
                "--out", str(tmp_path / "a.csv")]) == 0
    assert "divergent-consistent" in capsys.readouterr().out
    assert run(["summability", "--out", str(tmp_path / "b.csv")]) == 0
    assert "summable-consistent" in capsys.readouterr().out


def test_cover_and_polyrank_commands(tmp_path, capsys):
    assert run(["cover", "--count", "40", "--exact", "true",
                "--out", str(tmp_path / "c.csv")]) == 0
    _, rows = read(tmp_path / "c.csv")
    counts = {r["method"]: int(r["count"]) for r in rows}
    assert counts["packing-2eps"] <= counts["exact"] <= counts["greedy"]
    fam = tmp_path / "fam.txt"
    fam.write_text("1 * z1^2 z2^0\n1 * z1^1 z2^1\n1 * z1^0 z2^2\n")
    assert run(["polyrank", "--family", "file", "--file", str(fam), "--Nvars", "2",
                "--out", str(tmp_path / "p.csv")]) == 0
    _, rows = read(tmp_path / "p.csv")
    assert rows[0]["rank"] == "2" and rows[0]["passed"] == "true"
