import json

import pytest

from spinledger.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    meta = {}
    lines = [ln for ln in text.splitlines() if ln]
    data_lines = []
    for ln in lines:
        if ln.startswith("# "):
            key, _, value = ln[2:].partition(" = ")
            meta[key] = value
        else:
            data_lines.append(ln)
    header = data_lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in data_lines[1:]]
    return meta, rows


def test_thermal_reference_row(capsys):
    code, out, _ = run_cli(["thermal", "--I", "0.01", "--T", "300"], capsys)
    assert code == 0
    meta, rows = parse_csv(out)
    assert float(rows[0]["delta_L"]) == pytest.approx(6.4359148533833e-12, rel=1e-10)
    assert float(rows[0]["IkT"]) == pytest.approx(4.1421e-23, rel=1e-10)
    assert "order-of-magnitude" in meta["note"]


def test_measure_l1(capsys):
    code, out, _ = run_cli(["measure", "--L", "1"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0]["F"]) == pytest.approx(0.5773502691896257, rel=1e-12)
    assert float(rows[0]["matching_residual_max"]) <= 1e-10


def test_measure_sweep_jobs_deterministic(tmp_path, capsys):
    paths = []
    for jobs in ("1", "2"):
        path = tmp_path / f"sweep-{jobs}.csv"
        code = main(["measure", "--L", "1,2,3,4", "--jobs", jobs,
                     "--output", str(path)])
        capsys.readouterr()
        assert code == 0
        paths.append(path)
    a, b = (p.read_bytes() for p in paths)
    assert a == b


def test_ideal_subcommand(capsys):
    code, out, _ = run_cli(["ideal"], capsys)
    assert code == 0
    meta, rows = parse_csv(out)
    assert meta["ideal_classification"] == "TypeII"
    assert meta["apparatus_classification"] == "TypeI"
    by_comp = {r["component"]: r for r in rows}
    assert float(by_comp["x"]["cross_re"]) == pytest.approx(0.5)
    assert float(by_comp["y"]["cross_im"]) == pytest.approx(-0.5)
    assert float(by_comp["z"]["cross_re"]) == 0.0


def test_decohere_tracks_bound(capsys):
    code, out, _ = run_cli(["decohere", "--overlap", "0.8", "--n-env", "6"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 7
    for row in rows:
        assert float(row["deviation"]) <= 1e-10
    assert float(rows[4]["bound"]) == pytest.approx(0.8 ** 4, rel=1e-12)


def test_satellite_byte_identical_reruns(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for path in (out1, out2):
        code = main(["satellite", "--n", "20", "--L", "4", "--seed", "7",
                     "--output", str(path)])
        capsys.readouterr()
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != b""


def test_streak_external_and_internal(capsys):
    code, out, _ = run_cli(["streak", "--n", "4", "--L", "2",
                            "--mode", "external"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 5
    assert float(rows[-1]["postselected_j2"]) > float(rows[1]["postselected_j2"])

    code, out, _ = run_cli(["streak", "--n", "2", "--L", "2", "--mode",
                            "internal", "--K", "4"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    ledgers = [float(r["combined_jz_ledger"]) for r in rows]
    assert max(abs(v - ledgers[0]) for v in ledgers) <= 1e-10


def test_json_format(capsys):
    code, out, _ = run_cli(["thermal", "--format", "json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["metadata"]["version"]
    assert payload["metadata"]["prng"] == "numpy.random.PCG64"
    assert payload["columns"][0] == "I"
    assert len(payload["rows"]) == 1


def test_unknown_subcommand_exits_one(capsys):
    code, _, _ = run_cli(["frobnicate"], capsys)
    assert code == 1


def test_config_error_names_field(capsys):
    code, _, err = run_cli(["thermal", "--T", "-5"], capsys)
    assert code == 1
    assert "temperature" in err


def test_internal_streak_config_error(capsys):
    code, _, err = run_cli(["streak", "--mode", "internal", "--n", "4",
                            "--L", "2"], capsys)
    assert code == 1
    assert "source spin" in err


def test_outdir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPINLEDGER_OUTDIR", str(tmp_path))
    code = main(["thermal", "--output", "t.csv"])
    capsys.readouterr()
    assert code == 0
    assert (tmp_path / "t.csv").exists()
