import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ipl_boltzmann.cli import main, parse_grid, parse_number
from ipl_boltzmann.homogeneous_sim import MomentRecord


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def small_config(tmp_path, **kw):
    cfg = dict(n_particles=400, exponent_s="hard_sphere", theta_min=0.0, dt=0.1, t_end=1.0,
               init="bimodal", seed=1, record_every=1)
    cfg.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_parse_pi():
    assert parse_number("pi") == math.pi
    assert parse_number("pi/4") == math.pi / 4
    assert parse_number("3*pi/4") == 3 * math.pi / 4
    assert parse_number("1e-3") == 1e-3
    g = parse_grid("1e-3:pi:200", log=True)
    assert len(g) == 200 and g[0] == 1e-3 and g[-1] == math.pi


def test_kernel_table_s3(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel-table", "--s", "3", "--theta-log", "1e-3:pi:200", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["s", "theta", "b", "weighted_b", "C_s"]
    assert len(rows) == 200
    assert float(rows[0][3]) == pytest.approx(math.pi, rel=1e-2)
    meta = json.loads((tmp_path / "k.csv.meta.json").read_text())
    assert meta["version"] and meta["parameters"]["s"] == [3.0]


def test_kernel_table_hard_sphere(tmp_path):
    out = tmp_path / "hs.csv"
    assert main(["kernel-table", "--s", "hard_sphere", "--theta-lin", "0.1:pi:10", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 10 and all(float(r[2]) == 0.25 for r in rows)


def test_kernel_table_bad_exponent(capsys):
    assert main(["kernel-table", "--s", "1.5", "--theta-lin", "0.1:pi:10"]) == 2
    assert "exponent must exceed 2" in capsys.readouterr().err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        main(["kernel-table", "--s", "3", "--theta-lin", "0.1:1:3", "--nope"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["kernel-table", "--s", "3"])
    assert info.value.code == 2


def test_bad_grid(capsys):
    assert main(["kernel-table", "--s", "3", "--theta-lin", "0:pi:5"]) == 2
    assert main(["kernel-table", "--s", "3", "--theta-lin", "a:b:c"]) == 2


def test_layer_table(tmp_path):
    out = tmp_path / "l.csv"
    assert main(["layer-table", "--psi-log", "1e-3:100:9", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["psi", "Phi", "Phi0", "xi_inf", "xi_prime"]
    consts = json.loads((tmp_path / "l.csv.constants.json").read_text())
    assert consts["xi_prime_0"]["value"] == pytest.approx(math.sqrt(2 / math.pi), abs=1e-5)
    assert set(consts) >= {"xi_prime_0", "f0", "fprime0", "psi_prime_inf_0"}
    last = [float(x) for x in rows[-1]]
    assert last[0] == 100.0 and last[1] == pytest.approx(0.25, rel=0.02)
    first = [float(x) for x in rows[0]]
    psi = first[0]
    assert abs(first[1] - 1 / psi ** 2 - 1 / (math.sqrt(math.pi) * psi)) <= abs(first[2]) + 0.1


def test_scattering_curve(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["scattering-curve", "--s", "3", "--beta-lin", "0:20:41", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["beta", "x", "phi", "theta", "residual"]
    data = np.array(rows, dtype=float)
    beta, theta = data[:, 0], data[:, 3]
    np.testing.assert_allclose(theta, math.pi * (1 - beta / np.sqrt(1 + beta ** 2)), atol=1e-6)
    assert theta[0] == math.pi
    assert np.all(np.abs(data[:, 4]) <= 1e-10)
    assert np.all(np.diff(data[:, 1]) > 0) and np.all(np.diff(theta) < 0)


def test_simulate_deterministic_and_conservative(tmp_path):
    cfg = small_config(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rec = MomentRecord.from_csv(a.read_text())
    assert np.max(np.abs(rec.M2 / rec.M2[0] - 1)) < 1e-9
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["seed"] == 1


def test_simulate_errors(tmp_path, capsys):
    cfg = small_config(tmp_path, exponent_s=7, theta_min=0)
    assert main(["simulate", "--config", cfg]) == 2
    assert "grazing cutoff required for finite s" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_particles": 10}')
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2


def test_compare_small(tmp_path):
    cfg = small_config(tmp_path, theta_min=0.01)
    out = tmp_path / "cmp.json"
    assert main(["compare", "--s", "7,40", "--config", cfg, "--seeds", "8", "--bootstrap", "50",
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [r["s"] for r in rep["rows"]] == [7.0, 40.0]
    assert isinstance(rep["monotone_decreasing"], bool)
    assert main(["compare", "--s", "40", "--config", cfg, "--seeds", "8", "--bootstrap", "20",
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert len(rep["rows"]) == 1 and "monotone_decreasing" not in rep


def test_compare_rejections(tmp_path):
    cfg = small_config(tmp_path, theta_min=0.01)
    assert main(["compare", "--s", "7,4", "--config", cfg]) == 2
    assert main(["compare", "--s", "7", "--config", cfg, "--seeds", "4"]) == 2


def test_verify(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["entries"]["C_3"]["measured"] == pytest.approx(math.pi, rel=1e-10)
    assert rep["entries"]["psi_prime_inf_0"]["target"] == pytest.approx(math.sqrt(math.pi / 2))
    for e in rep["entries"].values():
        assert {"measured", "target", "tol", "passed"} <= set(e)


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    r = subprocess.run([sys.executable, "-m", "ipl_boltzmann", "kernel-table", "--s", "5",
                        "--theta-lin", "pi/4:3*pi/4:3", "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    _, rows = read_csv(out)
    assert float(rows[0][1]) == pytest.approx(math.pi / 4)


def test_idempotent_tables(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["kernel-table", "--s", "7,hard_sphere", "--theta-lin", "0.5:pi:5", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_numerical_failure_exit_code(monkeypatch, capsys):
    import ipl_boltzmann.cli as cli
    from ipl_boltzmann.errors import NonConvergence

    def boom(*a, **k):
        raise NonConvergence("quadrature did not converge")

    monkeypatch.setattr(cli, "evaluate_angular_kernel", boom)
    assert main(["kernel-table", "--s", "7", "--theta-lin", "0.1:1:3"]) == 3
    assert "numerical failure" in capsys.readouterr().err
