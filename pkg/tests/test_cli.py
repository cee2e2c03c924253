import csv
import io
import math

import numpy as np
import pytest

from fdeform.cli import main
from fdeform.config import ConfigError, parse_config

SELF_COLLISION = """
deformation: {kind: self_collision, kappa: 0.25}
alpha_sq: 1.0
time: {t_start: 0.0, t_end: %r, n_steps: 9}
""" % (4 * math.pi)

CROSS = """
deformation: {kind: cross_collision, kappa: 0.1}
alpha_sq: 1.0
time: {t_start: 0, t_end: 10, n_steps: 11}
"""

IDENTITY = """
deformation: {kind: identity}
alpha_sq: 1.0
time: {t_start: 0, t_end: 0, n_steps: 1}
intensity: {deltas: [0.0, %r, %r]}
""" % (math.pi / 2, math.pi)


@pytest.fixture
def run(tmp_path):
    def _run(config_text, *args):
        cfg = tmp_path / "scenario.yaml"
        cfg.write_text(config_text)
        out = tmp_path / "out.csv"
        code = main([args[0], "--config", str(cfg), "--out", str(out), *args[1:]])
        text = out.read_text() if out.exists() else ""
        if out.exists():
            out.unlink()
        return code, text
    return _run


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_visibility_cross_collision(run):
    code, text = run(CROSS, "visibility")
    assert code == 0
    assert text.splitlines()[0] == "t,v_re,v_im,v_abs,v_arg,trunc_bound"
    data = rows(text)
    assert len(data) == 11
    for r in data:
        assert abs(float(r["v_abs"]) - 1) <= float(r["trunc_bound"])


def test_visibility_identity(run):
    code, text = run(IDENTITY.replace("t_end: 0, n_steps: 1", "t_end: 5, n_steps: 6"), "visibility")
    assert code == 0
    assert all(abs(float(r["v_abs"]) - 1) < 1e-11 for r in rows(text))


def test_visibility_self_collision_collapse(run):
    code, text = run(SELF_COLLISION, "visibility")
    assert code == 0
    data = rows(text)
    mid = data[4]
    assert float(mid["t"]) == pytest.approx(2 * math.pi, abs=1e-15)
    assert float(mid["v_abs"]) == pytest.approx(math.exp(-4), abs=1e-8)


def test_intensity_identity(run):
    code, text = run(IDENTITY, "intensity")
    assert code == 0
    assert text.splitlines()[0] == "t,delta,intensity"
    values = [float(r["intensity"]) for r in rows(text)]
    assert values == pytest.approx([4.0, 2.0, 0.0], abs=1e-10)


def test_intensity_vacuum(run):
    code, text = run(IDENTITY.replace("alpha_sq: 1.0", "alpha_sq: 0.0"), "intensity")
    assert code == 0
    assert all(float(r["intensity"]) == 0.0 for r in rows(text))


def test_intensity_self_collision_collapse(run):
    cfg = SELF_COLLISION.replace("t_start: 0.0", "t_start: %r" % (2 * math.pi)).replace(
        "n_steps: 9", "n_steps: 1").replace("t_end: %r" % (4 * math.pi), "t_end: %r" % (2 * math.pi))
    code, text = run(cfg, "intensity", "--deltas", "0,%r" % math.pi)
    assert code == 0
    values = [float(r["intensity"]) for r in rows(text)]
    assert values == pytest.approx([2 * (1 + math.exp(-4)), 2 * (1 - math.exp(-4))], abs=1e-10)


def test_fringe(run):
    code, text = run(SELF_COLLISION, "fringe", "--points", "4096")
    assert code == 0
    for r in rows(text):
        assert abs(float(r["v_op"]) - float(r["v_abs"])) <= 1e-6


def test_revivals_self_collision(run):
    cfg = SELF_COLLISION.replace("n_steps: 9", "n_steps: 2001").replace(
        "t_end: %r" % (4 * math.pi), "t_end: %r" % (16 * math.pi))
    code, text = run(cfg, "revivals")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "revival_time"
    i = lines.index("collapse_floor,period,time_independent_flag")
    floor, period, flag = lines[i + 1].split(",")
    assert float(period) == pytest.approx(4 * math.pi, abs=16 * math.pi / 2000)
    assert float(floor) == pytest.approx(math.exp(-4), abs=1e-6)
    assert flag == "0"


@pytest.mark.parametrize("cfg", [CROSS, IDENTITY.replace("t_end: 0, n_steps: 1", "t_end: 9, n_steps: 10")])
def test_revivals_time_independent(run, cfg):
    code, text = run(cfg, "revivals")
    assert code == 0
    floor, period, flag = text.splitlines()[-1].split(",")
    assert flag == "1" and period == ""


@pytest.mark.parametrize("cfg", [SELF_COLLISION, CROSS,
                                 SELF_COLLISION.replace("self_collision, kappa: 0.25",
                                                        "q_oscillator, lambda: 0.3")])
def test_oracle_check_builtin(run, cfg):
    assert run(cfg, "oracle-check")[0] == 0


def test_oracle_check_custom_table(run):
    rng = np.random.default_rng(3)
    m = rng.uniform(0.5, 1.5, (30, 30))
    m = (m + m.T) / 2
    cfg = ("deformation:\n  symmetric: true\n  table: %s\nalpha_sq: 1.0\n"
           "time: {t_start: 0, t_end: 20, n_steps: 5}\n") % m.tolist()
    code, text = run(cfg, "oracle-check")
    assert code == 0, text


def test_oracle_check_detects_injected_fault(run):
    assert run(SELF_COLLISION, "oracle-check", "--inject-fault")[0] == 5


def test_csv_is_byte_identical(run):
    first = run(SELF_COLLISION, "visibility")[1]
    second = run(SELF_COLLISION, "visibility")[1]
    assert first == second and first.endswith("\n") and "\r" not in first


def test_exit_codes(run):
    assert run("alpha_sq: [1\n", "visibility")[0] == 2
    assert run(CROSS.replace("n_steps: 11", "n_steps: 0"), "visibility")[0] == 2
    assert run(CROSS.replace("kappa: 0.1", "kappa: 2.0").replace("cross", "self"), "visibility")[0] == 2
    assert run(CROSS + "truncation: {n_cap: 2}\n", "visibility")[0] == 3
    asym = ("deformation:\n  table: %s\nalpha_sq: 1.0\ntime: {t_start: 0, t_end: 1, n_steps: 2}\n"
            % [[1.0 + 0.1 * a for b in range(30)] for a in range(30)])
    assert run(asym, "visibility")[0] == 4
    assert run(asym, "visibility", "--allow-asymmetric")[0] == 0
    assert run(asym, "intensity")[0] == 0
    big = CROSS.replace("alpha_sq: 1.0", "alpha_sq: 400.0")
    assert run(big, "oracle-check")[0] == 3


def test_epsilon_flag(run):
    code, text = run(CROSS, "visibility", "--epsilon", "1e-6")
    assert code == 0
    assert float(rows(text)[0]["trunc_bound"]) > 1e-8
    assert run(CROSS, "visibility", "--epsilon", "2")[0] == 2


def test_stdout_output(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(CROSS)
    assert main(["visibility", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("t,v_re")


def test_config_diagnostics_name_field_and_line():
    with pytest.raises(ConfigError, match=r"time.n_steps \(line 4\)"):
        parse_config(CROSS.replace("n_steps: 11", "n_steps: -1"))
    with pytest.raises(ConfigError, match="deformation.kapa"):
        parse_config(CROSS.replace("kappa", "kapa"))
    with pytest.raises(ConfigError, match="alpha_sq"):
        parse_config("deformation: {kind: identity}\ntime: {t_start: 0, t_end: 1, n_steps: 2}\n")


def test_config_accepts_yaml11_exponents():
    cfg = parse_config(CROSS + "truncation: {epsilon: 1e-10}\n")
    assert cfg.epsilon == 1e-10
    assert cfg.deformation.kappa == 0.1
