import csv
import json
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from helmloc import __version__
from helmloc.cli import ConfigError, main, parse_config
from helmloc.multiplier import sample, write_grid_function


def write(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return path


def run(tmp_path, body, *extra, name="exp.ini"):
    cfg = write(tmp_path, name, body)
    out = tmp_path / ("out_" + cfg.stem)
    status = main(["--config", str(cfg), "--out", str(out), *extra])
    summary = json.loads((out / "summary.json").read_text()) if (out / "summary.json").exists() else None
    return status, summary, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


CHECK_SYMBOL = """
    [experiment]
    command = check-symbol
    d = 3

    [symbol]
    name = power
    s = 0.5
"""


def test_check_symbol(tmp_path):
    status, summary, out = run(tmp_path, CHECK_SYMBOL)
    assert status == 0 and summary["pass"]
    assert [c["name"] for c in summary["checks"]] == ["growth", "singularity", "univalence"]
    assert summary["report"]["passed"] is True
    assert summary["tool"] == "helmloc" and summary["version"] == __version__
    assert summary["config"]["symbol"] == {"name": "power", "s": 0.5}
    assert summary["seed"] == 0
    rows = read_csv(out / "conditions.csv")
    assert rows[0] == ["quantity", "order", "value"]
    assert len(rows) == 1 + 4 + 5


def test_check_symbol_failure_has_witnesses(tmp_path):
    status, summary, _ = run(tmp_path, """
        [experiment]
        command = check-symbol
        [symbol]
        name = custom
        expr = (z - 2)**2
        holomorphic = true
    """)
    assert status == 1
    univalence = next(c for c in summary["checks"] if c["name"] == "univalence")
    assert not univalence["pass"] and univalence["witnesses"]


def test_residual_threshold_failure(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = residual
        d = 1
        [symbol]
        name = power
        s = 0.5
        [options]
        u = cos(2*x1)
    """, "--threshold", "1e-10")
    assert status == 1
    check = summary["checks"][0]
    assert check["metrics"]["observed"] == pytest.approx(1.0, rel=1e-12)
    assert summary["threshold"] == 1e-10
    assert read_csv(out / "residual.csv")[0] == ["label", "residual_l2", "residual_linf", "relative_l2",
                                                "per_mode_bound"]


def test_residual_from_container(tmp_path):
    gf = sample(lambda x, y: np.cos(x) + np.sin(y), (8, 8), (2 * np.pi, 2 * np.pi))
    write_grid_function(gf, tmp_path / "u.bin")
    status, summary, _ = run(tmp_path, f"""
        [experiment]
        command = residual
        d = 2
        [symbol]
        name = relativistic
        s = 1
        m = 1
        [options]
        grid = "{tmp_path / 'u.bin'}"
        j0 = 1
    """)
    assert status == 0
    assert [c["name"] for c in summary["checks"]] == ["helmholtz_residual", "polyharmonic_residual"]


def test_bessel_table(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = bessel-table
        [options]
        nu = 0
        K = 2
        lambdas = [10, 20, 40, 80]
    """)
    assert status == 0
    rows = read_csv(out / "bessel_table.csv")
    assert rows[0] == ["lambda", "reference", "expansion", "error", "amplitude", "scaled_amplitude"]
    assert len(rows) == 5
    amp = [float(r[4]) for r in rows[1:]]
    assert all(b < a for a, b in zip(amp, amp[1:]))
    # the scaled amplitude tends to sqrt(2/pi)|a3| from below, so it is not decreasing
    scaled = [float(r[5]) for r in rows[1:]]
    assert max(scaled) / min(scaled) < 1.05


def test_bessel_table_sphere(tmp_path):
    status, summary, _ = run(tmp_path, """
        [experiment]
        command = bessel-table
        d = 2
        [options]
        target = sphere
        K = 1
        lambdas = [10, 20, 40, 80, 160]
    """)
    assert status == 0
    assert summary["checks"][0]["metrics"]["predicted_decay"] == -2.5


def test_kernel_norm(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = kernel-norm
        d = 3
        [symbol]
        name = power
        s = 0.5
    """)
    assert status == 0
    m = summary["checks"][0]["metrics"]
    assert m["converged"] and m["relative_change"] < 0.1
    assert read_csv(out / "kernel_profile.csv")[0] == ["r", "beta1", "shell_contribution", "cumulative_l1"]


def test_kernel_norm_infinite_rhs(tmp_path):
    status, summary, _ = run(tmp_path, """
        [experiment]
        command = kernel-norm
        d = 1
        [symbol]
        name = coth_dn
    """)
    assert status == 1
    check = summary["checks"][0]
    assert check["metrics"]["rhs"] == "inf"
    assert check["witnesses"][0]["tag"] == "b:divergent"


def test_localize(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = localize
        d = 1
        seed = 4
        [symbol]
        name = power
        s = 0.5
        [options]
        u = cos(2*x1) + cos(3*x1)
    """)
    assert status == 0
    assert [c["name"] for c in summary["checks"]] == ["forward", "contrapositive", "support_profile"]
    assert summary["seed"] == 4


def test_localize_precondition_violation(tmp_path):
    status, summary, _ = run(tmp_path, """
        [experiment]
        command = localize
        [symbol]
        name = power
        s = 0.5
        [options]
        u = cos(x1) + cos(3*x1)
    """)
    assert status == 1
    contra = summary["checks"][1]
    assert contra["witnesses"][0]["tag"] == "precondition"


def test_j0_check(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = j0-check
        [symbol]
        name = exp_bump
    """)
    assert status == 0
    m = summary["checks"][0]["metrics"]
    assert m["j0"] == 2 and m["limit_at_one"] == pytest.approx(-2, rel=1e-5)
    assert read_csv(out / "quotient.csv")[0] == ["t", "q"]


def test_bernstein_verify(tmp_path):
    status, summary, out = run(tmp_path, """
        [experiment]
        command = bernstein-verify
        d = 2
        [symbol]
        name = bernstein
        c2 = 0.5
        atoms = [[1, 1], [3, 2]]
    """)
    assert status == 0
    assert [c["name"] for c in summary["checks"]] == ["derivative_identity", "derivative_bound",
                                                      "nondegeneracy", "conditions"]
    assert read_csv(out / "bernstein.csv")[0] == ["lambda", "phi", "dphi", "lambda_dphi"]


def test_bernstein_with_c1_fails_conditions(tmp_path):
    status, summary, _ = run(tmp_path, """
        [experiment]
        command = bernstein-verify
        [symbol]
        name = bernstein
        c1 = 0.5
        c2 = 1
    """)
    assert status == 1
    assert not summary["checks"][-1]["pass"]


# -- determinism -------------------------------------------------------------

@pytest.mark.parametrize("body", [CHECK_SYMBOL, """
    [experiment]
    command = localize
    d = 2
    seed = 17
    [symbol]
    name = tanh_dn
    [options]
    n_modes = 4
    box_multiple = 2
"""])
def test_byte_identical_json(tmp_path, body):
    _, _, out1 = run(tmp_path, body, name="a.ini")
    _, _, out2 = run(tmp_path, body, name="b.ini")
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_seed_override_is_echoed(tmp_path):
    _, summary, _ = run(tmp_path, CHECK_SYMBOL, "--seed", "99")
    assert summary["seed"] == 99 and summary["config"]["seed"] == 99


# -- configuration errors ----------------------------------------------------

@pytest.mark.parametrize("body,needle", [
    ("[symbol]\nname = power\n", "experiment"),
    ("[experiment]\ncommand = fly\n", "command"),
    ("[experiment]\ncommand = residual\nd = 0\n[symbol]\nname = power\ns = 1\n", "d must"),
    ("[experiment]\ncommand = check-symbol\n", "symbol"),
    ("[experiment]\ncommand = check-symbol\n[symbol]\nname = power\n", "'s'"),
    ("[experiment]\ncommand = check-symbol\n[symbol]\nname = custom\nexpr = __import__('os')\n", "unknown name"),
    ("[experiment]\ncommand = residual\n[symbol]\nname = power\ns = 1\n[options]\nu = cos(x1)\nshape = [7]\n",
     "even"),
    ("[experiment\ncommand = residual\n", ""),
    ("[experiment]\ncommand = bessel-table\n[options]\nk = 3\n", "unknown key 'k'"),
    ("[experiment]\ncommand = bessel-table\n[extras]\na = 1\n", "unknown section"),
    ("[experiment]\ncommand = bernstein-verify\n[symbol]\nname = bernstein\natoms = [[1, -1]]\n", "atom"),
])
def test_config_errors_exit_two(tmp_path, capsys, body, needle):
    path = tmp_path / "bad.ini"
    path.write_text(body)
    assert main(["--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert needle in capsys.readouterr().err


def test_parse_config_values():
    cfg = parse_config("[experiment]\ncommand = bessel-table\n[options]\nlambdas = [10, 20]\nK = 3\ntarget = sphere\n")
    assert cfg.options == {"lambdas": [10, 20], "K": 3, "target": "sphere"}
    cfg = parse_config("[experiment]\ncommand = residual\n[symbol]\nname = power\nholomorphic = yes\n")
    assert cfg.symbol["holomorphic"] is True
    with pytest.raises(ConfigError):
        parse_config("[experiment]\ncommand = check-symbol\nseed = 1.5\n[symbol]\nname = power\n")


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 2


# -- batch -------------------------------------------------------------------

def test_batch_mode(tmp_path):
    cfgs = tmp_path / "cfgs"
    cfgs.mkdir()
    (cfgs / "a_ok.ini").write_text(textwrap.dedent(CHECK_SYMBOL))
    (cfgs / "b_fail.ini").write_text(
        "[experiment]\ncommand = residual\n[symbol]\nname = power\ns = 0.5\n[options]\nu = cos(2*x1)\n")
    (cfgs / "c_bad.ini").write_text("[experiment]\ncommand = nothing\n")
    out = tmp_path / "out"
    status = main(["--config", str(cfgs), "--out", str(out), "--jobs", "2"])
    assert status == 2
    rows = read_csv(out / "batch_summary.csv")
    assert rows[0] == ["config", "command", "status", "message"]
    assert [(r[0], r[2]) for r in rows[1:]] == [("a_ok.ini", "0"), ("b_fail.ini", "1"), ("c_bad.ini", "2")]
    assert (out / "a_ok" / "summary.json").exists()
    assert (out / "b_fail" / "summary.json").exists()


def test_batch_parallel_matches_serial(tmp_path):
    cfgs = tmp_path / "cfgs"
    cfgs.mkdir()
    (cfgs / "one.ini").write_text(textwrap.dedent(CHECK_SYMBOL))
    (cfgs / "two.ini").write_text(
        "[experiment]\ncommand = j0-check\n[symbol]\nname = custom\nexpr = z*exp(1-z)\nholomorphic = true\n")
    main(["--config", str(cfgs), "--out", str(tmp_path / "s"), "--jobs", "1"])
    main(["--config", str(cfgs), "--out", str(tmp_path / "p"), "--jobs", "2"])
    for stem in ("one", "two"):
        assert (tmp_path / "s" / stem / "summary.json").read_bytes() == \
            (tmp_path / "p" / stem / "summary.json").read_bytes()


def test_empty_batch_directory(tmp_path):
    assert main(["--config", str(tmp_path), "--out", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "exp.ini", CHECK_SYMBOL)
    proc = subprocess.run([sys.executable, "-m", "helmloc.cli", "--config", str(cfg), "--out", str(tmp_path / "o")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "pass" in proc.stdout
