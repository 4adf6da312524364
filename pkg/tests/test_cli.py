"""End-to-end tests of the command-line interface.

Commands run in process through main(argv); one test drives the
installed console script to cover the packaging entry point.
"""

import json
import subprocess
import sys

import pytest

from oadecouple.cli import main, read_experiment_config
from oadecouple.oa import builtin_array, to_text
from oadecouple.protocols import read_csv
from oadecouple.schemes import load_text

BENCH_CONFIG = """\
[hamiltonian]
qubits = 3
kind = sparse
terms = 6
seed = 2

[scheme]
array = 16.5.4.2
columns = 0,1,2

[run]
blocks = 1,2
states = 2
time = 0.5
seed = 3
variants = det-first,det-second
"""

CONTROLIZE_CONFIG = """\
[hamiltonian]
qubits = 2
kind = sparse
terms = 4
seed = 5

[scheme]
array = 16.5.4.2
columns = 0,1

[run]
blocks = 2,4
time = 0.5
"""


# ---------------------------------------------------------------- oa


def test_version_flag():
    assert main(["--version"]) == 0


def test_oa_construct_writes_file(tmp_path, capsys):
    out = tmp_path / "arr.txt"
    assert main(["oa", "construct", "--s", "4", "--ell", "2", "--out", str(out)]) == 0
    assert out.read_text().startswith("# OA(16, 5, 4, 2)")
    captured = capsys.readouterr()
    assert "OK strength 2, lambda 1" in captured.out


def test_oa_construct_rejects_non_prime_power(capsys):
    assert main(["oa", "construct", "--s", "6", "--ell", "2"]) == 4


def test_oa_verify_good_file(tmp_path, capsys):
    path = tmp_path / "arr.txt"
    path.write_text(to_text(builtin_array("16.5.4.2")))
    assert main(["oa", "verify", "--file", str(path), "--s", "4", "--t", "2"]) == 0
    assert "OK strength 2" in capsys.readouterr().out


def test_oa_verify_mutated_file_fails(tmp_path, capsys):
    arr = builtin_array("16.5.4.2")
    entries = arr.entries.copy()
    entries[3, 2] = 1 + (entries[3, 2] % 4)
    lines = [" ".join(map(str, row)) for row in entries]
    path = tmp_path / "bad.txt"
    path.write_text("\n".join(lines) + "\n")
    assert main(["oa", "verify", "--file", str(path), "--s", "4", "--t", "2"]) == 4


def test_oa_verify_missing_file():
    assert main(["oa", "verify", "--file", "/nonexistent/x.txt", "--s", "4", "--t", "2"]) == 3


def test_oa_restrict(tmp_path, capsys):
    src = tmp_path / "arr.txt"
    src.write_text(to_text(builtin_array("16.5.4.2")))
    out = tmp_path / "sub.txt"
    code = main(
        [
            "oa", "restrict",
            "--file", str(src),
            "--s", "4", "--t", "2",
            "--columns", "0,2,4",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert "OA(16, 3, 4, 2)" in out.read_text()


def test_oa_builtin_name_accepted(capsys):
    assert main(["oa", "verify", "--file", "32.9.4.2", "--s", "4", "--t", "2"]) == 0
    assert "OK strength 2, lambda 2" in capsys.readouterr().out


# ---------------------------------------------------------------- scheme


def test_scheme_pipeline(tmp_path, capsys):
    compiled = tmp_path / "scheme.txt"
    code = main(
        ["scheme", "compile", "--oa", "16.5.4.2", "--columns", "0,1,2,3", "--out", str(compiled)]
    )
    assert code == 0
    scheme = load_text(compiled.read_text())
    assert scheme.n == 4 and len(scheme) == 16

    controlled = tmp_path / "ctrl.txt"
    assert main(["scheme", "controlize", "--scheme", str(compiled), "--out", str(controlled)]) == 0
    assert load_text(controlled.read_text()).kind == "controlization"

    reversed_ = tmp_path / "rev.txt"
    assert main(["scheme", "reverse", "--scheme", str(compiled), "--out", str(reversed_)]) == 0
    rev = load_text(reversed_.read_text())
    assert rev.kind == "time_reversal"
    assert len(rev) == 15

    assert main(["scheme", "weights", "--scheme", str(compiled)]) == 0
    out = capsys.readouterr().out
    assert "max=" in out and "pulse weights:" in out

    pulses = tmp_path / "pulses.txt"
    assert main(["scheme", "export", "--scheme", str(compiled), "--out", str(pulses)]) == 0
    text = pulses.read_text()
    assert text.startswith("# interleaving pulses")
    assert "pulses=17" in text


def test_scheme_compile_to_stdout(capsys):
    assert main(["scheme", "compile", "--oa", "16.5.4.2"]) == 0
    out = capsys.readouterr().out
    assert "kind=decoupling steps=16 n=5 d=2" in out


def test_scheme_reverse_rejects_schemes_without_identity(tmp_path):
    bad = tmp_path / "s.txt"
    bad.write_text("kind=simulation steps=2 n=1 d=2\n0.5 X1\n0.5 Z1\n")
    assert main(["scheme", "reverse", "--scheme", str(bad)]) == 4


def test_scheme_load_parse_error(tmp_path):
    bad = tmp_path / "s.txt"
    bad.write_text("not a scheme\n")
    assert main(["scheme", "weights", "--scheme", str(bad)]) == 3


# ---------------------------------------------------------------- bench


def test_bench_decouple(tmp_path, capsys):
    config = tmp_path / "exp.ini"
    config.write_text(BENCH_CONFIG)
    out = tmp_path / "results.csv"
    assert main(["bench", "decouple", "--config", str(config), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 2 * 2 * 2
    assert {r.scheme for r in rows} == {"det-first", "det-second"}
    manifest = json.loads((tmp_path / "results.manifest.json").read_text())
    assert manifest["tool"] == "oadecouple"
    assert manifest["config_dialect"] == "ini-v1"
    assert manifest["rows"] == len(rows)
    assert manifest["master_seed"] == 3
    assert manifest["config"]["hamiltonian"]["qubits"] == "3"


def test_bench_decouple_deterministic_modulo_seconds(tmp_path):
    config = tmp_path / "exp.ini"
    config.write_text(BENCH_CONFIG)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["bench", "decouple", "--config", str(config), "--out", str(out1)]) == 0
    assert main(["bench", "decouple", "--config", str(config), "--out", str(out2)]) == 0
    rows1 = read_csv(out1)
    rows2 = read_csv(out2)
    strip = lambda r: (r.scheme, r.order, r.randomized, r.qdrift_mode, r.blocks,
                       r.state_id, r.instance_reps, r.metric, r.value)
    assert [strip(r) for r in rows1] == [strip(r) for r in rows2]


def test_bench_controlize(tmp_path, capsys):
    config = tmp_path / "exp.ini"
    config.write_text(CONTROLIZE_CONFIG)
    out = tmp_path / "ctrl.csv"
    assert main(["bench", "controlize", "--config", str(config), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 4
    assert all(r.metric == "operator_error" for r in rows)
    assert (tmp_path / "ctrl.manifest.json").exists()


def test_bench_empty_blocks_is_usage_error(tmp_path):
    config = tmp_path / "exp.ini"
    config.write_text(BENCH_CONFIG.replace("blocks = 1,2", "blocks ="))
    assert main(["bench", "decouple", "--config", str(config), "--out", "/tmp/x.csv"]) == 2


def test_bench_bad_configs(tmp_path):
    config = tmp_path / "exp.ini"
    config.write_text("[run]\nblocks = 1\n")
    assert main(["bench", "decouple", "--config", str(config), "--out", "/tmp/x.csv"]) == 3
    config.write_text(BENCH_CONFIG.replace("det-first,det-second", "det-third"))
    assert main(["bench", "decouple", "--config", str(config), "--out", "/tmp/x.csv"]) == 3
    config.write_text("not an ini file [[[\n")
    assert main(["bench", "decouple", "--config", str(config), "--out", "/tmp/x.csv"]) == 3
    assert main(["bench", "decouple", "--config", "/nonexistent.ini", "--out", "/tmp/x.csv"]) == 3


def test_bench_guard_failures_exit_4(tmp_path):
    config = tmp_path / "exp.ini"
    config.write_text(BENCH_CONFIG.replace("columns = 0,1,2", "columns = 0,1"))
    assert main(["bench", "decouple", "--config", str(config), "--out", "/tmp/x.csv"]) == 4


def test_read_experiment_config_defaults(tmp_path):
    config = tmp_path / "min.ini"
    config.write_text("[hamiltonian]\nqubits = 8\n")
    cfg = read_experiment_config(str(config))
    assert cfg.n_qubits == 8
    assert cfg.oa_name == "32.9.4.2"
    assert cfg.block_counts == (1, 2, 4, 8, 16, 32, 64)
    assert cfg.n_states == 10
    assert cfg.total_time == 1.0
    assert cfg.master_seed == 7
    assert len(cfg.variants) == 6
    det_only = read_experiment_config(str(config), deterministic_only=True)
    assert [v.label for v in det_only.variants] == ["det-first", "det-second"]


# ---------------------------------------------------------------- color


def test_color_chain(capsys):
    assert main(["color", "--chain", "16"]) == 0
    out = capsys.readouterr().out
    assert "count: 2" in out
    assert "needs 2 array columns" in out


def test_color_complete(capsys):
    assert main(["color", "--complete", "5"]) == 0
    assert "count: 5" in capsys.readouterr().out


def test_color_grid(capsys):
    assert main(["color", "--grid", "3x4", "--seed", "1"]) == 0
    assert "count: 2" in capsys.readouterr().out


def test_color_from_file(tmp_path, capsys):
    from oadecouple.hamiltonian import random_chain, to_text as ham_to_text

    path = tmp_path / "h.txt"
    path.write_text(ham_to_text(random_chain(6, 0)))
    assert main(["color", "--file", str(path)]) == 0
    assert "count: 2" in capsys.readouterr().out


def test_color_requires_exactly_one_source(capsys):
    assert main(["color"]) == 2
    assert main(["color", "--chain", "4", "--complete", "3"]) == 2


def test_color_bad_grid_shape():
    assert main(["color", "--grid", "4by5"]) == 2


# ---------------------------------------------------------------- estimate


def test_estimate(capsys):
    code = main(
        ["estimate", "--runs", "16", "--time", "1", "--norm", "1",
         "--eps", "0.01", "--order", "first"]
    )
    assert code == 0
    assert "trotter_steps=100 controlled_ops=1600" in capsys.readouterr().out


def test_estimate_second_order(capsys):
    code = main(
        ["estimate", "--runs", "16", "--time", "1", "--norm", "1",
         "--eps", "0.01", "--order", "second"]
    )
    assert code == 0
    assert "trotter_steps=10 controlled_ops=320" in capsys.readouterr().out


def test_estimate_bad_eps_exits_4():
    assert main(
        ["estimate", "--runs", "1", "--time", "1", "--norm", "1",
         "--eps", "0", "--order", "first"]
    ) == 4


# ---------------------------------------------------------------- misc


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 2


def test_missing_required_option_is_usage_error():
    assert main(["oa", "verify", "--s", "4", "--t", "2"]) == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "oadecouple.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip()
