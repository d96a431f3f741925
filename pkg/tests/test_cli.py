from __future__ import annotations

import json

import numpy as np
import pytest

from eulermix.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, InputError, generate, main, parse_args
from eulermix.graph import gen_directed_cycle, validate, write_graph


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_defaults_and_aliases():
    cfg = parse_args(["mix", "--gen", "cycle:n=5", "--csv", "x.csv"])
    assert (cfg.seed, cfg.workers, cfg.format, cfg.out) == (0, 1, "csv", "x.csv")
    assert cfg.options["eps"] == 0.25 and cfg.options["metric"] == "both"
    cfg = parse_args(["gadget", "--n", "8,12", "--alpha", "golden,0.5", "--seed", "3"])
    assert cfg.options["n"] == [8, 12] and cfg.options["mode"] == "exact" and cfg.seed == 3
    assert cfg.options["alpha"][1] == 0.5
    assert cfg.echo()["subcommand"] == "gadget"


@pytest.mark.parametrize(
    "argv",
    [
        ["mix", "--gen", "cycle:n=5", "--eps", "2.0"],
        ["mix", "--gen", "cycle:n=5", "--eps", "0"],
        ["mix"],
        ["gen", "bogus:n=3"],
        ["gen", "cycle:size=3"],
        ["gadget", "--n", "10"],
        ["dioph", "--xi", "1.5", "--n", "10"],
        ["hit", "--gen", "cycle:n=5", "--matrix", "--replicas", "0"],
        ["hit", "--gen", "cycle:n=5", "--collide", "traj=WARP"],
        ["validate"],
    ],
)
def test_invalid_input_exit_code(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_INPUT


def test_corrupt_and_non_eulerian_files(tmp_path, capsys):
    bad = tmp_path / "bad.eul"
    bad.write_text("this is not a graph\n")
    assert run(["mix", "--graph", str(bad)], capsys)[0] == EXIT_INPUT
    assert run(["mix", "--graph", str(tmp_path / "missing.eul")], capsys)[0] == EXIT_INPUT


def test_generate():
    g, hold = generate("circulant:n=9,jumps=1/3")
    assert g.n == 9 and hold is None and validate(g).regular_degree == 2
    g, hold = generate("gadget:n=8,alpha=0.3")
    assert g.n == 15 and hold.min() == pytest.approx(0.3)
    with pytest.raises(InputError):
        generate("torus:rows=3")


def test_gen_then_validate(tmp_path, capsys):
    code, text, _ = run(["gen", "random:n=7,m=20,seed=2"], capsys)
    assert code == EXIT_OK
    path = tmp_path / "g.eul"
    path.write_text(text)
    code, out, err = run(["validate", str(path), "--gen", "lollipop:n=9"], capsys)
    assert code == EXIT_OK and out.splitlines()[0].startswith("source,n,m,eulerian")
    assert "PASS connected Eulerian" in err


def test_gen_corpus(tmp_path, capsys):
    code, out, _ = run(["gen", "--corpus", str(tmp_path)], capsys)
    assert code == EXIT_OK and (tmp_path / "regular").is_dir() and out.count(".eul") > 50


def test_mix_from_file_and_dump(tmp_path, capsys):
    path = tmp_path / "c.eul"
    write_graph(path, gen_directed_cycle(6))
    dump = tmp_path / "P.txt"
    code, out, _ = run(["mix", "--graph", str(path), "--dump-kernel", str(dump)], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "metric,epsilon,t,cap,c_fit"
    P = np.loadtxt(dump)
    assert P.shape == (6, 6) and np.allclose(P.sum(axis=1), 1)


def test_submult_audit_reports_tv_failure(capsys):
    code, _, err = run(["mix", "--gen", "cycle:n=3", "--submult", "40", "--seed", "1"], capsys)
    assert code == EXIT_VIOLATION
    assert "FAIL" in err and "PASS" in err


def test_same_seed_same_bytes(capsys):
    argv = ["hit", "--gen", "random:n=8,m=24,seed=3", "--cover", "--replicas", "2500", "--seed", "4"]
    a = run(argv, capsys)[1]
    b = run(argv + ["--workers", "2"], capsys)[1]
    assert a == b and a.count("\n") >= 2


def test_json_output(capsys):
    code, out, _ = run(["dioph", "--n", "10,100,1000", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["schema_version"] >= 1
    assert [r["n"] for r in doc["rows"]] == [10, 100, 1000]
    assert all(v["passed"] for v in doc["verdicts"])


def test_gadget_columns(capsys):
    code, out, err = run(["gadget", "--n", "8,12,16", "--alpha", "golden"], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n,alpha,t_mix,t_unif,fitted_exponent"
    assert len(out.splitlines()) == 4 and "PASS t_mix <= t_unif" in err


def test_gadget_return_profile(capsys):
    code, out, _ = run(["gadget", "--n", "8", "--alpha", "0.5", "--times", "0,10"], capsys)
    rows = out.splitlines()
    assert code == EXIT_OK and rows[0] == "n,alpha,t,p_return,n_p_return"
    assert rows[1].split(",")[3] == "1.0"


@pytest.mark.parametrize(
    "extra",
    [
        ["--matrix"],
        ["--audit"],
        ["--collide", "traj=STATIC:3", "--replicas", "500"],
        ["--collide", "traj=ADVERSARIAL", "--replicas", "500"],
    ],
)
def test_hit_modes(extra, capsys):
    code, out, _ = run(["hit", "--gen", "torus:rows=3,cols=3", "--holding", "0"] + extra, capsys)
    assert code == EXIT_OK and len(out.splitlines()) >= 2


def test_spectral_and_explore(tmp_path, capsys):
    code, out, _ = run(["spectral", "--gen", "cycle:n=6", "--profile", "--gmt-a", "0.25,0.125"], capsys)
    assert code == EXIT_OK and out
    lab = tmp_path / "lab.txt"
    code, out, _ = run(
        ["explore", "--gen", "regular:n=12,d=2,seed=1", "--holding", "0", "--k", "1,6,12",
         "--replicas", "500", "--dump-labelling", str(lab)],
        capsys,
    )
    assert code == EXIT_OK and sorted(int(x) for x in lab.read_text().split()) == list(range(12))


def test_audit_all_quick(capsys):
    code, out, err = run(["audit-all", "--quick"], capsys)
    assert code == EXIT_OK
    assert out.startswith("family,graph,bound,checked,violations,worst_ratio")
    assert "FAIL" not in err


def test_log_factor_preset(capsys):
    code, out, _ = run(["hit", "--gen", "random:n=10,seed=2", "--log-factor", "1,4", "--replicas", "300"], capsys)
    rows = out.splitlines()
    assert code == EXIT_OK and len(rows) == 3 and rows[0].endswith("fit_intercept,fit_log_slope")
    assert run(["hit", "--gen", "cycle:n=5", "--log-factor", "1,2"], capsys)[0] == EXIT_INPUT
