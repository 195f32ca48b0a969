from __future__ import annotations

import subprocess
import sys

import pytest
import yaml

from conftest import lots_with_prime_at_rank
from optchoice.cli import main
from optchoice.datagen import GenConfig, generate
from optchoice.serialization import load_dataset, save_dataset


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def planted(tmp_path, capsys):
    path = tmp_path / "planted.csv"
    code, _, _ = run(["gen", "--preset", "engine", "--noise", "0", "--lots", "20", "--out", path], capsys)
    assert code == 0
    return path


def test_gen_engine(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, stdout, _ = run(["gen", "--preset", "engine", "--out", out], capsys)
    assert code == 0
    assert "114 lots" in stdout
    ids = {line.split(",")[0] for line in out.read_text().splitlines()[1:]}
    assert len(ids) == 114


def test_gen_small_and_round_trip(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["gen", "--lots", 3, "--choices", 2, 2, "--dim", 1, "--seed", 7, "--out", out], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 7 and lines[0] == "lot_id,is_prime,f1"
    cfg = GenConfig(lots=3, choices_min=2, choices_max=2, dimension=1, planted_weights=(1.0,), seed=7)
    assert load_dataset(out) == generate(cfg)


def test_bruteforce_and_diagnose(planted, tmp_path, capsys):
    scorer = tmp_path / "s.txt"
    code, stdout, _ = run(["bruteforce", "--data", planted, "--n", 5, "--out", scorer], capsys)
    assert code == 0 and "success 1.0000" in stdout
    code, stdout, _ = run(["diagnose", "--data", planted, "--scorer", scorer], capsys)
    assert code == 0
    assert "success   1.0000" in stdout and "auc       1.0000" in stdout


def test_diagnose_constant_scorer(tmp_path, capsys):
    data = tmp_path / "ten.csv"
    save_dataset(generate(GenConfig(lots=12, choices_min=10, choices_max=10, seed=1)), data)
    scorer = tmp_path / "zero.txt"
    scorer.write_text("".join(f"coef f{i} 0\n" for i in range(1, 5)))
    code, stdout, _ = run(["diagnose", "--data", data, "--scorer", scorer], capsys)
    assert code == 0
    assert "accuracy  0.9000" in stdout and "success   0.0000" in stdout


def test_diagnose_second_best(tmp_path, capsys):
    data = tmp_path / "second.csv"
    save_dataset(lots_with_prime_at_rank(10, 10, 2), data)
    scorer = tmp_path / "s.txt"
    scorer.write_text("coef f1 1\n")
    code, stdout, _ = run(["diagnose", "--data", data, "--scorer", scorer], capsys)
    assert code == 0
    assert "auc       0.8889" in stdout and "success   0.0000" in stdout


def test_diagnose_schema_mismatch(planted, tmp_path, capsys):
    scorer = tmp_path / "s.txt"
    scorer.write_text("coef f1 1\ncoef zz 2\n")
    code, _, err = run(["diagnose", "--data", planted, "--scorer", scorer], capsys)
    assert code == 3
    assert "f2" in err and "zz" in err


def test_logistic_neldermead_loo_augment(planted, tmp_path, capsys):
    model = tmp_path / "m.txt"
    assert run(["logistic", "--data", planted, "--epochs", 50, "--out", model], capsys)[0] == 0
    assert model.read_text().startswith("bias ")
    assert run(["diagnose", "--data", planted, "--scorer", model], capsys)[0] == 0
    code, stdout, _ = run(["neldermead", "--data", planted, "--max-iterations", 100], capsys)
    assert code == 0 and "success" in stdout
    code, stdout, _ = run(["loo", "--data", planted, "--method", "bruteforce", "--n", 3, "--augment", "min:f1"], capsys)
    assert code == 0 and "leave-one-lot-out" in stdout
    wide = tmp_path / "wide.csv"
    assert run(["augment", "--data", planted, "--augment", "min:f1", "--augment", "max:f2", "--out", wide], capsys)[0] == 0
    assert load_dataset(wide).feature_names[-2:] == ("min.f1", "max.f2")


def test_negate_flag(tmp_path, capsys):
    data = tmp_path / "inv.csv"
    code, _, _ = run(["gen", "--preset", "engine", "--noise", "0", "--lots", 15, "--invert", "--out", data], capsys)
    assert code == 0
    _, plain, _ = run(["bruteforce", "--data", data, "--n", 4], capsys)
    _, flipped, _ = run(["bruteforce", "--data", data, "--n", 4, "--negate-features"], capsys)
    assert "success 1.0000" in flipped
    assert "success 1.0000" not in plain


def write_config(tmp_path, **cfg):
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_run_pipeline(planted, tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        data={"path": planted.name},
        methods=[{"type": "bruteforce", "n": 5}],
        evaluation="both",
        output=str(tmp_path / "report.txt"),
    )
    code, stdout, _ = run(["run", "--config", cfg], capsys)
    assert code == 0
    tsv = (tmp_path / "report.txt.tsv").read_text().splitlines()
    method, variant, full, loo = tsv[1].split("\t")[:4]
    assert (method, variant, full) == ("bruteforce", "original", "1.0000")
    # 19 training lots leave room for a smaller-sum vector that misses the held-out lot
    assert 0.9 <= float(loo) <= 1.0
    assert (tmp_path / "report.txt").read_text() == stdout


def test_run_is_byte_reproducible(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        data={"preset": "engine", "overrides": {"lots": 12}},
        augment=[{"feature": "f1", "aggregate": "min"}],
        methods=[
            {"type": "logistic", "epochs": 40},
            {"type": "neldermead", "max_iterations": 40},
            {"type": "bruteforce", "n": 2},
        ],
    )
    outs = []
    for name in ("a.txt", "b.txt"):
        assert run(["run", "--config", cfg, "--out", tmp_path / name], capsys)[0] == 0
        outs.append(((tmp_path / name).read_bytes(), (tmp_path / f"{name}.tsv").read_bytes()))
    assert outs[0] == outs[1]
    assert len(outs[0][1].splitlines()) == 1 + 6


@pytest.mark.parametrize(
    "cfg, code, fragment",
    [
        ({"data": {"preset": "engine"}, "methods": []}, 2, "no methods"),
        ({"data": {"preset": "engine"}}, 2, "no methods"),
        ({"data": {"preset": "engine"}, "methods": [{"type": "svm"}]}, 2, "svm"),
        ({"data": {"preset": "engine"}, "methods": [{"type": "bruteforce", "k": 1}]}, 2, "'k'"),
        ({"methods": [{"type": "bruteforce"}]}, 2, "data section"),
        (
            {"data": {"preset": "engine"}, "augment": [{"feature": "ghost", "aggregate": "min"}], "methods": [{"type": "bruteforce"}]},
            3,
            "ghost",
        ),
        ({"data": {"path": "missing.csv"}, "methods": [{"type": "bruteforce"}]}, 3, "missing.csv"),
        ({"data": {"preset": "engine"}, "methods": [{"type": "bruteforce", "n": 15, "candidate_cap": 1000}]}, 4, "65536"),
    ],
)
def test_run_errors(tmp_path, capsys, cfg, code, fragment):
    path = write_config(tmp_path, **cfg)
    got, _, err = run(["run", "--config", path], capsys)
    assert got == code
    assert fragment in err
    assert len(err.strip().splitlines()) == 1


def test_bad_data_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("lot_id,is_prime,f1\na,1,0.1\na,1,0.2\n")
    code, _, err = run(["bruteforce", "--data", bad], capsys)
    assert code == 3 and "line 3" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bruteforce"])
    assert e.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "d.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "optchoice", "gen", "--lots", "2", "--choices", "2", "3", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
