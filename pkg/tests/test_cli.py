import csv
import io
import json
from pathlib import Path

import pytest

from momentclt.cli import (
    EXPERIMENTS,
    apply_overrides,
    check_report,
    load_config,
    main,
    output_dir,
    run_config,
    validate,
)
from momentclt.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
# arma_unit_root is shipped on purpose as a model that must be rejected
VALID_CONFIGS = sorted(p for p in CONFIGS.glob("*.json") if p.stem != "arma_unit_root")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestList:
    def test_eight_kinds(self, capsys):
        code, out, _ = run(capsys, "list")
        assert code == 0
        names = [line.split()[0] for line in out.splitlines() if line and not line.startswith(" ")]
        assert names == list(EXPERIMENTS) and len(names) == 8


class TestValidate:
    @pytest.mark.parametrize("path", VALID_CONFIGS, ids=lambda p: p.stem)
    def test_shipped_configs(self, path, capsys):
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 0 and out.strip() == "ok"

    def test_unit_root_config_rejected(self, capsys):
        code, out, _ = run(capsys, "validate", str(CONFIGS / "arma_unit_root.json"))
        assert code == 3 and "unit circle" in out

    def test_missing_seed(self):
        cfg = load_config(CONFIGS / "clt_geometric.json")
        del cfg["seed"]
        problems = validate(cfg)
        assert problems and problems[0].startswith("seed:")

    def test_unknown_experiment(self):
        problems = validate({"schema_version": 1, "seed": 0, "experiment": "bogus"})
        assert any(p.startswith("experiment:") for p in problems)

    def test_messages_cite_key(self):
        cfg = load_config(CONFIGS / "clt_geometric.json", ["params.R=10"])
        assert validate(cfg) == ["params.R: need at least 100 replications"]

    def test_bad_schema_version(self, capsys):
        code, out, _ = run(capsys, "validate", str(CONFIGS / "clt_geometric.json"), "--set", "schema_version=7")
        assert code == 3 and "schema_version" in out

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
        assert code == 3 and "config" in err


class TestOverrides:
    def test_dotted_json_values(self):
        cfg = apply_overrides({"params": {"R": 1}}, ["params.R=500", "params.n_grid=[8,16]", "name=abc", "x.y=true"])
        assert cfg == {"params": {"R": 500, "n_grid": [8, 16]}, "name": "abc", "x": {"y": True}}

    def test_malformed(self):
        with pytest.raises(ConfigError):
            apply_overrides({}, ["noequals"])


class TestRun:
    def test_witness(self, capsys, tmp_path):
        code, out, _ = run(capsys, "run", str(CONFIGS / "nonmixing_witness.json"), "--output-dir", str(tmp_path))
        assert code == 0 and "0.09" in out

    def test_unit_root(self, capsys, tmp_path):
        code, _, err = run(capsys, "run", str(CONFIGS / "arma_unit_root.json"), "--output-dir", str(tmp_path))
        assert code == 3 and "unit circle" in err

    def test_assertion_failure(self, capsys, tmp_path):
        # a 3x3 field is far from the Gaussian limit, so the moment checks fail
        code, out, _ = run(
            capsys, "run", str(CONFIGS / "clt_field_2d.json"), "--set", "params.n_grid=[1]",
            "--set", "params.retry=false", "--set", "params.R=2000", "--output-dir", str(tmp_path),
        )
        assert code == 2 and "FAIL" in out

    def test_size_cap(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "run", str(CONFIGS / "verify_m4_geometric.json"), "--set", "params.window=[0,1000]",
            "--output-dir", str(tmp_path),
        )
        assert code == 4 and "size error" in err

    def test_verify_m4_rows(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "run", str(CONFIGS / "verify_m4_geometric.json"), "--set", "params.max_tuples=200",
            "--output-dir", str(tmp_path),
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO((tmp_path / "verify_m4_geometric.csv").read_text())))
        assert len(rows) == 200 * 10 and all(r["holds"] == "true" for r in rows)

    def test_env_output_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("MOMENTCLT_OUTPUT_DIR", str(tmp_path / "env"))
        code, _, _ = run(capsys, "run", str(CONFIGS / "sigma2_ar1.json"))
        assert code == 0 and (tmp_path / "env" / "sigma2_ar1.json").exists()

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MOMENTCLT_OUTPUT_DIR", str(tmp_path / "env"))
        assert output_dir({}, str(tmp_path / "flag")) == tmp_path / "flag"
        assert output_dir({}) == tmp_path / "env"

    def test_prefix(self, tmp_path):
        cfg = load_config(CONFIGS / "sigma2_ar1.json", ["output.prefix=custom"])
        code, _ = run_config(cfg, out_dir=str(tmp_path), stream=io.StringIO())
        assert code == 0 and (tmp_path / "custom.csv").exists()

    @pytest.mark.parametrize(
        "name",
        ["moments_small", "sigma2_ar1", "arma_expand_ar1", "arma_common_root", "mixing_profile",
         "mixing_lemma", "diagnostics_line", "counting_lemma", "clt_degenerate", "clt_chain"],
    )
    def test_report_roundtrip(self, name, tmp_path):
        cfg = load_config(CONFIGS / f"{name}.json")
        code, doc = run_config(cfg, out_dir=str(tmp_path), stream=io.StringIO())
        assert code == 0
        stored = json.loads((tmp_path / f"{name}.json").read_text())
        assert check_report(stored) == []
        assert stored["result"] == json.loads(json.dumps(doc["result"], default=str))
        text = (tmp_path / f"{name}.csv").read_text()
        assert len(list(csv.reader(io.StringIO(text)))) >= 2

    def test_check_report_flags_missing(self):
        assert "seed: missing" in check_report({"schema_version": 1})

    def test_csv_deterministic(self, tmp_path):
        cfg = load_config(CONFIGS / "clt_geometric.json", ["params.R=300", "params.n_grid=[512]"])
        run_config(cfg, workers=1, out_dir=str(tmp_path / "a"), stream=io.StringIO())
        run_config(cfg, workers=4, out_dir=str(tmp_path / "b"), stream=io.StringIO())
        a = (tmp_path / "a" / "clt_geometric.csv").read_bytes()
        assert a == (tmp_path / "b" / "clt_geometric.csv").read_bytes()
