import json
import time

import numpy as np
import pytest

from branchprob import cli, dft_codec
from branchprob.scenarios import bundled_dir

DATA = bundled_dir().parent
SIGNAL = DATA / "signals" / "bandlimited64.csv"
MANIFEST = DATA / "manifest.json"


def scenario_path(fragment):
    return next(p for p in bundled_dir().glob("*.json") if fragment in p.name)


class TestCodecCommand:
    def test_encode_worked_example(self, tmp_path):
        out = tmp_path / "s.blc"
        assert cli.main(["codec", "encode", str(SIGNAL), "--R", "4", "--b", "16", "--out", str(out)]) == 0
        data = out.read_bytes()
        assert len(data) == 12 + 16
        assert dft_codec.CodeStream.from_bytes(data).bit_length == 123

    def test_decode_round_trip(self, tmp_path):
        blc, csv = tmp_path / "s.blc", tmp_path / "s.csv"
        cli.main(["codec", "encode", str(SIGNAL), "--R", "4", "--b", "16", "--out", str(blc)])
        assert cli.main(["codec", "decode", str(blc), "--out", str(csv)]) == 0
        x = cli.read_signal_csv(SIGNAL)
        y = cli.read_signal_csv(csv)
        stream = dft_codec.CodeStream.from_bytes(blc.read_bytes())
        bound = dft_codec.stream_scale(stream) * 2.0 ** -(16 / 2 - 1) * np.sqrt(2 * 4)
        assert np.linalg.norm(y - x) <= bound

    def test_container_round_trips_bit_exactly(self, tmp_path):
        blc = tmp_path / "s.blc"
        cli.main(["codec", "encode", str(SIGNAL), "--out", str(blc)])
        data = blc.read_bytes()
        assert dft_codec.CodeStream.from_bytes(data).to_bytes() == data

    def test_minimal_encoding_default(self, tmp_path):
        blc = tmp_path / "s.blc"
        assert cli.main(["codec", "encode", str(SIGNAL), "--epsilon", "1e-3", "--out", str(blc)]) == 0
        assert dft_codec.stream_params(dft_codec.CodeStream.from_bytes(blc.read_bytes())).R == 4

    def test_truncated_file(self, tmp_path, capsys):
        blc = tmp_path / "s.blc"
        cli.main(["codec", "encode", str(SIGNAL), "--R", "4", "--b", "16", "--out", str(blc)])
        blc.write_bytes(blc.read_bytes()[:20])
        assert cli.main(["codec", "decode", str(blc)]) == cli.EXIT_BAD_INPUT
        assert "bit offset" in capsys.readouterr().err

    def test_bad_params(self, tmp_path):
        assert cli.main(["codec", "encode", str(SIGNAL), "--R", "4", "--b", "15"]) == cli.EXIT_BAD_INPUT
        assert cli.main(["codec", "encode", str(SIGNAL), "--R", "4"]) == cli.EXIT_BAD_INPUT

    def test_missing_input(self, tmp_path):
        assert cli.main(["codec", "decode", str(tmp_path / "nope.blc")]) == cli.EXIT_BAD_INPUT
        assert cli.main(["codec", "encode", str(tmp_path / "nope.csv")]) == cli.EXIT_BAD_INPUT


class TestEntropyCommand:
    def test_report_json(self, tmp_path, capsys):
        x, y = tmp_path / "x", tmp_path / "y"
        x.write_bytes(b"ab" * 32)
        y.write_bytes(b"ab" * 16)
        assert cli.main(["entropy", str(x), str(y)]) == 0
        d = json.loads(capsys.readouterr().out)
        assert set(d) == {"h_x", "h_y", "h_x_given_y", "mutual", "compressor"}
        assert d["mutual"] == d["h_x"] - d["h_x_given_y"]
        assert d["h_x"] == 46.0

    def test_single_input(self, tmp_path, capsys):
        x = tmp_path / "x"
        x.write_bytes(b"hello")
        assert cli.main(["entropy", str(x), "--compressor", "zlib"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["h_y"] is None and d["compressor"] == "zlib"


class TestRunCommand:
    def test_replicator_three(self, tmp_path):
        assert cli.main(["run", "--config", str(scenario_path("replicator_three.json")), "--out", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "replicator-3.json").read_text())
        assert rep["measures"]["copy_count"]["probabilities"] == [2 / 3, 1 / 3]

    def test_interference(self, tmp_path):
        cli.main(["run", "--config", str(scenario_path("interference")), "--out", str(tmp_path)])
        rep = json.loads((tmp_path / "interference.json").read_text())
        assert rep["measures"]["born"]["probabilities"] == [0.0, 1.0]
        assert rep["measures"]["flat"]["probabilities"] == [0.5, 0.5]

    def test_full_corpus_fast_and_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        t0 = time.perf_counter()
        assert cli.main(["run", "--config", str(MANIFEST), "--out", str(a), "--deterministic"]) == 0
        assert time.perf_counter() - t0 < 60
        assert cli.main(["run", "--config", str(MANIFEST), "--out", str(b), "--deterministic"]) == 0
        names = sorted(p.name for p in a.iterdir())
        assert len(names) == len(list(bundled_dir().glob("*.json")))
        for n in names:
            assert (a / n).read_bytes() == (b / n).read_bytes()

    def test_seed_override(self, tmp_path):
        cfg = str(scenario_path("replicator_three.json"))
        cli.main(["run", "--config", cfg, "--out", str(tmp_path / "s1"), "--seed", "1", "--deterministic"])
        cli.main(["run", "--config", cfg, "--out", str(tmp_path / "s2"), "--seed", "2", "--deterministic"])
        r1 = json.loads((tmp_path / "s1" / "replicator-3.json").read_text())
        r2 = json.loads((tmp_path / "s2" / "replicator-3.json").read_text())
        assert r1["provenance"]["seed"] == 1
        assert r1["monte_carlo"] != r2["monte_carlo"]

    def test_csv_format(self, tmp_path):
        cli.main(["run", "--config", str(scenario_path("replicator_two")), "--out", str(tmp_path), "--format", "csv"])
        lines = (tmp_path / "replicator-2.csv").read_text().splitlines()
        assert lines[0] == ",".join(cli.CSV_HEADER)
        assert len(lines) == 1 + 4

    def test_failing_scenario(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"kind": "quantum", "outcomes": [{"amplitude": [0, 0]}]}))
        good = scenario_path("replicator_two")
        assert cli.main(["run", "--config", str(bad), "--config", str(good), "--out", str(tmp_path / "o")]) == cli.EXIT_SCENARIO_FAILED
        assert (tmp_path / "o" / "replicator-2.json").exists()

    def test_malformed_manifest(self, tmp_path):
        bad = tmp_path / "m.json"
        bad.write_text("{")
        assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path)]) == cli.EXIT_BAD_INPUT


class TestReportCommand:
    def test_table_and_csv(self, tmp_path, capsys):
        cli.main(["run", "--config", str(MANIFEST), "--out", str(tmp_path), "--deterministic"])
        capsys.readouterr()
        assert cli.main(["report", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "spearman" in out and "replicator-3" in out
        assert cli.main(["report", str(tmp_path), "--format", "csv"]) == 0
        assert capsys.readouterr().out.startswith("scenario,measure")

    def test_unreadable_report(self, tmp_path):
        p = tmp_path / "r.json"
        p.write_text("nope")
        assert cli.main(["report", str(p)]) == cli.EXIT_BAD_INPUT


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["codec"])
    assert info.value.code == cli.EXIT_BAD_INPUT
