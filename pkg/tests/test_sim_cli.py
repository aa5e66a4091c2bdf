import numpy as np
import pytest

from nbpadmm import channel
from nbpadmm.cli import main, oracle_compare, tiny_code
from nbpadmm.config import ConfigError, DecoderConfig
from nbpadmm.sim import format_csv, read_csv_records, run_trials


@pytest.fixture(scope="module")
def code():
    return tiny_code()


def test_noiseless_run_has_no_errors(code):
    s = run_trials(code, channel.get_scheme("qpsk"), 20.0, 50, DecoderConfig(), 1)
    assert s.fer == 0 and s.ser == 0


def test_csv_is_independent_of_workers(code):
    cfg = DecoderConfig.for_field(2)
    texts = [format_csv(run_trials(code, channel.get_scheme("qpsk"), 3.0, 600, cfg, 9, workers=w))
             for w in (1, 4)]
    assert texts[0] == texts[1]


def test_summary_cross_foots(code):
    s = run_trials(code, channel.get_scheme("qpsk"), 2.0, 300, DecoderConfig(), 4)
    rows, meta = read_csv_records(format_csv(s))
    assert len(rows) == 300 and int(meta["frames"]) == 300
    assert float(meta["fer"]) == sum(r["frame_error"] for r in rows) / 300
    assert float(meta["ser"]) == sum(r["symbol_errors"] for r in rows) / (300 * code.n)
    assert all(r["frame_error"] == (r["symbol_errors"] > 0) for r in rows)
    assert s.fer > 0


def test_run_trials_errors(code):
    with pytest.raises(ConfigError):
        run_trials(code, channel.get_scheme("bpsk"), 3.0, 10, DecoderConfig(), 0)
    with pytest.raises(ValueError):
        run_trials(code, channel.get_scheme("qpsk"), 3.0, 0, DecoderConfig(), 0)


def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert main(["simulate", "--esn0", "4", "--frames", "100", "--seed", "2", "--out", str(out)]) == 0
    rows, meta = read_csv_records(out.read_text())
    assert len(rows) == 100 and meta["modulation"] == "qpsk"
    assert main(["simulate", "--esn0", "4", "--frames", "5", "--source", "zeros"]) == 0
    assert "# fer=" in capsys.readouterr().out


def test_cli_validate_and_corrupt_matrix(tmp_path, capsys):
    mtx = tmp_path / "A.mtx"
    assert main(["validate", "--dump-matrix", str(mtx)]) == 0
    assert "OK" in capsys.readouterr().out
    assert main(["validate", "--matrix", str(mtx)]) == 0
    lines = mtx.read_text().splitlines()
    i = next(k for k, l in enumerate(lines) if not l.startswith("%")) + 1
    r, c, v = lines[i].split()
    lines[i] = f"{r} {c} 2"
    mtx.write_text("\n".join(lines) + "\n")
    assert main(["validate", "--matrix", str(mtx)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path):
    assert main(["validate", "--rho", "0.1"]) == 2  # rho must exceed alpha
    bad = tmp_path / "bad.nbc"
    bad.write_text("3 1\n")
    assert main(["validate", "--code", str(bad)]) == 2
    assert main(["validate", "--code", str(tmp_path / "missing.nbc")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_cli_decode_dumped_cost(tmp_path, capsys, code):
    scheme = channel.get_scheme("qpsk")
    rng = np.random.default_rng(0)
    g = channel.cost_vector(channel.awgn(channel.modulate(np.zeros(8, int), scheme), 9.0, rng), scheme, 9.0)
    path = tmp_path / "g.bin"
    channel.save_cost_vector(path, g, 8, 2)
    traj = tmp_path / "traj.csv"
    assert main(["decode", "--cost", str(path), "--dump-trajectory", str(traj)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "0 0 0 0 0 0 0 0"
    assert "converged=1" in out[1]
    assert traj.read_text().startswith("frame,iteration,r1sq,r2sq\n")
    channel.save_cost_vector(path, np.zeros(3), 1, 2)
    assert main(["decode", "--cost", str(path)]) == 2


def test_oracle_compare(code, capsys):
    rate, worse, _ = oracle_compare(code, channel.get_scheme("qpsk"), 8.0, 50, DecoderConfig(), 0)
    assert worse == 0 and rate >= 0.9
    assert main(["oracle-compare", "--esn0", "8", "--frames", "20"]) == 0
    assert "agreement=" in capsys.readouterr().out
