import pytest

from gen2phy import params as lp
from gen2phy.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main, parse_range
from gen2phy.waveform import load_waveform


def run(args, tmp_path):
    return main(list(args) + ["--output-dir", str(tmp_path)])


def test_params_uplink_report(tmp_path, capsys):
    assert run(["params"], tmp_path) == EXIT_OK
    assert "link_frequency_hz=320000\n" in capsys.readouterr().out


def test_params_slowest_corner_from_file(tmp_path, capsys):
    cfg = lp.save_params(lp.slowest_corner(), tmp_path / "slow.cfg")
    assert run(["params", "--params-file", str(cfg)], tmp_path) == EXIT_OK
    assert "link_frequency_hz=5000\n" in capsys.readouterr().out


def test_params_invalid_names_constraint(tmp_path, capsys):
    assert run(["params", "--set", "tari_s=5e-6"], tmp_path) == EXIT_CONFIG
    assert "tari_min" in capsys.readouterr().err


def test_params_missing_file(tmp_path):
    assert run(["params", "--params-file", str(tmp_path / "nope.cfg")], tmp_path) == EXIT_CONFIG


def test_downlink_defaults(tmp_path, capsys):
    assert run(["downlink"], tmp_path) == EXIT_OK
    assert "recovered=100110" in capsys.readouterr().out
    for name in ("envelope", "trigger", "clock", "diff_clock"):
        w = load_waveform(tmp_path / f"{name}.txt")
        assert w.sample_rate == 50e6 and len(w) > 0


def test_downlink_pr_ask(tmp_path):
    assert run(["downlink", "--modulation", "pr-ask"], tmp_path) == EXIT_OK


def test_downlink_heavy_noise_is_failure_not_config(tmp_path):
    assert run(["downlink", "--ebn0", "0"], tmp_path) == EXIT_FAILURE


def test_downlink_bad_depth(tmp_path):
    assert run(["downlink", "--depth", "0.5"], tmp_path) == EXIT_CONFIG


def test_ber_rows_and_determinism(tmp_path):
    args = ["ber", "--ebn0", "0:2:12", "--bits", "10000", "--output", "a.csv"]
    assert run(args, tmp_path) == EXIT_OK
    assert run(args[:-1] + ["b.csv", "--workers", "4"], tmp_path) == EXIT_OK
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes()
    assert len(a.decode().splitlines()) == 1 + 7


def test_ber_self_check(tmp_path, capsys):
    assert run(["ber", "--ebn0", "0,4", "--bits", "100000", "--self-check"], tmp_path) == EXIT_OK
    assert "within 3 sigma" in capsys.readouterr().out


def test_ber_miller(tmp_path):
    assert run(["ber", "--code", "miller", "--m", "4", "--ebn0", "2", "--bits", "10000"],
               tmp_path) == EXIT_OK


def test_preamble_defaults_reach_one(tmp_path):
    assert run(["preamble", "--ebn0", "0,14"], tmp_path) == EXIT_OK
    rows = (tmp_path / "preamble.csv").read_text().splitlines()
    assert float(rows[-1].split(",")[3]) >= 0.999


def test_preamble_single_symbol(tmp_path):
    assert run(["preamble", "--n", "1", "--ebn0", "2", "--trials", "2000"], tmp_path) == EXIT_OK
    row = (tmp_path / "preamble.csv").read_text().splitlines()[1].split(",")
    assert float(row[3]) == pytest.approx(1 - float(row[-1]))


def test_preamble_pe_override(tmp_path):
    assert run(["preamble", "--pe-override", "0.5", "--ebn0", "3", "--trials", "1000"],
               tmp_path) == EXIT_OK
    row = (tmp_path / "preamble.csv").read_text().splitlines()[1].split(",")
    assert row[4] == "0.015625"


def test_backscatter_defaults(tmp_path):
    assert run(["backscatter"], tmp_path) == EXIT_OK
    for name in ("baseband", "rf", "mixer"):
        assert (tmp_path / f"{name}.txt").exists()


def test_backscatter_reference_bits(tmp_path, capsys):
    assert run(["backscatter", "--bits", "11001001"], tmp_path) == EXIT_OK
    assert "recovered=11001001" in capsys.readouterr().out


def test_backscatter_quadrature_lo(tmp_path, capsys):
    assert run(["backscatter", "--lo-phase", "90"], tmp_path) == EXIT_FAILURE
    assert "collapsed" in capsys.readouterr().err


def test_bad_bits_string(tmp_path):
    assert run(["backscatter", "--bits", "10a1"], tmp_path) == EXIT_CONFIG


@pytest.mark.parametrize("text, want", [
    ("0:2:12", [0, 2, 4, 6, 8, 10, 12]),
    ("0:0.5:1", [0, 0.5, 1]),
    ("3", [3.0]),
    ("1,5,9", [1.0, 5.0, 9.0]),
])
def test_parse_range(text, want):
    assert parse_range(text) == want
