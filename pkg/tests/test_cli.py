"""Command-line interface: exit codes, output formats, and end-to-end
sweep/bound/evm/plot runs.

Bound spot values are frozen from an independent union-bound
computation (weight spectrum enumerated by error-event search, terms
summed with scipy's erfc); see the coding tests for the derivation.
"""

import json

import numpy as np
import pytest

from phylab.cli import main
from phylab.emit import read_csv, read_json

CONFIG = {
    "chain": {
        "chain": "single_carrier",
        "modulation": "bpsk",
        "payload_bits": 2000,
        "code": {"type": "conv", "constraint_length": 7,
                 "generators": ["133", "171"]},
    },
    "sweep": {"points": "0:2:4", "stop_min_errors": None,
              "stop_max_bits": 4000, "seeds_per_point": 2, "master_seed": 21},
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(CONFIG))
    return path


# ---------------------------------------------------------------------------
# exit codes


def test_no_arguments_is_a_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert main(["transmogrify"]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["bound", "--ebn0", "0:1:4", "--fast"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err and "error" in err


def test_missing_required_flag_is_a_usage_error(capsys):
    assert main(["sweep", "--config", "x.json"]) == 1  # no --out
    assert "usage" in capsys.readouterr().err


def test_missing_config_file_is_a_runtime_error(tmp_path, capsys):
    code = main(["sweep", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_malformed_range_is_a_runtime_error(capsys):
    assert main(["bound", "--ebn0", "5:1:0"]) == 2
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# bound


def test_bound_prints_one_nonincreasing_value_per_point(capsys):
    assert main(["bound", "--k", "7", "--gens", "133,171",
                 "--puncture", "111001", "--ebn0", "0:1:10"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 11
    xs, ys = zip(*(map(float, ln.split()) for ln in lines))
    assert list(xs) == [float(i) for i in range(11)]
    assert all(b <= a for a, b in zip(ys, ys[1:]))
    assert all(0.0 <= y <= 1.0 for y in ys)


def test_bound_spot_values_match_the_frozen_curve(capsys):
    main(["bound", "--puncture", "111001", "--ebn0", "0:1:10"])
    lines = capsys.readouterr().out.strip().splitlines()
    values = [float(ln.split()[1]) for ln in lines]
    assert values[3] == pytest.approx(0.03832257836562905, rel=1e-12)
    assert values[4] == pytest.approx(0.000585059656428846, rel=1e-12)
    assert values[10] == pytest.approx(3.303007255487501e-17, rel=1e-12)


def test_bound_unpunctured_rate_half_spot_value(capsys):
    main(["bound", "--ebn0", "6:1:6"])
    out = capsys.readouterr().out.strip()
    assert float(out.split()[1]) == pytest.approx(5.609152127990212e-09, rel=1e-12)


def test_bound_explicit_rate_overrides_the_derived_one(capsys):
    main(["bound", "--puncture", "111001", "--ebn0", "5:1:5"])
    derived = float(capsys.readouterr().out.split()[1])
    main(["bound", "--puncture", "111001", "--rate", "3/4", "--ebn0", "5:1:5"])
    explicit = float(capsys.readouterr().out.split()[1])
    assert derived == explicit
    main(["bound", "--puncture", "111001", "--rate", "1/2", "--ebn0", "5:1:5"])
    other = float(capsys.readouterr().out.split()[1])
    assert other != derived


def test_bound_rejects_nonsense_rates(capsys):
    assert main(["bound", "--rate", "five", "--ebn0", "0:1:2"]) == 2
    assert main(["bound", "--rate", "4/3", "--ebn0", "0:1:2"]) == 2


# ---------------------------------------------------------------------------
# sweep


def test_sweep_writes_csv_that_parses_back(config_path, tmp_path, capsys):
    out = tmp_path / "res.csv"
    assert main(["sweep", "--config", str(config_path), "--out", str(out)]) == 0
    assert "wrote 3 records" in capsys.readouterr().out
    records = read_csv(out)
    assert [r.ebn0_db for r in records] == [0.0, 2.0, 4.0]
    assert all(r.bits == 4000 for r in records)


def test_sweep_output_is_byte_identical_across_thread_counts(config_path, tmp_path):
    out1 = tmp_path / "t1.csv"
    out4 = tmp_path / "t4.csv"
    assert main(["sweep", "--config", str(config_path), "--out", str(out1),
                 "--threads", "1"]) == 0
    assert main(["sweep", "--config", str(config_path), "--out", str(out4),
                 "--threads", "4"]) == 0
    assert out1.read_bytes() == out4.read_bytes()


def test_sweep_emits_json_and_plotdata(config_path, tmp_path):
    out_json = tmp_path / "res.json"
    out_dat = tmp_path / "res.dat"
    assert main(["sweep", "--config", str(config_path), "--out",
                 str(out_json), "--format", "json"]) == 0
    assert main(["sweep", "--config", str(config_path), "--out",
                 str(out_dat), "--format", "plotdata"]) == 0
    records = read_json(out_json)
    assert len(records) == 3
    text = out_dat.read_text()
    assert text.startswith("# single_carrier/bpsk/r1/2\n")
    assert len(text.strip().splitlines()) == 4  # header + 3 points


def test_sweep_chain_override_changes_the_chain(config_path, tmp_path):
    out = tmp_path / "ofdm.csv"
    assert main(["sweep", "--config", str(config_path), "--chain", "ofdm",
                 "--out", str(out)]) == 0
    records = read_csv(out)
    assert all(r.chain == "ofdm" for r in records)


# ---------------------------------------------------------------------------
# evm


def _write_symbols(path, symbols):
    np.savetxt(path, np.column_stack([symbols.real, symbols.imag]))


def test_evm_reports_the_known_minus_29_db_case(tmp_path, capsys):
    ref = np.array([1.0 + 1.0j, -1.0 + 1.0j, -1.0 - 1.0j, 1.0 - 1.0j])
    rx = ref * (1.0 + 10.0 ** (-29.0 / 20.0))
    _write_symbols(tmp_path / "ref.txt", ref)
    _write_symbols(tmp_path / "rx.txt", rx)
    assert main(["evm", "--received", str(tmp_path / "rx.txt"),
                 "--reference", str(tmp_path / "ref.txt")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["evm_db"] == pytest.approx(-29.0, abs=1e-9)
    assert doc["limit_db"] == -19.0
    assert doc["compliant"] is True


def test_evm_perfect_match_serializes_null_db(tmp_path, capsys):
    ref = np.array([1.0 + 0.0j, 0.0 - 1.0j])
    _write_symbols(tmp_path / "ref.txt", ref)
    assert main(["evm", "--received", str(tmp_path / "ref.txt"),
                 "--reference", str(tmp_path / "ref.txt")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["evm_ratio"] == 0.0
    assert doc["evm_db"] is None
    assert doc["compliant"] is True


def test_evm_honors_a_custom_limit(tmp_path, capsys):
    ref = np.array([1.0 + 0.0j])
    rx = ref * (1.0 + 10.0 ** (-21.0 / 20.0))
    _write_symbols(tmp_path / "ref.txt", ref)
    _write_symbols(tmp_path / "rx.txt", rx)
    main(["evm", "--received", str(tmp_path / "rx.txt"),
          "--reference", str(tmp_path / "ref.txt"), "--limit-db", "-25"])
    assert json.loads(capsys.readouterr().out)["compliant"] is False


def test_evm_rejects_malformed_symbol_files(tmp_path, capsys):
    (tmp_path / "bad.txt").write_text("1.0 2.0 3.0\n")
    assert main(["evm", "--received", str(tmp_path / "bad.txt"),
                 "--reference", str(tmp_path / "bad.txt")]) == 2


# ---------------------------------------------------------------------------
# plot


def test_plot_renders_svg_series_from_csv(config_path, tmp_path, capsys):
    csv_path = tmp_path / "res.csv"
    svg_path = tmp_path / "res.svg"
    main(["sweep", "--config", str(config_path), "--out", str(csv_path)])
    assert main(["plot", "--in", str(csv_path), "--out", str(svg_path)]) == 0
    svg = svg_path.read_text()
    assert svg.startswith("<svg ")
    assert "<polyline" in svg
    assert "single_carrier/bpsk/r1/2" in svg
    assert "Eb/N0" in svg


def test_plot_with_only_zero_error_records_is_a_runtime_error(tmp_path, capsys):
    from phylab.emit import write_csv
    from phylab.metrics import BerRecord

    csv_path = tmp_path / "zeros.csv"
    write_csv([BerRecord(bits=1000, errors=0, ebn0_db=20.0, chain="ofdm",
                         modulation="qpsk", family="psk", code_rate="1",
                         label="ofdm/qpsk/r1")], csv_path)
    assert main(["plot", "--in", str(csv_path), "--out",
                 str(tmp_path / "o.svg")]) == 2
    assert "error" in capsys.readouterr().err


def test_plot_on_missing_csv_is_a_runtime_error(tmp_path):
    assert main(["plot", "--in", str(tmp_path / "none.csv"),
                 "--out", str(tmp_path / "o.svg")]) == 2
