"""Record serialization: exact CSV/JSON round-trips, plot-data layout,
schema validation, and config file loading."""

import json

import pytest

from phylab.chains import ChainConfig
from phylab.emit import (
    CSV_COLUMNS,
    emit,
    load_config,
    load_schema,
    read_csv,
    read_json,
    validate_config_dict,
    write_csv,
    write_json,
    write_plotdata,
)
from phylab.errors import ConfigError
from phylab.metrics import BerRecord
from phylab.sweep import SweepConfig


def _rec(**kw):
    base = dict(
        bits=123457, errors=89, seed=31415,
        label="single_carrier/bpsk/r1/2",
        snr_db=3.0103, ebn0_db=4.0 / 3.0,
        chain="single_carrier", modulation="bpsk", family="psk",
        code_rate="1/2",
    )
    base.update(kw)
    return BerRecord(**base)


SAMPLE = [
    _rec(),
    _rec(bits=360110, errors=0, seed=7, ebn0_db=25.0, snr_db=None,
         label="ofdm/16qam/r3/4", chain="ofdm", modulation="16qam",
         family="qam", code_rate="3/4"),
    _rec(bits=999, errors=999, seed=0, snr_db=0.1 + 0.2,  # 0.30000000000000004
         ebn0_db=None, label="equalizer/bpsk/r1", chain="equalizer",
         modulation="bpsk", family="psk", code_rate="1"),
]


# ---------------------------------------------------------------------------
# CSV


def test_csv_roundtrip_reproduces_every_field_exactly(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(SAMPLE, path)
    assert read_csv(path) == SAMPLE


def test_csv_header_matches_the_documented_column_order(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(SAMPLE, path)
    first = path.read_text().splitlines()[0]
    assert first == ",".join(CSV_COLUMNS)
    assert first == ("chain,modulation,family,code_rate,snr_db,ebn0_db,"
                     "bits,errors,ber,seed")


def test_csv_floats_are_written_in_full_precision(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(SAMPLE, path)
    text = path.read_text()
    assert repr(0.1 + 0.2) in text        # snr cell survives verbatim
    assert repr(89 / 123457) in text      # ber cell is the exact quotient


def test_csv_with_wrong_header_is_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    write_csv(SAMPLE, path)
    lines = path.read_text().splitlines()
    lines[0] = lines[0].replace("ber", "rate")
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ConfigError):
        read_csv(path)


def test_csv_with_missing_cells_is_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    write_csv(SAMPLE, path)
    lines = path.read_text().splitlines()
    lines[1] = lines[1].rsplit(",", 1)[0]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ConfigError):
        read_csv(path)


def test_csv_with_inconsistent_ber_cell_is_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    write_csv([_rec()], path)
    text = path.read_text().replace(repr(89 / 123457), "0.00072")
    path.write_text(text)
    with pytest.raises(ConfigError):
        read_csv(path)


def test_empty_and_headerless_csv_are_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ConfigError):
        read_csv(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text(",".join(CSV_COLUMNS) + "\n")
    with pytest.raises(ConfigError):
        read_csv(header_only)


def test_writing_no_records_is_rejected(tmp_path):
    for fn in (write_csv, write_json, write_plotdata):
        with pytest.raises(ConfigError):
            fn([], tmp_path / "none.out")


# ---------------------------------------------------------------------------
# JSON


def test_json_roundtrip_reproduces_records(tmp_path):
    path = tmp_path / "out.json"
    write_json(SAMPLE, path)
    assert read_json(path) == SAMPLE


def test_json_document_shape_and_null_axes(tmp_path):
    path = tmp_path / "out.json"
    write_json(SAMPLE, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"records"}
    assert len(doc["records"]) == 3
    assert doc["records"][1]["snr_db"] is None
    assert doc["records"][2]["ebn0_db"] is None
    assert doc["records"][0]["ber"] == 89 / 123457


def test_nonfinite_axis_serializes_as_null(tmp_path):
    path = tmp_path / "out.json"
    write_json([_rec(snr_db=float("inf"))], path)
    doc = json.loads(path.read_text())
    assert doc["records"][0]["snr_db"] is None


def test_json_not_matching_schema_is_rejected(tmp_path):
    path = tmp_path / "bad.json"
    write_json(SAMPLE, path)
    doc = json.loads(path.read_text())
    doc["records"][0]["bits"] = 0
    path.write_text(json.dumps(doc))
    with pytest.raises(Exception):
        read_json(path)
    doc = json.loads((tmp_path / "bad.json").read_text())


def test_records_schema_loads_and_rejects_extra_fields():
    schema = load_schema("records.schema.json")
    assert schema["properties"]["records"]["items"]["additionalProperties"] is False


# ---------------------------------------------------------------------------
# plot data


def test_plotdata_groups_series_under_label_headers(tmp_path):
    path = tmp_path / "out.dat"
    recs = [
        _rec(ebn0_db=2.0, errors=50),
        _rec(ebn0_db=4.0, errors=5),
        _rec(ebn0_db=6.0, errors=0),
        _rec(ebn0_db=2.0, errors=7, label="ofdm/16qam/r3/4", chain="ofdm",
             modulation="16qam", family="qam", code_rate="3/4"),
    ]
    write_plotdata(recs, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# single_carrier/bpsk/r1/2"
    assert lines[1] == f"2.0 {50 / 123457!r}"
    assert lines[2] == f"4.0 {5 / 123457!r}"
    assert lines[3] == "6.0 "  # zero errors leave the y column blank
    assert lines[4] == ""
    assert lines[5] == "# ofdm/16qam/r3/4"
    assert lines[6] == f"2.0 {7 / 123457!r}"


def test_plotdata_axis_selection_and_missing_axis(tmp_path):
    path = tmp_path / "out.dat"
    write_plotdata([_rec(snr_db=5.5, errors=1)], path, x_axis="snr_db")
    assert path.read_text().splitlines()[1].startswith("5.5 ")
    with pytest.raises(ConfigError):
        write_plotdata([_rec(snr_db=None)], path, x_axis="snr_db")
    with pytest.raises(ConfigError):
        write_plotdata([_rec()], path, x_axis="watts")


def test_plotdata_defaults_to_available_axis(tmp_path):
    path = tmp_path / "out.dat"
    write_plotdata([_rec(ebn0_db=None, snr_db=9.0, errors=1)], path)
    assert path.read_text().splitlines()[1].startswith("9.0 ")


# ---------------------------------------------------------------------------
# emit dispatcher


def test_emit_dispatches_on_format(tmp_path):
    emit(SAMPLE, "csv", tmp_path / "a.csv")
    emit(SAMPLE, "json", tmp_path / "a.json")
    emit(SAMPLE[:2], "plotdata", tmp_path / "a.dat")
    assert read_csv(tmp_path / "a.csv") == read_json(tmp_path / "a.json")
    with pytest.raises(ConfigError):
        emit(SAMPLE, "xml", tmp_path / "a.xml")


# ---------------------------------------------------------------------------
# config loading


def _write_config(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


GOOD_DOC = {
    "chain": {
        "chain": "single_carrier",
        "modulation": "bpsk",
        "payload_bits": 5000,
        "code": {"type": "conv", "constraint_length": 7,
                 "generators": ["133", "171"], "puncture": "111001"},
    },
    "sweep": {"points": "0:1:4", "stop_min_errors": 50,
              "stop_max_bits": 20000, "seeds_per_point": 2, "master_seed": 3},
}


def test_load_config_builds_both_configs(tmp_path):
    chain, sweep = load_config(_write_config(tmp_path, GOOD_DOC))
    assert isinstance(chain, ChainConfig)
    assert isinstance(sweep, SweepConfig)
    assert chain.puncture_mask == "111001"
    assert sweep.points == (0.0, 1.0, 2.0, 3.0, 4.0)
    assert sweep.master_seed == 3


def test_chain_override_replaces_only_the_chain_name(tmp_path):
    doc = {
        "chain": {"chain": "single_carrier", "modulation": "16qam",
                  "payload_bits": 2000},
        "sweep": {"points": [1.0]},
    }
    chain, _ = load_config(_write_config(tmp_path, doc), chain_override="ofdm")
    assert chain.chain == "ofdm"
    assert chain.modulation == "16qam"
    assert chain.payload_bits == 2000


def test_schema_rejects_malformed_configs(tmp_path):
    bad = dict(GOOD_DOC, sweep=dict(GOOD_DOC["sweep"], x_axis="volts"))
    with pytest.raises(ConfigError):
        load_config(_write_config(tmp_path, bad))
    bad = {"chain": GOOD_DOC["chain"]}  # missing sweep section
    with pytest.raises(ConfigError):
        load_config(_write_config(tmp_path, bad))
    bad = dict(GOOD_DOC, chain=dict(GOOD_DOC["chain"], chain="dsl"))
    with pytest.raises(ConfigError):
        load_config(_write_config(tmp_path, bad))


def test_validate_config_dict_catches_bad_types():
    with pytest.raises(ConfigError):
        validate_config_dict({"chain": {"chain": "ofdm"},
                              "sweep": {"points": "0:1:4",
                                        "seeds_per_point": "four"}})


def test_invalid_json_and_non_object_roots_are_rejected(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text(json.dumps(["chain", "sweep"]))
    with pytest.raises(ConfigError):
        load_config(path)


@pytest.mark.parametrize("preset", [
    "ofdm_16qam_conv34_snr_table.json",
    "bpsk_conv_rate12_ebn0.json",
    "bpsk_conv_rate34_punctured_ebn0.json",
    "qpsk_uncoded_ebn0.json",
    "qpsk_rs_7_5_ebn0.json",
    "qpsk_conv_rate57_ebn0.json",
    "multipath_bpsk_linear_ebn0.json",
    "multipath_bpsk_dfe_ebn0.json",
    "multipath_bpsk_mlse_ebn0.json",
])
def test_shipped_preset_configs_validate_and_load(preset):
    chain, sweep = load_config(f"configs/{preset}")
    assert sweep.points
    assert chain.payload_bits >= 1000
