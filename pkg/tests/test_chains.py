"""End-to-end chain behavior: determinism, alignment accounting,
noiseless sanity, config parsing, and rate bookkeeping."""

import math
from fractions import Fraction

import numpy as np
import pytest

from phylab.chains import ChainConfig, chain_from_dict, run_chain
from phylab.channel import ebn0_to_snr
from phylab.equalize import EqualizerConfig
from phylab.errors import ConfigError


def _cfg(**kw):
    return ChainConfig(**kw)


# ---------------------------------------------------------------------------
# determinism


@pytest.mark.parametrize("cfg_kw,x", [
    (dict(chain="single_carrier", modulation="bpsk", payload_bits=4000,
          code_type="conv", puncture_mask="111001"), 4.0),
    (dict(chain="ofdm", modulation="16qam", payload_bits=4000,
          code_type="conv", puncture_mask="111001"), 12.0),
    (dict(chain="equalizer", payload_bits=2000,
          equalizer=EqualizerConfig(kind="mlse")), 8.0),
])
def test_same_config_x_and_seed_reproduce_the_record(cfg_kw, x):
    a = run_chain(_cfg(**cfg_kw), x, seed=42)
    b = run_chain(_cfg(**cfg_kw), x, seed=42)
    assert a == b  # every field, including error count and axes


def test_different_seeds_draw_different_noise():
    cfg = _cfg(chain="single_carrier", modulation="bpsk", payload_bits=30000)
    a = run_chain(cfg, 0.0, seed=1)
    b = run_chain(cfg, 0.0, seed=2)
    assert a.errors > 0 and b.errors > 0
    assert a.errors != b.errors


# ---------------------------------------------------------------------------
# alignment: every record counts exactly payload_bits


@pytest.mark.parametrize("cfg_kw", [
    dict(chain="single_carrier", modulation="8psk", payload_bits=12345),
    dict(chain="single_carrier", modulation="qpsk", payload_bits=12345,
         code_type="conv"),
    dict(chain="single_carrier", modulation="bpsk", payload_bits=12345,
         code_type="conv", puncture_mask="1111101010"),
    dict(chain="single_carrier", modulation="qpsk", payload_bits=12347,
         code_type="rs"),
    dict(chain="ofdm", modulation="64qam", payload_bits=12345,
         code_type="conv", puncture_mask="111001"),
    dict(chain="equalizer", payload_bits=2345),
])
def test_record_counts_exactly_the_configured_payload(cfg_kw):
    rec = run_chain(_cfg(**cfg_kw), 6.0, seed=9)
    assert rec.bits == cfg_kw["payload_bits"]


# ---------------------------------------------------------------------------
# noiseless runs are error-free


@pytest.mark.parametrize("cfg_kw", [
    dict(chain="single_carrier", modulation="qpsk", payload_bits=3000,
         code_type="conv", puncture_mask="111001"),
    dict(chain="single_carrier", modulation="16qam", payload_bits=3000,
         code_type="rs"),
    dict(chain="ofdm", modulation="256qam", payload_bits=3000),
    dict(chain="equalizer", payload_bits=2000),
])
def test_infinite_snr_bypasses_noise_and_counts_zero_errors(cfg_kw):
    rec = run_chain(_cfg(**cfg_kw), float("inf"), seed=3)
    assert rec.errors == 0


def test_moderate_snr_conv_chain_still_decodes_cleanly():
    cfg = _cfg(chain="single_carrier", modulation="bpsk", payload_bits=20000,
               code_type="conv")
    assert run_chain(cfg, 7.0, seed=5).errors == 0


# ---------------------------------------------------------------------------
# axes and record metadata


def test_swept_ebn0_fills_in_the_matching_symbol_snr():
    cfg = _cfg(chain="single_carrier", modulation="16qam", payload_bits=1000,
               code_type="conv", puncture_mask="111001")
    rec = run_chain(cfg, 10.0, seed=1, x_axis="ebn0_db")
    assert rec.ebn0_db == 10.0
    assert rec.snr_db == pytest.approx(ebn0_to_snr(10.0, 4, Fraction(3, 4)))
    assert rec.snr_db == pytest.approx(10.0 + 10.0 * math.log10(3.0))


def test_swept_snr_fills_in_the_matching_ebn0():
    cfg = _cfg(chain="ofdm", modulation="16qam", payload_bits=1000)
    rec = run_chain(cfg, 10.0, seed=1, x_axis="snr_db")
    assert rec.snr_db == 10.0
    assert rec.ebn0_db == pytest.approx(10.0 - 10.0 * math.log10(4.0))


def test_unknown_axis_is_rejected():
    cfg = _cfg(chain="single_carrier", payload_bits=1000)
    with pytest.raises(ConfigError):
        run_chain(cfg, 4.0, seed=1, x_axis="esn0_db")


def test_record_label_and_metadata_describe_the_run():
    cfg = _cfg(chain="single_carrier", modulation="qpsk", payload_bits=1000,
               code_type="rs")
    rec = run_chain(cfg, 6.0, seed=1)
    assert rec.label == "single_carrier/qpsk/r5/7"
    assert rec.chain == "single_carrier"
    assert rec.modulation == "qpsk"
    assert rec.family == "psk"
    assert rec.code_rate == "5/7"
    assert rec.seed == 1


# ---------------------------------------------------------------------------
# config validation and aliases


def test_legacy_chain_names_map_to_canonical_chains():
    assert _cfg(chain="punctured_bpsk", payload_bits=1000).chain == "single_carrier"
    assert _cfg(chain="ofdm_qam", payload_bits=1000).chain == "ofdm"
    assert _cfg(chain="equalizer_bpsk", payload_bits=1000).chain == "equalizer"


def test_unknown_chain_and_code_type_are_rejected():
    with pytest.raises(ConfigError):
        _cfg(chain="cable", payload_bits=1000)
    with pytest.raises(ConfigError):
        _cfg(chain="single_carrier", payload_bits=1000, code_type="turbo")


def test_tiny_payloads_are_rejected():
    with pytest.raises(ConfigError):
        _cfg(chain="single_carrier", payload_bits=999)


def test_equalizer_chain_requires_binary_modulation():
    with pytest.raises(ConfigError):
        _cfg(chain="equalizer", modulation="qpsk", payload_bits=1000)


def test_equalizer_chain_defaults_to_mlse():
    cfg = _cfg(chain="equalizer", payload_bits=1000)
    assert cfg.equalizer.kind == "mlse"


# ---------------------------------------------------------------------------
# code rate bookkeeping


def test_code_rates_follow_the_configured_code():
    assert _cfg(chain="single_carrier", payload_bits=1000).code_rate == Fraction(1)
    assert _cfg(chain="single_carrier", payload_bits=1000,
                code_type="conv").code_rate == Fraction(1, 2)
    assert _cfg(chain="single_carrier", payload_bits=1000, code_type="conv",
                puncture_mask="111001").code_rate == Fraction(3, 4)
    assert _cfg(chain="single_carrier", payload_bits=1000, code_type="conv",
                puncture_mask="1111101010").code_rate == Fraction(5, 7)
    assert _cfg(chain="single_carrier", payload_bits=1000,
                code_type="rs").code_rate == Fraction(5, 7)


def test_code_rate_text_collapses_unity():
    assert _cfg(chain="single_carrier", payload_bits=1000).code_rate_text() == "1"
    assert _cfg(chain="single_carrier", payload_bits=1000,
                code_type="conv").code_rate_text() == "1/2"


# ---------------------------------------------------------------------------
# chain_from_dict


def test_dict_roundtrip_builds_equivalent_config():
    doc = {
        "chain": "ofdm",
        "modulation": "16qam",
        "payload_bits": 4000,
        "code": {"type": "conv", "constraint_length": 7,
                 "generators": ["133", "171"], "puncture": "111001",
                 "traceback": 72},
        "grid": {"fft_len": 64, "used": 48, "pilots": 4, "cp_len": 16,
                 "sample_rate_hz": 20e6},
    }
    cfg = chain_from_dict(doc)
    assert cfg.chain == "ofdm"
    assert cfg.puncture_mask == "111001"
    assert cfg.traceback_depth == 72
    assert cfg.code_rate == Fraction(3, 4)
    ref = _cfg(chain="ofdm", modulation="16qam", payload_bits=4000,
               code_type="conv", puncture_mask="111001", traceback_depth=72)
    assert run_chain(cfg, 12.0, seed=4) == run_chain(ref, 12.0, seed=4)


def test_dict_with_unknown_keys_is_rejected():
    with pytest.raises(ConfigError):
        chain_from_dict({"chain": "single_carrier", "payload_bits": 1000,
                         "frame_style": "burst"})


def test_dict_equalizer_and_channel_blocks_are_honored():
    doc = {
        "chain": "equalizer",
        "payload_bits": 2000,
        "channel": {"channel_taps": [[0.9, 0.0], [0.4, 0.1]],
                    "estimator_order": 1},
        "equalizer": {"eq_kind": "dfe", "ff_taps": 9, "fb_taps": 2,
                      "step_size": 0.004, "training_len": 400},
    }
    cfg = chain_from_dict(doc)
    assert cfg.channel_taps == (0.9 + 0.0j, 0.4 + 0.1j)
    assert cfg.estimator_order == 1
    assert cfg.equalizer.kind == "dfe"
    assert cfg.equalizer.ff_taps == 9
    assert cfg.equalizer.fb_taps == 2
    assert cfg.equalizer.step_size == 0.004
    assert cfg.equalizer.training_len == 400
    rec = run_chain(cfg, 10.0, seed=8)
    assert rec.bits == 2000


def test_rs_dict_requires_explicit_dimensions():
    cfg = chain_from_dict({"chain": "single_carrier", "modulation": "qpsk",
                           "payload_bits": 3000,
                           "code": {"type": "rs", "m": 3, "n": 7, "k": 5}})
    assert cfg.code_rate == Fraction(5, 7)
    with pytest.raises(KeyError):
        chain_from_dict({"chain": "single_carrier", "payload_bits": 3000,
                         "code": {"type": "rs", "m": 3}})


# ---------------------------------------------------------------------------
# decoder stress paths


def test_rs_chain_survives_heavy_noise_and_reports_errors():
    # deep in the waterfall region many blocks are uncorrectable; the
    # chain must fall back to the received systematic symbols and
    # still produce a full-length record
    cfg = _cfg(chain="single_carrier", modulation="qpsk", payload_bits=6000,
               code_type="rs")
    rec = run_chain(cfg, 0.0, seed=13)
    assert rec.bits == 6000
    assert 0 < rec.errors < 6000


def test_punctured_chain_survives_heavy_noise():
    cfg = _cfg(chain="single_carrier", modulation="bpsk", payload_bits=6000,
               code_type="conv", puncture_mask="1111101010")
    rec = run_chain(cfg, -2.0, seed=13)
    assert rec.bits == 6000
    assert rec.errors > 0
