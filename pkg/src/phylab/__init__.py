"""phylab: a physical-layer link simulation toolkit.

Library for forward error correction (convolutional and Reed-Solomon),
linear modulation, OFDM framing, channel and noise models, adaptive and
sequence equalizers, link metrics, and a deterministic Monte Carlo
sweep harness with a command line front end.
"""

from ._backend import ACTIVE_BACKEND
from .chains import ChainConfig, chain_from_dict, run_chain
from .emit import emit, read_csv, read_json, write_csv, write_json, write_plotdata
from .metrics import BerRecord, EvmReport, count_errors, evm, merge_records, periodogram
from .sweep import SweepConfig, run_sweep, sweep_from_dict

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "BerRecord",
    "ChainConfig",
    "EvmReport",
    "SweepConfig",
    "__version__",
    "chain_from_dict",
    "count_errors",
    "emit",
    "evm",
    "merge_records",
    "periodogram",
    "read_csv",
    "read_json",
    "run_chain",
    "run_sweep",
    "sweep_from_dict",
    "write_csv",
    "write_json",
    "write_plotdata",
]
