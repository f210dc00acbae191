"""Monte Carlo sweep engine with deterministic stopping and parallel shards.

A sweep runs one link chain over a list of operating points.  Each
point accumulates independent trials ("shards"), every shard seeded by
``derive_seed(master_seed, point_index, shard_index)``, until either a
minimum error count or a maximum bit budget is reached.  Shards are
dispatched in fixed-size waves of ``seeds_per_point`` trials and the
stopping rules are evaluated only at wave boundaries, so the set of
shards that contribute to a point is a pure function of the
configuration.  Together with the order-independent merge (bits and
errors sum) this makes sweep output bit-identical across runs and
across any number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .chains import ChainConfig, run_chain
from .errors import ConfigError
from .metrics import BerRecord, merge_records
from .rng import derive_seed

__all__ = [
    "SweepConfig",
    "parse_points",
    "sweep_from_dict",
    "resolve_threads",
    "run_sweep",
]

_AXES = ("snr_db", "ebn0_db")


def parse_points(text: str) -> tuple[float, ...]:
    """Expand a ``start:step:stop`` range into an inclusive point list."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"point range must be start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"non-numeric point range {text!r}") from exc
    if not (math.isfinite(start) and math.isfinite(step) and math.isfinite(stop)):
        raise ConfigError(f"point range must be finite, got {text!r}")
    if step <= 0:
        raise ConfigError(f"point range step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"point range stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


@dataclass(frozen=True)
class SweepConfig:
    """Operating points, stopping rules, and seeding for one sweep.

    ``stop_min_errors`` of ``None`` disables the error target so a
    point always runs to the bit budget; ``stop_max_bits`` equal to the
    per-trial payload reproduces fixed-length single-wave runs.
    """

    points: tuple[float, ...]
    x_axis: str = "ebn0_db"
    stop_min_errors: int | None = 100
    stop_max_bits: int = 10_000_000
    seeds_per_point: int = 4
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.x_axis not in _AXES:
            raise ConfigError(f"x_axis must be one of {_AXES}, got {self.x_axis!r}")
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ConfigError("sweep needs at least one point")
        for a, b in zip(pts, pts[1:]):
            if not b > a:
                raise ConfigError(f"points must be strictly increasing ({a} then {b})")
        if self.stop_min_errors is not None and self.stop_min_errors < 1:
            raise ConfigError(
                f"stop_min_errors must be None or >= 1, got {self.stop_min_errors}"
            )
        if self.stop_max_bits < 1:
            raise ConfigError(f"stop_max_bits must be >= 1, got {self.stop_max_bits}")
        if self.seeds_per_point < 1:
            raise ConfigError(
                f"seeds_per_point must be >= 1, got {self.seeds_per_point}"
            )
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be >= 0, got {self.master_seed}")


def sweep_from_dict(data: dict) -> SweepConfig:
    """Build a SweepConfig from parsed JSON (points may be a range string)."""
    if not isinstance(data, dict):
        raise ConfigError(f"sweep config must be an object, got {type(data).__name__}")
    known = {
        "points",
        "x_axis",
        "stop_min_errors",
        "stop_max_bits",
        "seeds_per_point",
        "master_seed",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown sweep config keys: {sorted(unknown)}")
    kwargs = dict(data)
    points = kwargs.get("points")
    if isinstance(points, str):
        kwargs["points"] = parse_points(points)
    elif points is not None:
        kwargs["points"] = tuple(float(p) for p in points)
    else:
        raise ConfigError("sweep config requires 'points'")
    return SweepConfig(**kwargs)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else PHYLAB_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("PHYLAB_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"PHYLAB_THREADS must be an integer, got {env!r}") from exc
        else:
            threads = 1
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    return threads


def _point_record(
    chain: ChainConfig,
    sweep: SweepConfig,
    point_index: int,
    x_value: float,
    executor: ThreadPoolExecutor | None,
) -> BerRecord:
    merged: BerRecord | None = None
    shard = 0
    while True:
        seeds = [
            derive_seed(sweep.master_seed, point_index, shard + j)
            for j in range(sweep.seeds_per_point)
        ]
        if executor is None:
            shard_records = [
                run_chain(chain, x_value, seed, x_axis=sweep.x_axis) for seed in seeds
            ]
        else:
            futures = [
                executor.submit(run_chain, chain, x_value, seed, x_axis=sweep.x_axis)
                for seed in seeds
            ]
            shard_records = [f.result() for f in futures]
        for record in shard_records:
            merged = record if merged is None else merge_records(merged, record)
        shard += sweep.seeds_per_point
        if sweep.stop_min_errors is not None and merged.errors >= sweep.stop_min_errors:
            break
        if merged.bits >= sweep.stop_max_bits:
            break
    return replace(merged, seed=derive_seed(sweep.master_seed, point_index))


def run_sweep(
    chain: ChainConfig,
    sweep: SweepConfig,
    threads: int | None = None,
) -> list[BerRecord]:
    """Run ``chain`` at every sweep point and return one merged record each.

    Every returned record carries both axis values (snr_db and
    ebn0_db), the summed bit and error counts of all contributing
    shards, and a per-point seed ``derive_seed(master_seed,
    point_index)`` identifying the shard family.
    """
    workers = resolve_threads(threads)
    if workers == 1:
        return [
            _point_record(chain, sweep, i, x, None)
            for i, x in enumerate(sweep.points)
        ]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return [
            _point_record(chain, sweep, i, x, executor)
            for i, x in enumerate(sweep.points)
        ]
