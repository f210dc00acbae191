"""Serialization of BER records (CSV, JSON, plot data) and config loading.

The CSV contract uses the exact column order

    chain, modulation, family, code_rate, snr_db, ebn0_db,
    bits, errors, ber, seed

with floats written via ``repr`` so parsing them back reproduces the
original values bit-for-bit.  JSON mirrors the same field names inside
a ``{"records": [...]}`` document validated against the shipped schema;
unset or non-finite axis values serialize as ``null``.  Plot data is a
text format for external plotting tools: one ``# label`` header per
series followed by ``x y`` rows, where a BER of exactly zero leaves the
y column blank so log-scale plots skip the point instead of clipping.
"""

from __future__ import annotations

import csv
import json
import math
from importlib import resources

import jsonschema

from .chains import ChainConfig, chain_from_dict
from .errors import ConfigError
from .metrics import BerRecord
from .sweep import SweepConfig, sweep_from_dict

__all__ = [
    "CSV_COLUMNS",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "write_plotdata",
    "emit",
    "load_schema",
    "validate_config_dict",
    "load_config",
]

CSV_COLUMNS = (
    "chain",
    "modulation",
    "family",
    "code_rate",
    "snr_db",
    "ebn0_db",
    "bits",
    "errors",
    "ber",
    "seed",
)

_FORMATS = ("csv", "json", "plotdata")


def _require_records(records) -> list[BerRecord]:
    records = list(records)
    if not records:
        raise ConfigError("cannot emit an empty record list")
    return records


def _float_cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _axis_from_cell(cell: str) -> float | None:
    return None if cell == "" else float(cell)


def _label_for(chain: str, modulation: str, code_rate: str) -> str:
    return f"{chain}/{modulation}/r{code_rate}" if chain else ""


def write_csv(records, path) -> None:
    records = _require_records(records)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.chain,
                    r.modulation,
                    r.family,
                    r.code_rate,
                    _float_cell(r.snr_db),
                    _float_cell(r.ebn0_db),
                    str(r.bits),
                    str(r.errors),
                    repr(r.ber),
                    str(r.seed),
                ]
            )


def read_csv(path) -> list[BerRecord]:
    """Parse a record CSV back into BerRecord objects (exact round-trip)."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV, expected header") from None
        if tuple(header) != CSV_COLUMNS:
            raise ConfigError(
                f"{path}: bad CSV header {header!r}, expected {list(CSV_COLUMNS)}"
            )
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise ConfigError(
                    f"{path}:{lineno}: expected {len(CSV_COLUMNS)} cells, got {len(row)}"
                )
            cells = dict(zip(CSV_COLUMNS, row))
            record = BerRecord(
                bits=int(cells["bits"]),
                errors=int(cells["errors"]),
                seed=int(cells["seed"]),
                label=_label_for(cells["chain"], cells["modulation"], cells["code_rate"]),
                snr_db=_axis_from_cell(cells["snr_db"]),
                ebn0_db=_axis_from_cell(cells["ebn0_db"]),
                chain=cells["chain"],
                modulation=cells["modulation"],
                family=cells["family"],
                code_rate=cells["code_rate"],
            )
            if float(cells["ber"]) != record.ber:
                raise ConfigError(
                    f"{path}:{lineno}: ber column {cells['ber']} does not equal "
                    f"errors/bits = {record.ber!r}"
                )
            records.append(record)
    if not records:
        raise ConfigError(f"{path}: CSV contains no records")
    return records


def _json_axis(value: float | None):
    if value is None or not math.isfinite(value):
        return None
    return value


def _record_to_json(r: BerRecord) -> dict:
    return {
        "chain": r.chain,
        "modulation": r.modulation,
        "family": r.family,
        "code_rate": r.code_rate,
        "snr_db": _json_axis(r.snr_db),
        "ebn0_db": _json_axis(r.ebn0_db),
        "bits": r.bits,
        "errors": r.errors,
        "ber": r.ber,
        "seed": r.seed,
    }


def load_schema(name: str) -> dict:
    """Load one of the schemas shipped inside the package."""
    text = resources.files("phylab").joinpath(f"schemas/{name}").read_text()
    return json.loads(text)


def write_json(records, path) -> None:
    records = _require_records(records)
    doc = {"records": [_record_to_json(r) for r in records]}
    jsonschema.validate(doc, load_schema("records.schema.json"))
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_json(path) -> list[BerRecord]:
    with open(path, "r") as fh:
        doc = json.load(fh)
    jsonschema.validate(doc, load_schema("records.schema.json"))
    records = []
    for item in doc["records"]:
        record = BerRecord(
            bits=item["bits"],
            errors=item["errors"],
            seed=item["seed"],
            label=_label_for(item["chain"], item["modulation"], item["code_rate"]),
            snr_db=item["snr_db"],
            ebn0_db=item["ebn0_db"],
            chain=item["chain"],
            modulation=item["modulation"],
            family=item["family"],
            code_rate=item["code_rate"],
        )
        records.append(record)
    return records


def write_plotdata(records, path, x_axis: str | None = None) -> None:
    """Write labeled x/y column groups, one group per record label."""
    records = _require_records(records)
    if x_axis is None:
        x_axis = "ebn0_db" if records[0].ebn0_db is not None else "snr_db"
    if x_axis not in ("snr_db", "ebn0_db"):
        raise ConfigError(f"x_axis must be snr_db or ebn0_db, got {x_axis!r}")
    groups: dict[str, list[BerRecord]] = {}
    for r in records:
        groups.setdefault(r.label, []).append(r)
    with open(path, "w") as fh:
        for gi, (label, group) in enumerate(groups.items()):
            if gi:
                fh.write("\n")
            fh.write(f"# {label}\n")
            for r in group:
                x = getattr(r, x_axis)
                if x is None:
                    raise ConfigError(
                        f"record {r.label!r} has no {x_axis} value for plot data"
                    )
                y = repr(r.ber) if r.errors else ""
                fh.write(f"{x!r} {y}\n")


def emit(records, fmt: str, path) -> None:
    """Write records to ``path`` in one of csv | json | plotdata."""
    if fmt not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}, got {fmt!r}")
    if fmt == "csv":
        write_csv(records, path)
    elif fmt == "json":
        write_json(records, path)
    else:
        write_plotdata(records, path)


def validate_config_dict(doc: dict) -> None:
    """Validate a parsed sweep config document against the shipped schema."""
    try:
        jsonschema.validate(doc, load_schema("sweep_config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match schema: {exc.message}") from exc


def load_config(path, chain_override: str | None = None) -> tuple[ChainConfig, SweepConfig]:
    """Load a ``{"chain": ..., "sweep": ...}`` JSON config file.

    ``chain_override`` replaces the chain name from the file (the CLI's
    --chain flag); all other chain parameters come from the file.
    """
    with open(path, "r") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be an object")
    if chain_override is not None:
        chain_section = dict(doc.get("chain") or {})
        chain_section["chain"] = chain_override
        doc = dict(doc, chain=chain_section)
    validate_config_dict(doc)
    return chain_from_dict(doc["chain"]), sweep_from_dict(doc["sweep"])
