"""Readers for the three CSV dialects the simulation CLI writes.

Standard rows carry one measurement each under a bracketed param label;
kernel rows carry one distribution point per line; geodesic traces carry
one lattice step per line.  Headers are checked up front and a mismatch
names the missing columns, so a figure aborts before drawing anything
from a file it half-understands.  Inputs are opened read-only and never
rewritten.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

STANDARD_HEADER = (
    "experiment", "N", "tau", "delta", "kappa",
    "param", "value", "stderr", "n", "seed0",
)
KERNEL_REQUIRED = ("S", "cdf")
GEODESIC_HEADER = ("step", "i", "j")
CENSORED = "censored"


class SchemaError(ValueError):
    """A CSV does not match the documented schema for the figure kind."""


class ConsistencyError(RuntimeError):
    """A value recomputed from the CSV contradicts the value stored in it."""


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header row") from None
        body = [row for row in reader if row]
    return header, body


def _require(path: Path, header: list[str], required: tuple[str, ...]) -> None:
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")


@dataclass(frozen=True)
class Param:
    """A parsed param label: tag[flag;key=value;...]."""

    tag: str
    flags: tuple[str, ...]
    fields: dict

    def field(self, key: str) -> float:
        if key not in self.fields:
            raise SchemaError(f"param '{self.tag}' lacks a {key}= component")
        return self.fields[key]


def parse_param(label: str) -> Param:
    if "[" not in label:
        return Param(tag=label, flags=(), fields={})
    if not label.endswith("]"):
        raise SchemaError(f"malformed param label {label!r}")
    tag, inner = label[:-1].split("[", 1)
    flags: list[str] = []
    fields: dict = {}
    for piece in inner.split(";"):
        if "=" in piece:
            key, raw = piece.split("=", 1)
            try:
                fields[key] = float(raw)
            except ValueError:
                flags.append(piece)
        else:
            flags.append(piece)
    return Param(tag=tag, flags=tuple(flags), fields=fields)


@dataclass(frozen=True)
class Row:
    """One standard-dialect measurement; value is None when censored."""

    experiment: str
    N: int
    tau: float
    delta: float
    kappa: float
    param: Param
    label: str
    value: float | None
    stderr: float | None
    n: int
    seed0: int

    @property
    def censored(self) -> bool:
        return self.value is None


def read_standard(path: Path) -> list[Row]:
    header, body = _read_rows(path)
    _require(path, header, STANDARD_HEADER)
    if not body:
        raise SchemaError(f"{path}: header only, no data rows")
    idx = {name: header.index(name) for name in STANDARD_HEADER}
    rows = []
    for raw in body:
        if len(raw) != len(header):
            raise SchemaError(f"{path}: row width {len(raw)} != header width {len(header)}")
        cell = lambda name: raw[idx[name]]
        value_text = cell("value")
        stderr_text = cell("stderr")
        rows.append(
            Row(
                experiment=cell("experiment"),
                N=int(cell("N")),
                tau=float(cell("tau")),
                delta=float(cell("delta")),
                kappa=float(cell("kappa")),
                param=parse_param(cell("param")),
                label=cell("param"),
                value=None if value_text == CENSORED else float(value_text),
                stderr=float(stderr_text) if stderr_text else None,
                n=int(cell("n")),
                seed0=int(cell("seed0")),
            )
        )
    return rows


def read_standard_many(paths: tuple[Path, ...]) -> list[Row]:
    rows: list[Row] = []
    for p in paths:
        rows.extend(read_standard(p))
    return rows


@dataclass(frozen=True)
class KernelRow:
    S: float
    cdf: float
    truncation_bound: float | None
    quad_points: int | None
    stderr: float | None


def read_kernel(path: Path) -> list[KernelRow]:
    """Kernel dialect: S and cdf required, anything else optional.

    The relaxed schema lets a hand-made Monte Carlo table (S, cdf, stderr)
    ride on the same reader as the quadrature output it overlays.
    """
    header, body = _read_rows(path)
    _require(path, header, KERNEL_REQUIRED)
    if not body:
        raise SchemaError(f"{path}: header only, no data rows")
    idx = {name: header.index(name) for name in header}

    def opt(raw: list[str], name: str, conv):
        if name not in idx:
            return None
        text = raw[idx[name]]
        return conv(text) if text else None

    return [
        KernelRow(
            S=float(raw[idx["S"]]),
            cdf=float(raw[idx["cdf"]]),
            truncation_bound=opt(raw, "truncation_bound", float),
            quad_points=opt(raw, "quad_points", int),
            stderr=opt(raw, "stderr", float),
        )
        for raw in body
    ]


def read_geodesic(path: Path) -> list[tuple[int, int, int]]:
    header, body = _read_rows(path)
    _require(path, header, GEODESIC_HEADER)
    if not body:
        raise SchemaError(f"{path}: header only, no data rows")
    idx = {name: header.index(name) for name in GEODESIC_HEADER}
    return [(int(r[idx["step"]]), int(r[idx["i"]]), int(r[idx["j"]])) for r in body]


def sidecar_path(csv_path: Path) -> Path:
    # Mirrors the writer's rule: swap a .csv suffix, append otherwise.
    if csv_path.suffix == ".csv":
        return csv_path.with_suffix(".json")
    return Path(str(csv_path) + ".json")


def read_sidecar(csv_path: Path) -> dict:
    side = sidecar_path(csv_path)
    if not side.exists():
        raise SchemaError(f"{csv_path}: sidecar {side.name} not found next to the CSV")
    with open(side) as fh:
        return json.load(fh)
