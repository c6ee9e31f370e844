"""Model container: a versioned header plus one record per wedge entry.

Every float is serialized as a hexadecimal float literal (float.hex), so a
write/read round trip is bit-exact; the lattice geometry is stored the same
way, which keeps cell assignment, and therefore evaluation, bit-identical
after reload. Files are written atomically (temp file + rename).

Layout (text, one field per line, records after the ``entries`` line):

    SYMWEDGE-MODEL 1
    kind sym|antisym-c1|antisym-c2
    d / N / cells          integers
    delta / lo / hi        hex floats
    mode indicator|smooth
    w hex float or -
    tau hex float or -
    entries K
    <N*d site indices> <coefficient hex> [<d direction components hex>]
"""

from __future__ import annotations

import os
import tempfile
from typing import Union

from .approx_antisym import MODE_PROJECTED, MODE_RANK, AntisymTabulator
from .approx_sym import MODE_INDICATOR, MODE_SMOOTH, BuildStats, SymmetricTabulator
from .errors import ConfigError
from .lattice import LatticeSpec, WedgeKey, wedge_size

__all__ = ["MAGIC", "FORMAT_VERSION", "save_model", "load_model", "write_text_atomic"]

MAGIC = "SYMWEDGE-MODEL"
FORMAT_VERSION = 1

Tabulator = Union[SymmetricTabulator, AntisymTabulator]

_KIND_SYM = "sym"
_KIND_RANK = "antisym-c1"
_KIND_PROJECTED = "antisym-c2"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partial file and a crashed writer leaves the old content intact."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _kind_of(tab: Tabulator) -> str:
    if isinstance(tab, SymmetricTabulator):
        return _KIND_SYM
    return _KIND_RANK if tab.mode == MODE_RANK else _KIND_PROJECTED


def save_model(path: str, tab: Tabulator) -> None:
    spec = tab.spec
    smooth = tab.smooth_width
    tau = getattr(tab, "tau", None)
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"kind {_kind_of(tab)}",
        f"d {spec.d}",
        f"N {tab.N}",
        f"cells {spec.cells_per_dim}",
        f"delta {spec.delta.hex()}",
        f"lo {spec.origin.hex()}",
        f"hi {spec.top.hex()}",
        f"mode {MODE_SMOOTH if smooth is not None else MODE_INDICATOR}",
        f"w {smooth.hex() if smooth is not None else '-'}",
        f"tau {tau.hex() if tau is not None else '-'}",
        f"entries {len(tab.table)}",
    ]
    directions = getattr(tab, "directions", None)
    for zs, coeff in tab.table.items():
        fields = [str(i) for site in zs for i in site]
        fields.append(coeff.hex())
        if directions is not None:
            fields.extend(c.hex() for c in directions[zs])
        lines.append(" ".join(fields))
    write_text_atomic(path, "\n".join(lines) + "\n")


def _field(lines: list[str], idx: int, key: str) -> str:
    if idx >= len(lines):
        raise ConfigError(f"model file truncated before {key!r}")
    name, _, value = lines[idx].partition(" ")
    if name != key:
        raise ConfigError(f"expected field {key!r} on line {idx + 1}, found {name!r}")
    return value


def load_model(path: str) -> Tabulator:
    with open(path, "r") as handle:
        lines = [line.rstrip("\n") for line in handle]
    if not lines or lines[0] != f"{MAGIC} {FORMAT_VERSION}":
        raise ConfigError(f"{path}: not a {MAGIC} version-{FORMAT_VERSION} file")
    kind = _field(lines, 1, "kind")
    if kind not in (_KIND_SYM, _KIND_RANK, _KIND_PROJECTED):
        raise ConfigError(f"unknown model kind {kind!r}")
    d = int(_field(lines, 2, "d"))
    N = int(_field(lines, 3, "N"))
    cells = int(_field(lines, 4, "cells"))
    delta = float.fromhex(_field(lines, 5, "delta"))
    lo = float.fromhex(_field(lines, 6, "lo"))
    hi = float.fromhex(_field(lines, 7, "hi"))
    mode = _field(lines, 8, "mode")
    if mode not in (MODE_INDICATOR, MODE_SMOOTH):
        raise ConfigError(f"unknown mode {mode!r}")
    w_raw = _field(lines, 9, "w")
    smooth = None if w_raw == "-" else float.fromhex(w_raw)
    tau_raw = _field(lines, 10, "tau")
    tau = None if tau_raw == "-" else float.fromhex(tau_raw)
    entries = int(_field(lines, 11, "entries"))
    records = [line for line in lines[12:] if line]
    if len(records) != entries:
        raise ConfigError(f"expected {entries} records, found {len(records)}")

    spec = LatticeSpec(delta=delta, d=d, cells_per_dim=cells, origin=lo, top=hi)
    want_direction = kind == _KIND_PROJECTED
    table: dict[WedgeKey, float] = {}
    directions: dict[WedgeKey, tuple[float, ...]] = {}
    n_index = N * d
    for line in records:
        fields = line.split(" ")
        expected = n_index + 1 + (d if want_direction else 0)
        if len(fields) != expected:
            raise ConfigError(f"bad record ({len(fields)} fields, expected {expected}): {line!r}")
        flat = [int(v) for v in fields[:n_index]]
        zs = tuple(tuple(flat[k * d : (k + 1) * d]) for k in range(N))
        table[zs] = float.fromhex(fields[n_index])
        if want_direction:
            directions[zs] = tuple(float.fromhex(v) for v in fields[n_index + 1 :])

    stats = BuildStats(
        evaluations=0,
        wedge_count=wedge_size(spec, N),
        coarse_lattice=delta > N ** (-1.0 / d),
        wall_time_s=0.0,
    )
    if kind == _KIND_SYM:
        return SymmetricTabulator(
            spec, N, mode, smooth, table, stats
        )
    return AntisymTabulator(
        spec,
        N,
        MODE_RANK if kind == _KIND_RANK else MODE_PROJECTED,
        tau,
        smooth,
        table,
        directions if want_direction else None,
        stats,
    )
