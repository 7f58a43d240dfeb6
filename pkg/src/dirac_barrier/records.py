"""Flat run records and their CSV / JSON-lines serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .amplitudes import closed_form_amplitudes, helicity_channels
from .kinematics import EPS_ZONE, Kinematics, barrier_channel, classify_zone
from .phases import IncomingState

FORMATS = ("csv", "jsonl")
UNITARITY_FLAG = 1e-9
ON_SHELL_FLAG = 1e-12

RECORD_FIELDS = (
    "E", "angle", "m", "p1", "p2", "V0", "L",
    "Iplus_mag", "Iminus_mag", "alpha", "beta", "relative_phase",
    "zone", "q1_re", "q1_im",
    "R_re", "R_im", "Rt_re", "Rt_im", "T_re", "T_im",
    "R_plus_re", "R_plus_im", "R_minus_re", "R_minus_im",
    "T_plus_re", "T_plus_im", "T_minus_re", "T_minus_im",
    "r_plus", "r_minus", "t_plus", "t_minus",
    "reflectance", "transmittance",
    "unitarity_residual", "on_shell_residual", "zone_consistent", "flagged",
)  # fmt: skip


def run_record(k: Kinematics, state: IncomingState, eps_zone: float = EPS_ZONE) -> dict:
    """Evaluate one kinematic point and flatten everything into a record."""
    ch = barrier_channel(k, eps_zone)
    amp = closed_form_amplitudes(k, ch)
    channels = helicity_channels(amp, state.I_plus, state.I_minus)
    r_plus, r_minus, t_plus, t_minus = channels.intensities
    on_shell = abs(k.E**2 - k.p1**2 - k.p2**2 - k.m**2) / k.E**2
    zone_consistent = classify_zone(k.E, k.V0, k.p2, k.m, eps_zone) is ch.zone
    unitarity = amp.unitarity_residual
    record = {
        "E": k.E,
        "angle": k.angle,
        "m": k.m,
        "p1": k.p1,
        "p2": k.p2,
        "V0": k.V0,
        "L": k.L,
        "Iplus_mag": state.mag_plus,
        "Iminus_mag": state.mag_minus,
        "alpha": state.alpha,
        "beta": state.beta,
        "relative_phase": state.relative_phase,
        "zone": ch.zone.value,
    }
    for name, value in (
        ("q1", ch.q1),
        ("R", amp.R),
        ("Rt", amp.R_tilde),
        ("T", amp.T),
        ("R_plus", channels.R_plus),
        ("R_minus", channels.R_minus),
        ("T_plus", channels.T_plus),
        ("T_minus", channels.T_minus),
    ):
        record[f"{name}_re"] = value.real
        record[f"{name}_im"] = value.imag
    record.update(
        r_plus=r_plus,
        r_minus=r_minus,
        t_plus=t_plus,
        t_minus=t_minus,
        reflectance=amp.reflectance,
        transmittance=amp.transmittance,
        unitarity_residual=unitarity,
        on_shell_residual=on_shell,
        zone_consistent=zone_consistent,
        flagged=not (unitarity <= UNITARITY_FLAG and on_shell <= ON_SHELL_FLAG and zone_consistent),
    )
    return record


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def render(records: Sequence[Mapping], fmt: str, fields: Optional[Sequence[str]] = None) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if fields is None:
        fields = list(records[0].keys()) if records else list(RECORD_FIELDS)
    if fmt == "jsonl":
        return "".join(json.dumps({f: _json_value(r[f]) for f in fields}) + "\n" for r in records)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in records:
        writer.writerow([_csv_cell(r[f]) for f in fields])
    return buf.getvalue()


def atomic_write_text(path: os.PathLike | str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary sibling and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_records(path: os.PathLike | str, records: Iterable[Mapping], fmt: str, fields: Optional[Sequence[str]] = None) -> None:
    atomic_write_text(path, render(list(records), fmt, fields))


def read_records(path: os.PathLike | str) -> list[dict]:
    """Load a CSV or JSON-lines file written by :func:`write_records`.

    CSV cells come back as strings except numbers, which are parsed to float.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".jsonl" or text.lstrip().startswith("{"):
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, value in row.items():
            try:
                parsed[key] = float(value)
            except ValueError:
                parsed[key] = {"true": True, "false": False}.get(value, value)
        rows.append(parsed)
    return rows
