"""Record persistence (CSV, JSON) and per-figure plot-data files."""

from __future__ import annotations

import csv
import io
import json
from collections import OrderedDict
from dataclasses import fields
from pathlib import Path

import numpy as np

from .grid import FreqGrid
from .spectral import PhysParams, build_fb, fb_values
from .sweep import EXTRAPOLATED, SweepRecord

SCHEMA = "biphoton-sweep/1"
CSV_COLUMNS = [f.name for f in fields(SweepRecord)]
_INT_COLUMNS = {"n_cavities", "n_points", "n_points_signal"}
_STR_COLUMNS = {"mode", "flag"}


class ExportError(OSError):
    pass


def _open(path, mode="w"):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e.strerror or e}") from e


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _csv_row(rec: SweepRecord) -> list[str]:
    d = rec.to_dict()
    return [_cell(d[c]) for c in CSV_COLUMNS]


class RecordWriter:
    """Streams records to CSV or JSON as they arrive.

    Use as a context manager; JSON output is closed into a valid document
    on exit.
    """

    def __init__(self, path, fmt: str):
        if fmt not in ("csv", "json"):
            raise ValueError(f"streaming supports csv and json, not {fmt!r}")
        self.path, self.fmt = path, fmt
        self.count = 0
        self._fh = None

    def __enter__(self):
        self._fh = io.StringIO() if self.path is None else _open(self.path)
        if self.fmt == "csv":
            self._csv = csv.writer(self._fh, lineterminator="\n")
            self._csv.writerow(CSV_COLUMNS)
        else:
            self._fh.write('{"schema": "%s", "records": [' % SCHEMA)
        return self

    def write(self, rec: SweepRecord):
        try:
            if self.fmt == "csv":
                self._csv.writerow(_csv_row(rec))
            else:
                sep = "," if self.count else ""
                self._fh.write(f"{sep}\n  {json.dumps(rec.to_dict(), allow_nan=False)}")
            self._fh.flush()
        except OSError as e:
            raise ExportError(f"cannot write {self.path}: {e.strerror or e}") from e
        self.count += 1

    def __exit__(self, *exc):
        if self.fmt == "json":
            self._fh.write("\n]}\n")
        if self.path is None:
            self.text = self._fh.getvalue()
        self._fh.close()
        return False


def write_records(records, path, fmt: str = "csv") -> Path:
    records = list(records)
    if not records:
        raise ValueError("no records to export")
    if fmt == "plotdata":
        write_plotdata(records, path)
        return Path(path)
    with RecordWriter(path, fmt) as w:
        for r in records:
            w.write(r)
    return Path(path)


def records_to_text(records, fmt: str) -> str:
    with RecordWriter(None, fmt) as w:
        for r in records:
            w.write(r)
    return w.text


def read_json(path) -> list[SweepRecord]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"{path}: unsupported schema {doc.get('schema')!r}")
    return [SweepRecord.from_dict(d) for d in doc["records"]]


def _parse_cell(col: str, text: str):
    if col in _STR_COLUMNS:
        return text
    if text == "":
        return None
    return int(text) if col in _INT_COLUMNS else float(text)


def read_csv(path) -> list[SweepRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        return [SweepRecord(**{c: _parse_cell(c, t) for c, t in zip(header, row)}) for row in reader]


def read_records(path) -> list[SweepRecord]:
    return read_json(path) if str(path).endswith(".json") else read_csv(path)


# plot data ------------------------------------------------------------------


def _final(records):
    """Last record per parameter tuple (the extrapolated one when a ladder ran)."""
    out = OrderedDict()
    for r in records:
        key = (r.mode, r.gamma3_tau, r.gamma3N, r.gammaC, r.n_cavities)
        if key not in out or r.n_points == EXTRAPOLATED or out[key].n_points != EXTRAPOLATED:
            out[key] = r
    return list(out.values())


def _write_series(path, rows):
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "series"])
        w.writerows(rows)


def _fmt(v) -> str:
    return f"{v:g}"


def write_plotdata(records, out_dir) -> list[Path]:
    """Write per-figure (x, y, series) files into ``out_dir``.

    fig2: S and FWHM against Γ_c; fig3: FWHM against cavity count; fig4:
    joint spectral density heatmap plus an S/K JSON sidecar per panel.
    """
    out_dir = Path(out_dir)
    written = []
    recs = _final(records)
    fig2 = [r for r in recs if r.mode.startswith("fig2")]
    if fig2:
        label = lambda r: f"tau={_fmt(r.gamma3_tau)},gamma3N={_fmt(r.gamma3N)}"
        if any(r.S is not None for r in fig2):
            p = out_dir / "fig2a_entropy.csv"
            _write_series(p, [(repr(r.gammaC), repr(r.S), label(r)) for r in fig2 if r.S is not None])
            written.append(p)
        p = out_dir / "fig2b_fwhm.csv"
        _write_series(p, [(repr(r.gammaC), repr(r.fwhm), label(r)) for r in fig2])
        written.append(p)
    fig3 = [r for r in recs if r.mode == "fig3_cascade"]
    if fig3:
        p = out_dir / "fig3_fwhm.csv"
        label = lambda r: f"gamma3N={_fmt(r.gamma3N)},gammaC={_fmt(r.gammaC)}"
        _write_series(p, [(r.n_cavities, repr(r.fwhm), label(r)) for r in fig3])
        written.append(p)
    for r in (r for r in recs if r.mode == "fig4_jsa"):
        written.extend(write_fig4_panel(r, out_dir))
    single = [r for r in recs if r.mode == "single_point"]
    if single:
        p = out_dir / "single_point.csv"
        with _open(p) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            w.writerows(_csv_row(r) for r in single)
        written.append(p)
    return written


def fig4_density(rec: SweepRecord, n_plot: int = 201, zoom: float | None = None):
    """|f|² of a fig4_jsa record on a plotting lattice.

    The density is normalized with the energy of the simulation grid the
    record was computed on, so it is directly comparable between panels.
    """
    p = PhysParams(rec.gamma3N, rec.gamma3_tau)
    if zoom is None:
        spread = 4 * 2 / rec.gamma3_tau if rec.gamma3_tau > 0 else 0.0
        zoom = min(rec.half_range, spread + 10 * rec.gamma3N)
    n_i = rec.n_points if rec.n_points != EXTRAPOLATED else 4096
    n_s = rec.n_points_signal or n_i
    raw = build_fb(p, FreqGrid(rec.half_range, n_s), FreqGrid(rec.half_range, n_i), normalize=False)
    norm = np.sum(np.abs(raw.values) ** 2) * raw.measure
    axis = np.linspace(-zoom, zoom, n_plot)
    dens = np.abs(fb_values(p, axis[:, None], axis[None, :])) ** 2 / norm
    return axis, dens


def write_fig4_panel(rec: SweepRecord, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    stem = f"fig4_tau{_fmt(rec.gamma3_tau)}_gamma3N{rec.gamma3N:.4g}"
    axis, dens = fig4_density(rec)
    grid_path = out_dir / f"{stem}_density.csv"
    with _open(grid_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["signal_detuning", "idler_detuning", "density"])
        for a, ws in enumerate(axis):
            for b, wi in enumerate(axis):
                w.writerow([repr(float(ws)), repr(float(wi)), repr(float(dens[a, b]))])
    side = out_dir / f"{stem}.json"
    with _open(side) as fh:
        json.dump({"schema": SCHEMA, "record": rec.to_dict(), "S": rec.S, "K": rec.K}, fh, indent=2)
        fh.write("\n")
    return [grid_path, side]
