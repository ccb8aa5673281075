"""Ground-motion ingestion, peaks, response spectra, Froude scaling.

Supported record formats:
  two_column_csv            "t,a" rows; '#' comment lines may carry
                            "units: g" / "units: m/s2" (default m/s2)
  single_column_with_dt_header
                            header lines "dt = 0.01" (required) and
                            "units = g" (default m/s2), one sample per row
  peer_fixed_width          PEER/NGA style: header with "NPTS= n, DT= x SEC",
                            then whitespace-separated samples in g
"""

from __future__ import annotations

import io
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from tanksim import kernels
from tanksim.model import ScaleModel

G0 = 9.80665  # standard gravity for unit conversion, m/s^2

TWO_COLUMN_CSV = "two_column_csv"
SINGLE_COLUMN = "single_column_with_dt_header"
PEER_FIXED_WIDTH = "peer_fixed_width"
FORMATS = (TWO_COLUMN_CSV, SINGLE_COLUMN, PEER_FIXED_WIDTH)


class RecordFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GroundMotion:
    dt: float                 # s
    accel: np.ndarray         # m/s^2
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "accel", np.asarray(self.accel, dtype=float))
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.accel.size == 0:
            raise ValueError("empty acceleration series")
        if not np.all(np.isfinite(self.accel)):
            raise ValueError("acceleration series contains non-finite samples")

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.accel.size)

    @property
    def duration(self) -> float:
        return self.dt * (self.accel.size - 1)


@dataclass(frozen=True)
class PeakValues:
    pga: float                # m/s^2
    pgv: float                # m/s
    pgd: float                # m


def _unit_factor(units: str) -> float:
    u = units.strip().lower().replace("**", "").replace("^", "")
    if u in ("g", "[g]"):
        return G0
    if u in ("m/s2", "m/s/s", "m/sec2", "mps2"):
        return 1.0
    raise RecordFormatError(f"unsupported units {units!r} (use g or m/s2)")


_UNITS_RE = re.compile(r"units\s*[:=]\s*(\S+)", re.IGNORECASE)
_DT_RE = re.compile(r"\bdt\s*[:=]\s*([0-9.eE+-]+)", re.IGNORECASE)
_PEER_RE = re.compile(
    r"NPTS\s*=?\s*(\d+)[,\s]+DT\s*=?\s*([0-9.eE+-]+)", re.IGNORECASE)


def parse_record(source, fmt: str, name: str = "") -> GroundMotion:
    """Parse a byte or text stream into a GroundMotion in m/s^2."""
    if fmt not in FORMATS:
        raise RecordFormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if isinstance(source, (bytes, bytearray)):
        text = source.decode()
    elif isinstance(source, str):
        text = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        raw = source.read()
        text = raw.decode() if isinstance(raw, (bytes, bytearray)) else raw
    else:
        raise TypeError("source must be bytes, text, or a readable stream")
    lines = text.splitlines()

    if fmt == TWO_COLUMN_CSV:
        return _parse_two_column(lines, name)
    if fmt == SINGLE_COLUMN:
        return _parse_single_column(lines, name)
    return _parse_peer(lines, name)


def _parse_two_column(lines, name):
    factor = 1.0
    t, a = [], []
    for idx, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = _UNITS_RE.search(s)
            if m:
                factor = _unit_factor(m.group(1))
            continue
        parts = [p for p in re.split(r"[,\s]+", s) if p]
        if len(parts) != 2:
            raise RecordFormatError(f"line {idx}: expected 't,a', got {line!r}")
        try:
            t.append(float(parts[0]))
            a.append(float(parts[1]))
        except ValueError:
            raise RecordFormatError(f"line {idx}: malformed number in {line!r}")
    if len(a) < 2:
        raise RecordFormatError("record needs at least two samples")
    t = np.asarray(t)
    steps = np.diff(t)
    dt = float(steps[0])
    if dt <= 0 or np.any(np.abs(steps - dt) > 1e-6):
        raise RecordFormatError("inconsistent sampling interval (> 1e-6 s jitter)")
    return GroundMotion(dt=dt, accel=factor * np.asarray(a), name=name)


def _parse_single_column(lines, name):
    factor = 1.0
    dt = None
    a = []
    for idx, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#") or "=" in s or ":" in s:
            m = _DT_RE.search(s)
            if m:
                dt = float(m.group(1))
            m = _UNITS_RE.search(s)
            if m:
                factor = _unit_factor(m.group(1))
            if s.startswith("#") or _DT_RE.search(s) or _UNITS_RE.search(s):
                continue
        try:
            a.append(float(s))
        except ValueError:
            raise RecordFormatError(f"line {idx}: malformed sample {line!r}")
    if dt is None:
        raise RecordFormatError("missing 'dt = ...' header")
    if not a:
        raise RecordFormatError("empty record")
    return GroundMotion(dt=dt, accel=factor * np.asarray(a), name=name)


def _parse_peer(lines, name):
    dt = None
    npts = None
    a = []
    for idx, line in enumerate(lines, start=1):
        m = _PEER_RE.search(line)
        if m and dt is None:
            npts = int(m.group(1))
            dt = float(m.group(2))
            continue
        if dt is None:
            continue  # still in the free-text header
        for tok in line.split():
            try:
                a.append(float(tok))
            except ValueError:
                raise RecordFormatError(f"line {idx}: malformed value {tok!r}")
    if dt is None:
        raise RecordFormatError("missing 'NPTS= ..., DT= ...' header")
    if not a:
        raise RecordFormatError("empty record")
    if npts is not None and npts != len(a):
        raise RecordFormatError(f"header says NPTS={npts} but read {len(a)} samples")
    return GroundMotion(dt=dt, accel=G0 * np.asarray(a), name=name)


def write_record(gm: GroundMotion, fmt: str, units: str = "m/s2") -> str:
    """Render a record in one of the parseable formats (round-trip exact)."""
    factor = _unit_factor(units)
    a = gm.accel / factor
    if fmt == TWO_COLUMN_CSV:
        head = f"# units: {units}\n"
        rows = "\n".join(f"{float(i * gm.dt)!r},{float(x)!r}"
                         for i, x in enumerate(a))
        return head + rows + "\n"
    if fmt == SINGLE_COLUMN:
        head = f"dt = {float(gm.dt)!r}\nunits = {units}\n"
        return head + "\n".join(repr(float(x)) for x in a) + "\n"
    if fmt == PEER_FIXED_WIDTH:
        a = gm.accel / G0
        head = (f"{gm.name}\nACCELERATION TIME SERIES IN UNITS OF G\n"
                f"NPTS= {a.size}, DT= {float(gm.dt)!r} SEC\n")
        rows = []
        for i in range(0, a.size, 5):
            rows.append("  ".join(f"{x: .16E}" for x in a[i:i + 5]))
        return head + "\n".join(rows) + "\n"
    raise RecordFormatError(f"unknown format {fmt!r}")


def froude_scale(gm: GroundMotion, scale: ScaleModel) -> GroundMotion:
    """Time-compress by sqrt(length_ratio); amplitudes unchanged."""
    suffix = f" (froude {scale.length_ratio:g})" if scale.length_ratio != 1 else ""
    return replace(gm, dt=gm.dt * scale.time_ratio, name=gm.name + suffix)


def _cumtrapz(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * dt * (y[1:] + y[:-1]))
    return out


def integrate(gm: GroundMotion, baseline_correct: bool = True):
    """Velocity and displacement by trapezoidal integration.

    Baseline correction removes the least-squares straight line from the
    velocity series before the second integration; it never touches the
    acceleration itself, so PGA is unaffected.
    """
    if gm.accel.size < 3:
        raise ValueError("record shorter than 3 samples")
    v = _cumtrapz(gm.accel, gm.dt)
    if baseline_correct:
        t = gm.times
        coef = np.polyfit(t, v, 1)
        v = v - np.polyval(coef, t)
    d = _cumtrapz(v, gm.dt)
    return v, d


def peaks(gm: GroundMotion, baseline_correct: bool = True) -> PeakValues:
    v, d = integrate(gm, baseline_correct=baseline_correct)
    return PeakValues(
        pga=float(np.max(np.abs(gm.accel))),
        pgv=float(np.max(np.abs(v))),
        pgd=float(np.max(np.abs(d))),
    )


def _resample(gm: GroundMotion, dt_new: float) -> np.ndarray:
    if dt_new >= gm.dt:
        return gm.accel
    t_old = gm.times
    n = int(math.ceil(t_old[-1] / dt_new)) + 1
    return np.interp(dt_new * np.arange(n), t_old, gm.accel)


def _spectrum_one(gm, xi, period):
    dt = min(gm.dt, period / 20.0)
    a = _resample(gm, dt)
    omega = 2.0 * math.pi / period
    u = kernels.sdof_newmark(a, dt, omega, xi, 0.25, 0.5)
    return omega * omega * float(np.max(np.abs(u)))


def response_spectrum(gm: GroundMotion, damping: float, periods,
                      jobs: int = 1) -> np.ndarray:
    """Pseudo-acceleration spectrum omega^2 |u|max via Newmark SDOF sweeps.

    Results are ordered like `periods` regardless of `jobs`.
    """
    if not 0 <= damping < 1:
        raise ValueError(f"damping ratio must lie in [0, 1), got {damping}")
    periods = np.asarray(periods, dtype=float)
    if np.any(periods <= 0):
        raise ValueError("all periods must be > 0")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(lambda T: _spectrum_one(gm, damping, T), periods))
    else:
        out = [_spectrum_one(gm, damping, T) for T in periods]
    return np.asarray(out)
