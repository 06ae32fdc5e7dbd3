"""Configuration files and flat-file artifacts.

Config grammar (INI sections, ``#`` or ``;`` comments, spins indexed from 0)::

    [system]
    spins = 4                 # number of spin-1/2 nuclei, ancilla included
    generate = strong         # optional: strong | weak | missing-pair, replaces the tables below

    [shifts]                  # one entry per spin, Hz
    0 = 310.2
    1 = -120.0
    ...

    [dipolar]                 # one row per spin, comma separated, Hz
    0 = 0, -410.5, 88.0, 12.1
    ...

    [scalar]                  # optional, same layout as [dipolar]; zeros if absent

    [thresholds]              # optional
    intensity = 0.01          # fraction of the strongest line below which a line is unobserved
    peak_epsilon = 1e-9       # relative amplitude under which a peak counts as absent

    [run]                     # optional
    seed = 0                  # seed for generate = strong | weak
    output = out              # artifact directory, relative to the config file
    labeling = labels.csv     # optional labeling override (labeling CSV schema)

CSV schemas (header row first)::

    transitions: transition_id, lower_state, upper_state, frequency_hz, intensity, observed
    levels:      state_index, M, energy_hz
    labeling:    state_index, M, energy_hz, label_bits
    spectrum:    transition_id, frequency_hz, amplitude
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .engine import PEAK_EPSILON, Peak, Spectrum
from .errors import ParseError, ValidationError
from .labeler import Labeling
from .spin_core import DEFAULT_INTENSITY_THRESHOLD, SpinSystem, Transition, TransitionTable

TRANSITION_COLUMNS = ["transition_id", "lower_state", "upper_state", "frequency_hz", "intensity", "observed"]
LEVEL_COLUMNS = ["state_index", "M", "energy_hz"]
LABELING_COLUMNS = ["state_index", "M", "energy_hz", "label_bits"]
SPECTRUM_COLUMNS = ["transition_id", "frequency_hz", "amplitude"]


@dataclass
class RunConfig:
    system: SpinSystem
    intensity_threshold: float = DEFAULT_INTENSITY_THRESHOLD
    peak_epsilon: float = PEAK_EPSILON
    labeling_path: Path | None = None
    output_dir: Path = Path("out")
    seed: int = 0


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    out: dict[tuple[str, str | None], int] = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            out.setdefault((section, None), no)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", line)
        if section is not None and m:
            out.setdefault((section, m.group(1).strip().lower()), no)
    return out


def _float(value: str, field: str, line: int | None) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"not a number: {value!r}", field, line) from None


def parse_config(text: str, base_dir: Path | str | None = None) -> RunConfig:
    """Parse and validate a run configuration."""
    from .instances import missing_pair_system, random_strong_system, weak_system

    base = Path(base_dir) if base_dir is not None else Path(".")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("missing section header", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line=line) from None
    except configparser.DuplicateOptionError as exc:
        raise ParseError("duplicate entry", f"{exc.section}.{exc.option}", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError("duplicate section", exc.section, exc.lineno) from None
    except configparser.Error as exc:
        raise ParseError(str(exc)) from None
    lines = _line_index(text)

    def where(section, key=None):
        return lines.get((section, key), lines.get((section, None)))

    if not cp.has_section("system"):
        raise ParseError("missing [system] section", "system")

    thr = DEFAULT_INTENSITY_THRESHOLD
    eps = PEAK_EPSILON
    if cp.has_section("thresholds"):
        sec = cp["thresholds"]
        if "intensity" in sec:
            thr = _float(sec["intensity"], "thresholds.intensity", where("thresholds", "intensity"))
        if "peak_epsilon" in sec:
            eps = _float(sec["peak_epsilon"], "thresholds.peak_epsilon", where("thresholds", "peak_epsilon"))
    if not 0 <= thr < 1:
        raise ValidationError("intensity threshold must lie in [0, 1)", "thresholds.intensity", where("thresholds", "intensity"))
    if not 0 <= eps < 1:
        raise ValidationError("peak epsilon must lie in [0, 1)", "thresholds.peak_epsilon", where("thresholds", "peak_epsilon"))

    seed = 0
    output = base / "out"
    labeling_path = None
    if cp.has_section("run"):
        sec = cp["run"]
        if "seed" in sec:
            try:
                seed = int(sec["seed"])
            except ValueError:
                raise ParseError(f"seed must be an integer, got {sec['seed']!r}", "run.seed", where("run", "seed")) from None
        if "output" in sec:
            output = base / sec["output"]
        if "labeling" in sec:
            labeling_path = base / sec["labeling"]
            if not labeling_path.exists():
                raise ValidationError(f"labeling file {labeling_path} does not exist", "run.labeling", where("run", "labeling"))

    sysec = cp["system"]
    if "spins" not in sysec:
        raise ParseError("missing spin count", "system.spins", where("system"))
    try:
        n = int(sysec["spins"])
    except ValueError:
        raise ParseError(f"spin count must be an integer, got {sysec['spins']!r}", "system.spins", where("system", "spins")) from None
    if n < 2:
        raise ValidationError("at least two spins are required", "system.spins", where("system", "spins"))

    generate = sysec.get("generate")
    if generate is not None:
        kind = generate.strip().lower()
        if kind == "strong":
            system = random_strong_system(n, seed, threshold=thr)
        elif kind == "weak":
            system = weak_system(n, seed, threshold=thr)
        elif kind == "missing-pair":
            if n != 4:
                raise ValidationError("the missing-pair instance has 4 spins", "system.spins", where("system", "spins"))
            system = missing_pair_system().with_threshold(thr)
        else:
            raise ValidationError(f"unknown generator {generate!r}", "system.generate", where("system", "generate"))
        return RunConfig(system, thr, eps, labeling_path, output, seed)

    if not cp.has_section("shifts"):
        raise ParseError("missing [shifts] section", "shifts")
    shifts = []
    for i in range(n):
        key = str(i)
        if key not in cp["shifts"]:
            raise ParseError(f"missing shift for spin {i}", f"shifts.{i}", where("shifts"))
        shifts.append(_float(cp["shifts"][key], f"shifts.{i}", where("shifts", key)))
    extra = set(cp["shifts"]) - {str(i) for i in range(n)}
    if extra:
        key = sorted(extra)[0]
        raise ParseError(f"unexpected shift entry {key!r} for {n} spins", f"shifts.{key}", where("shifts", key))

    def matrix(name, required):
        if not cp.has_section(name):
            if required:
                raise ParseError(f"missing [{name}] section", name)
            return np.zeros((n, n))
        sec = cp[name]
        m = np.zeros((n, n))
        for i in range(n):
            key = str(i)
            if key not in sec:
                raise ParseError(f"missing row {i}", f"{name}.{i}", where(name))
            cells = [c for c in sec[key].replace(",", " ").split()]
            if len(cells) != n:
                raise ParseError(f"row {i} has {len(cells)} entries, expected {n}", f"{name}.{i}", where(name, key))
            m[i] = [_float(c, f"{name}[{i}][{j}]", where(name, key)) for j, c in enumerate(cells)]
        for i in range(n):
            if m[i, i] != 0:
                raise ValidationError("diagonal must be zero", f"{name}[{i}][{i}]", where(name, str(i)))
            for j in range(i + 1, n):
                if m[i, j] != m[j, i]:
                    raise ValidationError(
                        f"matrix is not symmetric: {m[i, j]!r} != {m[j, i]!r}",
                        f"{name}[{i}][{j}]",
                        where(name, str(j)),
                    )
        return m

    system = SpinSystem(shifts, matrix("dipolar", True), matrix("scalar", False), thr)
    return RunConfig(system, thr, eps, labeling_path, output, seed)


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def format_config(system: SpinSystem, **run) -> str:
    """Config text for an explicit spin system (inverse of ``parse_config``)."""
    n = system.n_total
    out = ["[system]", f"spins = {n}", "", "[shifts]"]
    out += [f"{i} = {float(system.shifts[i])!r}" for i in range(n)]
    for name, m in (("dipolar", system.dipolar), ("scalar", system.scalar)):
        out += ["", f"[{name}]"]
        out += [f"{i} = " + ", ".join(repr(float(x)) for x in m[i]) for i in range(n)]
    out += ["", "[thresholds]", f"intensity = {float(system.intensity_threshold)!r}"]
    if run:
        out += ["", "[run]"] + [f"{k} = {v}" for k, v in run.items()]
    return "\n".join(out) + "\n"


# -- CSV ---------------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows(text: str, header: list[str]) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != header:
        raise ParseError(f"expected columns {header}, got {reader.fieldnames}", line=1)
    return list(reader)


def transitions_to_csv(table: TransitionTable) -> str:
    return _csv_text(
        TRANSITION_COLUMNS,
        [
            [t.tid, t.lower, t.upper, repr(float(t.frequency)), repr(float(t.intensity)), int(t.observed)]
            for t in table.transitions
        ],
    )


def transitions_from_csv(text: str) -> list[Transition]:
    return [
        Transition(
            int(r["transition_id"]),
            int(r["lower_state"]),
            int(r["upper_state"]),
            float(r["frequency_hz"]),
            float(r["intensity"]),
            r["observed"] == "1",
        )
        for r in _rows(text, TRANSITION_COLUMNS)
    ]


def levels_to_csv(table: TransitionTable) -> str:
    return _csv_text(
        LEVEL_COLUMNS, [[s, repr(float(table.mz[s])), repr(float(table.energies[s]))] for s in range(table.dim)]
    )


def labeling_to_csv(labeling: Labeling, table: TransitionTable) -> str:
    return _csv_text(
        LABELING_COLUMNS,
        [
            [s, repr(float(table.mz[s])), repr(float(table.energies[s])), labeling.labels[s]]
            for s in range(table.dim)
        ],
    )


def labels_from_csv(text: str, table: TransitionTable | None = None) -> list[str]:
    """Per-state labels from a labeling CSV, checked against ``table`` when given."""
    rows = _rows(text, LABELING_COLUMNS)
    labels: dict[int, str] = {}
    for no, r in enumerate(rows, start=2):
        try:
            s = int(r["state_index"])
        except ValueError:
            raise ParseError(f"bad state index {r['state_index']!r}", "state_index", no) from None
        bits = r["label_bits"].strip()
        if not bits or set(bits) - {"0", "1"}:
            raise ParseError(f"bad label {bits!r}", "label_bits", no)
        if s in labels:
            raise ValidationError(f"state {s} labeled twice", "state_index", no)
        if table is not None:
            if not 0 <= s < table.dim:
                raise ValidationError(f"state {s} out of range", "state_index", no)
            if abs(float(r["M"]) - table.mz[s]) > 1e-9:
                raise ValidationError(f"M of state {s} does not match the spin system", "M", no)
        labels[s] = bits
    if sorted(labels) != list(range(len(labels))):
        raise ValidationError("state indices must cover 0..dim-1", "state_index")
    return [labels[s] for s in range(len(labels))]


def spectrum_to_csv(spectrum: Spectrum) -> str:
    return _csv_text(SPECTRUM_COLUMNS, [[p.tid, repr(float(p.frequency)), repr(float(p.amplitude))] for p in spectrum.peaks])


def spectrum_from_csv(text: str) -> Spectrum:
    return Spectrum(
        tuple(
            Peak(int(r["transition_id"]), float(r["frequency_hz"]), float(r["amplitude"]))
            for r in _rows(text, SPECTRUM_COLUMNS)
        )
    )


# -- SVG ---------------------------------------------------------------------


def spectrum_to_svg(spectrum: Spectrum, title: str = "", width: int = 720, height: int = 300) -> str:
    """Stick plot, frequency decreasing left to right, signed sticks about a baseline."""
    margin = 40
    base_y = height / 2
    peaks = spectrum.peaks
    freqs = [p.frequency for p in peaks]
    lo, hi = (min(freqs), max(freqs)) if freqs else (0.0, 1.0)
    if hi - lo < 1e-9:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    top = max((abs(p.amplitude) for p in peaks), default=0.0) or 1.0
    scale = (height / 2 - margin) / top

    def x(f):
        return margin + (hi - f) / (hi - lo) * (width - 2 * margin)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{margin}" y="20" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    out.append(
        f'<line x1="{margin}" y1="{base_y:.2f}" x2="{width - margin}" y2="{base_y:.2f}" stroke="black" stroke-width="1"/>'
    )
    for p in peaks:
        px = x(p.frequency)
        py = base_y - p.amplitude * scale
        colour = "#1f4e9c" if p.amplitude >= 0 else "#b22222"
        out.append(
            f'<line x1="{px:.2f}" y1="{base_y:.2f}" x2="{px:.2f}" y2="{py:.2f}" stroke="{colour}" stroke-width="2"/>'
        )
        ty = py - 4 if p.amplitude >= 0 else py + 12
        out.append(
            f'<text x="{px:.2f}" y="{ty:.2f}" font-family="sans-serif" font-size="9" text-anchor="middle">{p.tid}</text>'
        )
    out.append(
        f'<text x="{margin}" y="{height - 8}" font-family="sans-serif" font-size="10">{hi:.1f} Hz</text>'
    )
    out.append(
        f'<text x="{width - margin}" y="{height - 8}" font-family="sans-serif" font-size="10" text-anchor="end">{lo:.1f} Hz</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def to_json(record) -> str:
    return json.dumps(record, indent=2) + "\n"
