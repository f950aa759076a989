"""Command-line front end: ``epdyn <subcommand> [options]``.

Exit codes: 0 success, 1 domain or convergence error, 2 usage error.
Options may also come from a plain ``key = value`` file given by
``--config``; explicit flags win.  ``EPDYN_WORKERS`` overrides the worker
count and nothing else.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import cpoly, periods, spectrum, trajectory, weierstrass
from ._errors import ConvergenceError, DomainError
from .periods import INF, Cycle

WORKERS_ENV = "EPDYN_WORKERS"
# keys that do not change any computed number; kept out of the JSON echo
_NOT_ECHOED = {"workers", "json", "csv", "svg", "config", "command"}


def tool_version() -> str:
    try:
        return metadata.version("epdyn")
    except metadata.PackageNotFoundError:
        return "0.0.0"


# --- emitters -----------------------------------------------------------------


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def emit_trajectory_csv(traj: trajectory.Trajectory, path) -> None:
    if traj is None or len(traj) == 0:
        raise DomainError("empty trajectory")
    lines = ["t,z_re,z_im,zdot_re,zdot_im,energy_residual"]
    for t, z, w, r in zip(traj.t, traj.z, traj.zdot, traj.energy_residual):
        lines.append(",".join(_f17(v) for v in (t, z.real, z.imag, w.real, w.imag, r)))
    _write(path, "\n".join(lines) + "\n")


def read_trajectory_csv(path) -> dict:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {"t": data[:, 0], "z": data[:, 1] + 1j * data[:, 2],
            "zdot": data[:, 3] + 1j * data[:, 4], "energy_residual": data[:, 5]}


def to_jsonable(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "value") and hasattr(x, "name"):  # enum
        return x.value
    raise TypeError(f"cannot serialize {type(x).__name__}")


def emit_records_json(records, path, *, command: str = "", config: Optional[dict] = None) -> None:
    doc = {"tool": "epdyn", "version": tool_version(), "command": command,
           "config": to_jsonable(config or {}), "records": to_jsonable(list(records))}
    _write(path, json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DomainError(f"cannot write {path}: {exc.strerror}") from None


@dataclass
class SvgScene:
    """Minimal SVG figure in the complex plane; Im z points up."""

    bounds: tuple  # (xmin, xmax, ymin, ymax)
    paths: list = field(default_factory=list)  # (points, stroke)
    markers: list = field(default_factory=list)  # (point, label)
    annotations: list = field(default_factory=list)  # (point, text)
    width: int = 480

    def add_path(self, z: Iterable[complex], stroke: str = "#1f4e9c") -> None:
        pts = [complex(p) for p in z]
        if not all(math.isfinite(p.real) and math.isfinite(p.imag) for p in pts):
            raise DomainError("non-finite path coordinates")
        self.paths.append((pts, stroke))

    def add_marker(self, z: complex, label: str = "") -> None:
        self.markers.append((complex(z), label))
        x0, x1, y0, y1 = self.bounds
        pad = 0.05 * max(x1 - x0, y1 - y0)
        self.bounds = (min(x0, z.real - pad), max(x1, z.real + pad),
                       min(y0, z.imag - pad), max(y1, z.imag + pad))

    @classmethod
    def around(cls, points: Sequence[complex], margin: float = 0.6):
        pts = list(points) or [0j]
        r = max(max(abs(p) for p in pts), 1e-3) * (1 + margin)
        return cls((-r, r, -r, r))

    def _xy(self, z):
        x0, x1, y0, y1 = self.bounds
        s = self.width / (x1 - x0)
        return (z.real - x0) * s, (y1 - z.imag) * s

    def _clip(self, pts):
        x0, x1, y0, y1 = self.bounds
        w, h = x1 - x0, y1 - y0
        lo, hi = complex(x0 - w, y0 - h), complex(x1 + w, y1 + h)
        runs, cur = [], []
        for p in pts:
            if lo.real <= p.real <= hi.real and lo.imag <= p.imag <= hi.imag:
                cur.append(p)
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        return runs

    def render(self) -> str:
        x0, x1, y0, y1 = self.bounds
        s = self.width / (x1 - x0)
        H = (y1 - y0) * s
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{H:.6g}" '
               f'viewBox="0 0 {self.width} {H:.6g}">',
               '<rect width="100%" height="100%" fill="white"/>']
        ax = []
        if x0 < 0 < x1:
            a, b = self._xy(complex(0, y0)), self._xy(complex(0, y1))
            ax.append(f'<line x1="{a[0]:.6g}" y1="{a[1]:.6g}" x2="{b[0]:.6g}" y2="{b[1]:.6g}"/>')
        if y0 < 0 < y1:
            a, b = self._xy(complex(x0, 0)), self._xy(complex(x1, 0))
            ax.append(f'<line x1="{a[0]:.6g}" y1="{a[1]:.6g}" x2="{b[0]:.6g}" y2="{b[1]:.6g}"/>')
        if ax:
            out.append('<g stroke="#999" stroke-width="0.5">' + "".join(ax) + "</g>")
        for pts, stroke in self.paths:
            for run in self._clip(pts):
                if len(run) < 2:
                    continue
                d = " ".join(("M" if k == 0 else "L") + "{:.6g},{:.6g}".format(*self._xy(p))
                             for k, p in enumerate(run))
                out.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="1.2"/>')
        for p, label in self.markers:
            x, y = self._xy(p)
            out.append(f'<circle class="turning-point" cx="{x:.6g}" cy="{y:.6g}" r="3.5" fill="#c0392b">'
                       f"<title>{label}</title></circle>")
        for p, text in self.annotations:
            x, y = self._xy(p)
            out.append(f'<text x="{x:.6g}" y="{y:.6g}" font-size="11">{text}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def write(self, path) -> None:
        _write(path, self.render())


# --- configuration ------------------------------------------------------------


def read_config(path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _Usage(f"config line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


class _Usage(Exception):
    pass


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _positive_float(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def _pair(s: str):
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values")
    return parts


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _workers(s) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("worker count must be >= 1")
    return n


def _family_args(p, quintic_default=True):
    p.add_argument("--family", choices=["cubic", "quintic"], default="quintic" if quintic_default else "cubic")
    p.add_argument("--E", type=_complex, default=1.0, help="energy (complex allowed, e.g. 1+0.5i)")
    p.add_argument("--g", type=_positive_float, default=None, help="coupling (default 1 for the pure potentials)")
    p.add_argument("--omega2", type=float, default=None,
                   help="harmonic coefficient; default 1 with --g, 0 for the pure potentials")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epdyn", description="Complex classical and quantum dynamics "
                                 "of PT-symmetric polynomial oscillators.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="subcommand")

    def common(p, svg=False, csv=False):
        p.add_argument("--config", help="key = value file with defaults for these options")
        p.add_argument("--workers", type=_workers, default=1)
        p.add_argument("--json", help="write records as JSON")
        if csv:
            p.add_argument("--csv", help="write trajectory samples as CSV")
        if svg:
            p.add_argument("--svg", help="write an SVG figure")

    p = sub.add_parser("turning-points", help="roots of E - V(z)")
    _family_args(p)
    common(p, svg=True)

    p = sub.add_parser("classical-ep", help="coupling where two quintic turning points merge")
    p.add_argument("--E", type=float, nargs="+", default=[-1.0])
    common(p)

    p = sub.add_parser("trajectory", help="stem trajectories and their families")
    _family_args(p)
    p.add_argument("--stem", type=_pair, help="turning-point indices 'i,j' or 'i,inf'")
    p.add_argument("--a", type=float, default=0.0, help="imaginary-time shift of the family member")
    p.add_argument("--t-max", type=_positive_float, default=None)
    p.add_argument("--samples", type=int, default=2001)
    common(p, svg=True, csv=True)

    p = sub.add_parser("periods", help="periods of the classical motion")
    _family_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--closed-form", action="store_true")
    mode.add_argument("--monodromy", type=int, metavar="TURNS",
                      help="continue the quintic periods through E -> E exp(-2 i pi TURNS)")
    common(p)

    p = sub.add_parser("weierstrass", help="cubic trajectories z = 2i P(t + ia; 0, E/2)")
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--a", type=float, default=None, help="shift; default T~/4 (the smile)")
    p.add_argument("--samples", type=int, default=2001)
    common(p, svg=True, csv=True)

    p = sub.add_parser("spectrum", help="eigenvalues on a Stokes-wedge problem")
    p.add_argument("--g", type=float, nargs="+", default=[0.1])
    p.add_argument("--problem", choices=["One", "Two"], default="One")
    p.add_argument("--count", type=int, default=6)
    common(p)

    p = sub.add_parser("scan-ep", help="locate exceptional points by scanning and bisection")
    p.add_argument("--kind", choices=["quantum", "topology"], default="quantum")
    p.add_argument("--problem", choices=["One", "Two"], default="Two")
    p.add_argument("--pair", type=int, default=None, help="quantum: pair index (default: all changes)")
    p.add_argument("--E", type=float, default=-1.0, help="topology: energy")
    p.add_argument("--g-grid", type=_floats, default=None)
    p.add_argument("--tol", type=_positive_float, default=2e-4)
    p.add_argument("--robustness", action="store_true")
    common(p)

    p = sub.add_parser("g2-demo", help="coalescence of G2 vacua")
    p.add_argument("--m", type=_positive_float, default=1.0)
    p.add_argument("--Lambda", type=_positive_float, default=1.0)
    p.add_argument("--lam", type=float, nargs="*", default=[], help="also list the vacua at these lambda")
    common(p)
    return ap


def _apply_config(ap, argv):
    """Parse once to find the subcommand and --config, then re-parse with file defaults."""
    ns = ap.parse_args(argv)
    if getattr(ns, "config", None):
        cfg = read_config(ns.config)
        subp = ap._subparsers._group_actions[0].choices[ns.command]
        known = {a.dest: a for a in subp._actions if a.dest not in ("help", "config")}
        unknown = sorted(set(cfg) - set(known))
        if unknown:
            raise _Usage(f"unknown config keys: {', '.join(unknown)}; valid: {', '.join(sorted(known))}")
        defaults = {}
        for k, v in cfg.items():
            act = known[k]
            if act.nargs in ("+", "*"):
                vals = v.split()
                defaults[k] = [act.type(x) if act.type else x for x in vals]
            elif act.const is True and act.nargs == 0:
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = act.type(v) if act.type else v
        subp.set_defaults(**defaults)
        ns = ap.parse_args(argv)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            ns.workers = _workers(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise _Usage(f"{WORKERS_ENV} must be a positive integer") from None
    return ns


def _echo(ns) -> dict:
    return {k: v for k, v in sorted(vars(ns).items()) if k not in _NOT_ECHOED}


def _spec(ns) -> cpoly.ProblemSpec:
    g = ns.g if ns.g is not None else 1.0
    if ns.omega2 is not None:
        w = ns.omega2
    else:
        w = 1.0 if ns.g is not None else 0.0
    return cpoly.ProblemSpec(ns.family, E=ns.E, g=g, omega2=w)


def pmap(fn: Callable, items: Sequence, workers: int) -> list:
    """Ordered map, in-process for one worker; result order never depends on scheduling."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


def _out(line: str = "") -> None:
    print(line)


def _fmt(z: complex, digits: int = 10) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return f"{z.real:.{digits}g}"
    if abs(z.real) <= 1e-14 * max(1.0, abs(z.imag)):
        return f"{z.imag:.{digits}g}i"
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


# --- subcommands --------------------------------------------------------------


def cmd_turning_points(ns):
    spec = _spec(ns)
    tps = cpoly.turning_points(spec)
    names = trajectory.point_names(list(tps.points)) if tps.symmetric else [str(k) for k in range(len(tps))]
    recs = []
    for k, (p, m) in enumerate(zip(tps.points, tps.multiplicity)):
        _out(f"{k}  {names[k]:>3}  {_fmt(p, 12)}  x{m}")
        recs.append({"index": k, "name": names[k], "z": p, "multiplicity": m})
    if ns.svg:
        sc = SvgScene.around(tps.points)
        for p, nm in zip(tps.points, names):
            sc.add_marker(p, nm)
        sc.write(ns.svg)
    return recs


def cmd_classical_ep(ns):
    recs = []
    for E in ns.E:
        g = cpoly.classical_exceptional_point(E, check=True)
        gd = cpoly.discriminant_zero(E)
        z = cpoly.coalesced_turning_point(E)
        _out(f"E = {E:g}: g* = {g:.7g}  coalesced turning point {_fmt(z, 6)}  "
             f"(discriminant zero {gd:.15g}, rel. diff {abs(gd - g) / g:.1e})")
        recs.append({"kind": "classical", "E": E, "g": g, "z": z, "g_discriminant": gd})
    return recs


def _stem_index(s: str):
    return INF if s.lower() in ("inf", "infinity") else int(s)


def _traj_record(tr, label):
    rec = {"stem": label, "samples": len(tr), "max_energy_residual": tr.max_drift,
           "closed": tr.closed, "period": tr.period, "escaped": tr.escaped,
           "escape_time": tr.escape_time}
    return rec


def cmd_trajectory(ns):
    spec = _spec(ns)
    pts = list(cpoly.turning_points(spec).points)
    names = trajectory.point_names(pts)
    trajs = []
    if ns.stem:
        a, b = (_stem_index(x) for x in ns.stem)
        if a == INF or (b != INF and not 0 <= b < len(pts)) or not 0 <= a < len(pts):
            raise DomainError(f"stem indices must lie in 0..{len(pts) - 1}")
        stem = trajectory.stem_trajectory(spec, (a, b), points=pts, t_max=ns.t_max, n_samples=ns.samples)
        label = f"{names[a]}-{'inf' if b == INF else names[b]}"
        if ns.a:
            period = stem.period
            if period is None:
                raise DomainError("family members of an escape stem need --family cubic")
            stem = trajectory.family_member(spec, stem, ns.a, n_samples=ns.samples)
            label += f"@a={ns.a:g}"
        trajs.append((label, stem))
    elif ns.family == "cubic":
        # the vertical stem from the axis turning point to i infinity and its family
        top = max(range(len(pts)), key=lambda k: pts[k].imag)
        esc = trajectory.escape_orbit(spec, top, points=pts, n_samples=ns.samples)
        if ns.a:
            period = 2 * esc.escape_time
            tr = trajectory.family_member(spec, esc, ns.a, period=period, n_samples=ns.samples)
            trajs.append((f"{names[top]}-inf@a={ns.a:g}", tr))
        else:
            trajs.append((f"{names[top]}-inf", esc))
    else:
        for k in range(len(pts)):
            tr, tgt = trajectory.follow_from(spec, k, points=pts, t_max=ns.t_max, n_samples=ns.samples)
            end = "none" if tgt is None else ("inf" if tgt == INF else names[tgt])
            key = "-".join(sorted((names[k], end)))
            if key not in [lab for lab, _ in trajs]:
                trajs.append((key, tr))
        trajs.sort(key=lambda x: x[0])
    recs = []
    for k, (label, tr) in enumerate(trajs):
        _out(f"{label}: {len(tr)} samples, max energy residual {tr.max_drift:.2e}"
             + (f", period {tr.period:.10g}" if tr.period else "")
             + (f", escape time {tr.escape_time:.10g}" if tr.escaped and tr.escape_time else ""))
        recs.append(_traj_record(tr, label))
        if ns.csv:
            path = ns.csv if len(trajs) == 1 else _indexed(ns.csv, k)
            emit_trajectory_csv(tr, path)
    if ns.svg:
        sc = SvgScene.around(pts)
        for _, tr in trajs:
            sc.add_path(tr.z)
        for p, nm in zip(pts, names):
            sc.add_marker(p, nm)
        sc.write(ns.svg)
    return recs


def _indexed(path: str, k: int) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{k}{p.suffix}"))


def cmd_periods(ns):
    spec = _spec(ns)
    recs = []
    if ns.monodromy is not None:
        if spec.family != "quintic" or spec.omega2 != 0:
            raise DomainError("monodromy table is defined for the pure quintic")
        num = periods.quintic_periods_numeric(spec.E.real if isinstance(spec.E, complex) else spec.E)
        for name in ("T1", "T2"):
            i, j = num.cycles[name]
            val = periods.monodromy_continue(spec, Cycle(i, j), ns.monodromy)
            _out(f"{name} -> {_fmt(val, 12)}")
            recs.append({"period": name, "turns": ns.monodromy, "value": val})
        return recs
    if ns.closed_form:
        if spec.family == "cubic":
            if spec.omega2 != 0 or spec.g != 1.0:
                raise DomainError("closed form is for V = i z^3")
            T1, T2, iTt = periods.cubic_lattice_closed_form(spec.E)
            vals = {"T1": T1, "T2": T2, "iTt": iTt}
        else:
            if spec.omega2 != 0 or spec.g != 1.0:
                raise DomainError("closed form is for V = -i z^5")
            vals = periods.closed_form_quintic(spec.E).as_dict()
    else:
        if spec.family == "quintic" and spec.omega2 == 0 and spec.g == 1.0:
            vals = periods.quintic_periods_numeric(complex(spec.E).real).as_dict()
        else:
            pts = list(cpoly.turning_points(spec).points)
            names = trajectory.point_names(pts) if cpoly.mirror_symmetric(pts) else [str(k) for k in range(len(pts))]
            vals = {}
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    vals[f"T({names[i]},{names[j]})"] = periods.cycle_integral(spec, Cycle(i, j), points=pts)
    for k, v in vals.items():
        _out(f"{k} = {_fmt(v, 12)}")
        recs.append({"period": k, "value": v})
    return recs


def cmd_weierstrass(ns):
    inv, lat = weierstrass.cubic_setup(complex(ns.E))
    Tt = weierstrass.imaginary_period(ns.E)
    a = ns.a if ns.a is not None else Tt / 4
    n = ns.samples
    T1 = lat.T1.real
    t = (np.arange(n) + 0.5) * T1 / n
    z = np.empty(n, complex)
    w = np.empty(n, complex)
    for k, tk in enumerate(t):
        z[k], w[k] = weierstrass.cubic_trajectory(float(tk), a, ns.E, derivative=True)
    spec = cpoly.ProblemSpec.pure_cubic(ns.E)
    tr = trajectory._make(spec, t, z, w, "real", period=T1)
    _out(f"T1 = {_fmt(lat.T1, 12)}  T2 = {_fmt(lat.T2, 12)}  iTt = {_fmt(1j * Tt, 12)}")
    _out(f"a = {a:.12g}: {n} samples, max energy residual {tr.max_drift:.2e}")
    if ns.csv:
        emit_trajectory_csv(tr, ns.csv)
    if ns.svg:
        pts = list(cpoly.turning_points(spec).points)
        sc = SvgScene.around(pts)
        sc.add_path(z)
        for p in pts:
            sc.add_marker(p)
        sc.write(ns.svg)
    return [{"T1": lat.T1, "T2": lat.T2, "iTt": 1j * Tt, "a": a, "max_energy_residual": tr.max_drift}]


def _eig_job(args):
    g, problem, count = args
    return spectrum.eigenvalues(g, problem, count)


def cmd_spectrum(ns):
    if ns.count < 1:
        raise DomainError("count must be >= 1")
    rows = pmap(_eig_job, [(g, ns.problem, ns.count) for g in ns.g], ns.workers)
    recs = []
    for g, row in zip(ns.g, rows):
        _out(f"g = {g:g}: " + "  ".join(_fmt(r.E, 10) for r in row))
        for r in row:
            recs.append({"g": g, "problem": r.problem, "index": r.index, "E": r.E, "residual": r.residual})
    return recs


def _pair_count_job(args):
    g, problem = args
    if spectrum.WedgeProblem.parse(problem) is spectrum.WedgeProblem.Two and g < spectrum.G_MIN_TWO:
        return None
    return spectrum.complex_pair_count(g, problem)[0]


def _topology_job(args):
    E, g = args
    return trajectory.classify_topology(cpoly.ProblemSpec("quintic", E=E, g=g))


def cmd_scan_ep(ns):
    recs = []
    if ns.kind == "quantum":
        grid = ns.g_grid or [0.004, 0.01, 0.02, 0.03, 0.045, 0.06]
        grid = sorted(grid)
        counts = pmap(_pair_count_job, [(g, ns.problem) for g in grid], ns.workers)
        for g, c in zip(grid, counts):
            _out(f"g = {g:g}: " + ("not resolved (below the problem Two floor)" if c is None
                                   else f"{c} complex pair(s)"))
            recs.append({"kind": "pair-count", "g": g, "pairs": c})
        # unresolved points carry no character information
        kept = [(g, c) for g, c in zip(grid, counts) if c is not None]
        grid, counts = [g for g, _ in kept], [c for _, c in kept]
        jobs = []
        for (g0, c0), (g1, c1) in zip(zip(grid, counts), zip(grid[1:], counts[1:])):
            for pair in range(min(c0, c1) + 1, max(c0, c1) + 1):
                if ns.pair is None or ns.pair == pair:
                    jobs.append((pair, g0, g1))
        eps = pmap(_ep_job, [(ns.problem, p, g0, g1, ns.tol, ns.robustness) for p, g0, g1 in jobs], ns.workers)
        for ep in sorted(eps, key=lambda e: -e.value.real):
            _out(f"quantum EP {ep.labels[0]}: g = {ep.value.real:.6g} +- {ep.uncertainty / 2:.1g}")
            recs.append({"kind": ep.kind, "g": ep.value.real, "pair": ep.labels[0],
                         "uncertainty": ep.uncertainty, "evidence": ep.evidence})
        return recs
    grid = sorted(ns.g_grid or [0.005, 0.01, 0.02, 0.04, 0.06, 0.1])
    labels = pmap(_topology_job, [(ns.E, g) for g in grid], ns.workers)
    for g, lab in zip(grid, labels):
        _out(f"g = {g:g}: {lab}")
    for (g0, l0), (g1, l1) in zip(zip(grid, labels), zip(grid[1:], labels[1:])):
        if l0 != l1:
            g, w, _ = trajectory.locate_transition(ns.E, g0, g1, tol=ns.tol)
            _out(f"topology change at g = {g:.6g} +- {w / 2:.1g}")
            recs.append({"kind": "classical", "g": g, "uncertainty": w, "labels": [l0, l1]})
    return recs


def _ep_job(args):
    problem, pair, g0, g1, tol, rob = args
    return spectrum.find_quantum_ep(problem, pair, (g0, g1), tol=tol, robustness=rob)


def cmd_g2(ns):
    l2 = cpoly.g2_coalescence(ns.m, ns.Lambda)
    _out(f"vacua coalesce at lambda^2 = {l2:.10g}")
    recs = [{"kind": "vacuum-coalescence", "lambda2": l2}]
    for lam in ns.lam:
        v = cpoly.g2_vacua(cpoly.G2Params(ns.m, lam, ns.Lambda))
        _out(f"lambda = {lam:g}: " + "  ".join(_fmt(x, 8) for x in v))
        recs.append({"lambda": lam, "vacua": v})
    return recs


COMMANDS = {
    "turning-points": cmd_turning_points,
    "classical-ep": cmd_classical_ep,
    "trajectory": cmd_trajectory,
    "periods": cmd_periods,
    "weierstrass": cmd_weierstrass,
    "spectrum": cmd_spectrum,
    "scan-ep": cmd_scan_ep,
    "g2-demo": cmd_g2,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = _apply_config(ap, list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _Usage as exc:
        ap.print_usage(sys.stderr)
        print(f"epdyn: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"epdyn: error: {exc}", file=sys.stderr)
        return 1
    try:
        recs = COMMANDS[ns.command](ns)
        if ns.json:
            emit_records_json(recs, ns.json, command=ns.command, config=_echo(ns))
    except (DomainError, ConvergenceError) as exc:
        print(f"epdyn: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
