"""Command-line front end: parameter sweeps, oracle checks, extraction dumps.

Four subcommands:

* ``sweep-length`` -- sweep the interaction length of the continuous
  device, emitting one CSV row per grid point with intensities, the
  signal coherence, both extracted substituting schemes and their
  residuals.
* ``sweep-psi`` -- sweep the idler alignment angle of the cascaded
  device, emitting the coherence and the interferometer-scheme
  parameters.
* ``oracle-check`` -- compare the transfer-matrix observables against the
  truncated number-basis evolution at sampled lengths.
* ``decompose`` -- single-point extraction dump for either device.

CSV output is UTF-8, comma-separated, header row, LF line endings, with
shortest round-trip decimal formatting; undefined values are empty fields
accompanied by a flag or status column.  Sweeps are evaluated in grid
order and the output is byte-identical across repeated runs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from . import decompose as dec
from . import moments as mom
from . import whichway as ww
from .config import TOL, Tolerances
from .device import (
    CascadedDevice,
    ContinuousDevice,
    Regime,
    cascaded_transfer_matrix,
    classify_regime,
    transfer_matrix,
)
from .errors import (
    ExtractionResidualError,
    NonRealCorrelationError,
    PdcModelError,
    TanhDomainError,
    TruncationLeakageError,
    UndefinedCoherenceError,
)
from .fock import FockBasis, evolve, fock_observables, mode_occupations

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_LEAKAGE = 3

LENGTH_COLUMNS = (
    "L", "gamma", "gamma_defined", "n_s1", "n_s2", "n_total_signal",
    "zou_g1", "zou_g2", "zou_g4", "zou_g5", "uv_angle",
    "ou_g1", "ou_g2", "ou_phis", "ou_phii",
    "zou_residual", "ou_residual", "status",
)

PSI_COLUMNS = (
    "psi", "gamma", "ou_g1", "ou_g2", "ou_phis", "ou_phii",
    "ou_residual", "status",
)

COLUMN_DOCS = {
    "L": "interaction length of the continuous device",
    "psi": "idler alignment angle of the cascaded device (radians)",
    "gamma": "mutual signal coherence; real by convention (the imaginary "
             "unit is factored out); empty when undefined. For sweep-psi "
             "the sign convention is fixed so that perfect idler alignment "
             "(psi = pi/2) gives +1; the raw mixer phases of the cascade "
             "construction produce the opposite sign, a pure phase gauge.",
    "gamma_defined": "1 when gamma is defined at this row, 0 otherwise",
    "n_s1": "mean photon number of signal mode 1",
    "n_s2": "mean photon number of signal mode 2",
    "n_total_signal": "n_s1 + n_s2",
    "zou_g1": "direct converter coupling (s1-i1) of the four-converter scheme",
    "zou_g2": "direct converter coupling (s2-i2) of the four-converter scheme",
    "zou_g4": "crossed converter coupling (s1-i2) of the four-converter scheme",
    "zou_g5": "crossed converter coupling (s2-i1) of the four-converter scheme",
    "uv_angle": "oriented angle between the which-way vectors u = (g1, g4) "
                "and v = (g5, -g2), in (-pi, pi]",
    "ou_g1": "first converter coupling of the interferometer scheme",
    "ou_g2": "second converter coupling of the interferometer scheme",
    "ou_phis": "signal mixer angle of the interferometer scheme, (-pi/2, pi/2]",
    "ou_phii": "idler mixer angle of the interferometer scheme, (-pi/2, pi/2]",
    "zou_residual": "largest back-propagated correlation left by the "
                    "four-converter extraction (0 = exact)",
    "ou_residual": "largest back-propagated correlation left by the "
                   "interferometer extraction (0 = exact)",
    "status": "ok, or semicolon-separated failure tags per extraction; "
              "failed extractions leave their columns empty",
}

# canonical parameter sets used throughout the docs and tests
PRESETS = {
    "fig2": dict(kind="length", gamma1=0.1, gamma2=0.3, kappa=3.0,
                 start=0.01, stop=20.0, steps=2000),
    "fig4": dict(kind="length", gamma1=0.1, gamma2=0.3, kappa=3.0,
                 start=0.01, stop=20.0, steps=2000),
    "fig6": dict(kind="length", gamma1=0.1, gamma2=0.3, kappa=3.0,
                 start=0.01, stop=20.0, steps=2000),
    "fig7": dict(kind="psi", r1=0.1, r2=0.1,
                 start=0.0, stop=math.pi / 2, steps=100),
}


@dataclass(frozen=True)
class SweepConfig:
    """A validated sweep request (variable, range, grid, output).

    ``tol`` lets programmatic callers override the shared numerical
    thresholds for a whole sweep; the CLI always uses the defaults.
    """

    kind: str                    # "length" | "psi"
    device: Union[ContinuousDevice, CascadedDevice]
    start: float
    stop: float
    steps: int
    out: str = "-"
    columns: Optional[Sequence[str]] = None
    tol: Tolerances = TOL

    def __post_init__(self) -> None:
        if self.kind not in ("length", "psi"):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if not self.start < self.stop:
            raise ValueError("sweep range must satisfy start < stop")
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def _fmt(value: float) -> str:
    # shortest round-trip decimal; normalize -0.0
    return repr(float(value) + 0.0)


_STATUS_TAGS = {
    UndefinedCoherenceError: "undefined-coherence",
    NonRealCorrelationError: "non-real-correlation",
    TanhDomainError: "tanh-domain",
    ExtractionResidualError: "residual-too-large",
    TruncationLeakageError: "leakage",
}


def _tag(exc: PdcModelError) -> str:
    return _STATUS_TAGS.get(type(exc), "error")


def sweep_length_rows(cfg: SweepConfig) -> List[dict]:
    """Evaluate a length sweep; one dict of column -> string per point.

    Extraction failures never abort the sweep: the affected columns stay
    empty and the status column carries a tag.
    """
    base: ContinuousDevice = cfg.device
    rows = []
    for length in cfg.grid():
        dev = ContinuousDevice(base.gamma1, base.gamma2, base.kappa,
                               float(length))
        tm = transfer_matrix(dev, cfg.tol)
        inten = mom.intensities(tm, cfg.tol)
        row = {name: "" for name in LENGTH_COLUMNS}
        row["L"] = _fmt(length)
        row["n_s1"] = _fmt(inten.s1)
        row["n_s2"] = _fmt(inten.s2)
        row["n_total_signal"] = _fmt(inten.total_signal)
        problems = []
        try:
            coh = mom.signal_coherence(tm, cfg.tol)
            row["gamma"] = _fmt(coh.gamma)
            row["gamma_defined"] = "1"
        except UndefinedCoherenceError:
            row["gamma_defined"] = "0"
        try:
            zou = dec.extract_four_converter(tm, cfg.tol)
            scheme = zou.scheme
            row["zou_g1"] = _fmt(scheme.g1)
            row["zou_g2"] = _fmt(scheme.g2)
            row["zou_g4"] = _fmt(scheme.g4)
            row["zou_g5"] = _fmt(scheme.g5)
            row["zou_residual"] = _fmt(zou.residual)
            try:
                row["uv_angle"] = _fmt(ww.geometry(scheme).angle)
            except PdcModelError:
                pass
        except PdcModelError as exc:
            problems.append(f"zou:{_tag(exc)}")
        try:
            ou = dec.extract_interferometer(tm, cfg.tol)
            row["ou_g1"] = _fmt(ou.scheme.g1)
            row["ou_g2"] = _fmt(ou.scheme.g2)
            row["ou_phis"] = _fmt(ou.scheme.phi_s)
            row["ou_phii"] = _fmt(ou.scheme.phi_i)
            row["ou_residual"] = _fmt(ou.residual)
        except PdcModelError as exc:
            problems.append(f"ou:{_tag(exc)}")
        row["status"] = ";".join(problems) if problems else "ok"
        rows.append(row)
    return rows


def sweep_psi_rows(cfg: SweepConfig) -> List[dict]:
    """Evaluate an alignment-angle sweep of the cascaded device.

    The gamma column uses the aligned-idler sign convention (see
    COLUMN_DOCS["gamma"]): the raw coherence of the cascade construction
    is negated so that full alignment reports +1.
    """
    base: CascadedDevice = cfg.device
    rows = []
    for psi in cfg.grid():
        dev = CascadedDevice(base.r1, base.r2, float(psi))
        tm = cascaded_transfer_matrix(dev, cfg.tol)
        row = {name: "" for name in PSI_COLUMNS}
        row["psi"] = _fmt(psi)
        problems = []
        try:
            coh = mom.signal_coherence(tm, cfg.tol)
            row["gamma"] = _fmt(-coh.gamma)
        except UndefinedCoherenceError as exc:
            problems.append(f"gamma:{_tag(exc)}")
        try:
            ou = dec.extract_interferometer(tm, cfg.tol)
            row["ou_g1"] = _fmt(ou.scheme.g1)
            row["ou_g2"] = _fmt(ou.scheme.g2)
            row["ou_phis"] = _fmt(ou.scheme.phi_s)
            row["ou_phii"] = _fmt(ou.scheme.phi_i)
            row["ou_residual"] = _fmt(ou.residual)
        except PdcModelError as exc:
            problems.append(f"ou:{_tag(exc)}")
        row["status"] = ";".join(problems) if problems else "ok"
        rows.append(row)
    return rows


def render_csv(columns: Sequence[str], rows: List[dict],
               selected: Optional[Sequence[str]] = None) -> str:
    names = list(columns) if selected is None else [
        c for c in columns if c in selected]
    lines = [",".join(names)]
    lines.extend(",".join(row[name] for name in names) for row in rows)
    return "\n".join(lines) + "\n"


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _describe(columns: Sequence[str]) -> str:
    width = max(len(c) for c in columns)
    return "\n".join(f"{c.ljust(width)}  {COLUMN_DOCS[c]}" for c in columns) + "\n"


# ---------------------------------------------------------------------------
# argument handling

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="use a canonical parameter set")
    p.add_argument("--from", dest="start", type=float, help="sweep start")
    p.add_argument("--to", dest="stop", type=float, help="sweep end")
    p.add_argument("--steps", type=int, help="number of grid points (>= 2)")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.add_argument("--columns", help="comma-separated column subset")
    p.add_argument("--describe-columns", action="store_true",
                   help="print column documentation and exit")


def _continuous_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma1", type=float, help="first converter strength")
    p.add_argument("--gamma2", type=float, help="second converter strength")
    p.add_argument("--kappa", type=float, help="idler exchange strength")


def _cascaded_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r1", type=float, help="first converter squeezing")
    p.add_argument("--r2", type=float, help="second converter squeezing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupledpdc",
        description="Coupled-downconverter coherence simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_len = sub.add_parser(
        "sweep-length",
        help="sweep the interaction length of the continuous device")
    _continuous_args(p_len)
    _add_common(p_len)

    p_psi = sub.add_parser(
        "sweep-psi",
        help="sweep the idler alignment angle of the cascaded device")
    _cascaded_args(p_psi)
    _add_common(p_psi)

    p_oracle = sub.add_parser(
        "oracle-check",
        help="cross-check transfer-matrix results against the truncated "
             "number-basis evolution")
    _continuous_args(p_oracle)
    p_oracle.add_argument("--preset", choices=sorted(PRESETS))
    p_oracle.add_argument("--points", default="0.5,1.0,1.5,2.0",
                          help="comma-separated interaction lengths")
    p_oracle.add_argument("--nmax", type=int, default=4,
                          help="per-mode photon-number cutoff")
    p_oracle.add_argument("--tolerance", type=float, default=1e-3,
                          help="largest allowed deviation")

    p_dec = sub.add_parser(
        "decompose", help="single-point extraction dump")
    _continuous_args(p_dec)
    _cascaded_args(p_dec)
    p_dec.add_argument("--length", type=float,
                       help="interaction length (continuous device)")
    p_dec.add_argument("--psi", type=float,
                       help="alignment angle (cascaded device)")
    p_dec.add_argument("--nmax", type=int, default=0,
                       help="if > 0, also run the number-basis cross-check")
    return parser


def _fill_preset(args, wanted_kind: str) -> dict:
    """Merge preset values and explicit flags; explicit flags win."""
    merged: dict = {}
    if args.preset:
        preset = PRESETS[args.preset]
        if preset["kind"] != wanted_kind:
            raise ValueError(
                f"preset {args.preset!r} configures a "
                f"{preset['kind']} sweep, not {wanted_kind}")
        merged.update(preset)
    for key in ("gamma1", "gamma2", "kappa", "r1", "r2",
                "start", "stop", "steps"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _cmd_sweep_length(args) -> int:
    if args.describe_columns:
        sys.stdout.write(_describe(LENGTH_COLUMNS))
        return EXIT_OK
    merged = _fill_preset(args, "length")
    try:
        dev = ContinuousDevice(merged["gamma1"], merged["gamma2"],
                               merged["kappa"], 0.0)
        cfg = SweepConfig(kind="length", device=dev,
                          start=merged["start"], stop=merged["stop"],
                          steps=int(merged["steps"]), out=args.out,
                          columns=_parse_columns(args, LENGTH_COLUMNS))
    except (KeyError, ValueError, TypeError) as exc:
        print(f"invalid sweep configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = sweep_length_rows(cfg)
    _write(render_csv(LENGTH_COLUMNS, rows, cfg.columns), cfg.out)
    return EXIT_OK


def _cmd_sweep_psi(args) -> int:
    if args.describe_columns:
        sys.stdout.write(_describe(PSI_COLUMNS))
        return EXIT_OK
    merged = _fill_preset(args, "psi")
    merged.setdefault("start", 0.0)
    merged.setdefault("stop", math.pi / 2)
    try:
        dev = CascadedDevice(merged["r1"], merged["r2"], 0.0)
        cfg = SweepConfig(kind="psi", device=dev,
                          start=merged["start"], stop=merged["stop"],
                          steps=int(merged["steps"]), out=args.out,
                          columns=_parse_columns(args, PSI_COLUMNS))
    except (KeyError, ValueError, TypeError) as exc:
        print(f"invalid sweep configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = sweep_psi_rows(cfg)
    _write(render_csv(PSI_COLUMNS, rows, cfg.columns), cfg.out)
    return EXIT_OK


def _parse_columns(args, known: Sequence[str]) -> Optional[Sequence[str]]:
    if not getattr(args, "columns", None):
        return None
    wanted = [c.strip() for c in args.columns.split(",") if c.strip()]
    unknown = sorted(set(wanted) - set(known))
    if unknown:
        raise ValueError(f"unknown columns: {', '.join(unknown)}")
    return wanted


def _cmd_oracle_check(args) -> int:
    merged_args = dict(gamma1=args.gamma1, gamma2=args.gamma2,
                       kappa=args.kappa)
    if args.preset:
        preset = PRESETS[args.preset]
        if preset["kind"] != "length":
            print(f"preset {args.preset!r} does not configure a continuous "
                  "device", file=sys.stderr)
            return EXIT_USAGE
        for key in ("gamma1", "gamma2", "kappa"):
            if merged_args[key] is None:
                merged_args[key] = preset[key]
    if any(v is None for v in merged_args.values()):
        print("oracle-check needs --gamma1/--gamma2/--kappa or a preset",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        lengths = [float(tok) for tok in args.points.split(",") if tok.strip()]
    except ValueError:
        print(f"could not parse --points {args.points!r}", file=sys.stderr)
        return EXIT_USAGE
    if not lengths or args.nmax < 1:
        print("need at least one length and --nmax >= 1", file=sys.stderr)
        return EXIT_USAGE

    probe = ContinuousDevice(**merged_args, length=0.0)
    if classify_regime(probe) is not Regime.BELOW_THRESHOLD:
        print("oracle-check requires a below-threshold device (the "
              "truncated basis cannot follow exponential growth); got "
              f"{classify_regime(probe).value}", file=sys.stderr)
        return EXIT_USAGE

    basis = FockBasis.build(args.nmax)
    worst_intensity = 0.0
    worst_gamma = 0.0
    worst_leak = 0.0
    for length in lengths:
        dev = ContinuousDevice(**merged_args, length=length)
        tm = transfer_matrix(dev)
        inten = mom.intensities(tm)
        try:
            state = evolve(dev, basis)
        except TruncationLeakageError as exc:
            print(f"L={_fmt(length)}: {exc}", file=sys.stderr)
            return EXIT_LEAKAGE
        n_s1, n_i1, n_s2, n_i2 = mode_occupations(state)
        dint = max(abs(n_s1 - inten.s1), abs(n_s2 - inten.s2),
                   abs(n_i1 - inten.i1), abs(n_i2 - inten.i2))
        try:
            obs = fock_observables(state)
            gauss = mom.signal_coherence(tm)
            dgamma = abs(obs.coherence.gamma - gauss.gamma)
            gamma_note = f"dgamma={dgamma:.3e}"
        except UndefinedCoherenceError:
            dgamma = 0.0
            gamma_note = "gamma=undefined (skipped)"
        worst_intensity = max(worst_intensity, dint)
        worst_gamma = max(worst_gamma, dgamma)
        worst_leak = max(worst_leak, state.leakage)
        print(f"L={_fmt(length)} dintensity={dint:.3e} {gamma_note} "
              f"leakage={state.leakage:.3e}")
    print(f"max intensity deviation: {worst_intensity:.3e}")
    print(f"max gamma deviation:     {worst_gamma:.3e}")
    print(f"max leakage proxy:       {worst_leak:.3e}")
    if max(worst_intensity, worst_gamma) > args.tolerance:
        print(f"FAIL: deviation exceeds tolerance {args.tolerance:g}")
        return EXIT_TOLERANCE
    print(f"PASS (tolerance {args.tolerance:g})")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    continuous = args.gamma1 is not None or args.gamma2 is not None \
        or args.kappa is not None or args.length is not None
    cascaded = args.r1 is not None or args.r2 is not None \
        or args.psi is not None
    if continuous == cascaded:
        print("decompose needs either --gamma1/--gamma2/--kappa/--length "
              "or --r1/--r2/--psi", file=sys.stderr)
        return EXIT_USAGE
    try:
        if continuous:
            dev = ContinuousDevice(args.gamma1 or 0.0, args.gamma2 or 0.0,
                                   args.kappa or 0.0, args.length or 0.0)
            tm = transfer_matrix(dev)
            print(f"device=continuous gamma1={_fmt(dev.gamma1)} "
                  f"gamma2={_fmt(dev.gamma2)} kappa={_fmt(dev.kappa)} "
                  f"length={_fmt(dev.length)}")
            print(f"regime={classify_regime(dev).value}")
        else:
            dev = CascadedDevice(args.r1 or 0.0, args.r2 or 0.0,
                                 args.psi or 0.0)
            tm = cascaded_transfer_matrix(dev)
            print(f"device=cascaded r1={_fmt(dev.r1)} r2={_fmt(dev.r2)} "
                  f"psi={_fmt(dev.psi)}")
    except ValueError as exc:
        print(f"invalid device: {exc}", file=sys.stderr)
        return EXIT_USAGE

    inten = mom.intensities(tm)
    print(f"n_s1={_fmt(inten.s1)} n_s2={_fmt(inten.s2)} "
          f"n_i1={_fmt(inten.i1)} n_i2={_fmt(inten.i2)}")
    try:
        coh = mom.signal_coherence(tm)
        print(f"gamma={_fmt(coh.gamma)} imag_residue={coh.imag_residue:.3e} "
              f"fragile={int(coh.fragile)}")
    except UndefinedCoherenceError:
        print("gamma=undefined")
    try:
        zou = dec.extract_four_converter(tm)
        s = zou.scheme
        print(f"zou_g1={_fmt(s.g1)} zou_g2={_fmt(s.g2)} "
              f"zou_g4={_fmt(s.g4)} zou_g5={_fmt(s.g5)} "
              f"zou_residual={_fmt(zou.residual)}")
        geo = ww.geometry(s)
        print(f"uv_dot={_fmt(geo.dot)} uv_cross={_fmt(geo.cross)} "
              f"uv_angle={_fmt(geo.angle)} gamma_sq={_fmt(geo.gamma_sq)} "
              f"degenerate={int(geo.degenerate)}")
        bound = dec.gain_bound(tm, s)
        print(f"signal_total={_fmt(bound.signal_total)} "
              f"scheme_total={_fmt(bound.scheme_total)} "
              f"parameter_cap={_fmt(bound.parameter_cap)} "
              f"bound_violated={int(bound.violated)}")
    except PdcModelError as exc:
        print(f"four-converter extraction failed: {_tag(exc)}")
    try:
        ou = dec.extract_interferometer(tm)
        s = ou.scheme
        print(f"ou_g1={_fmt(s.g1)} ou_g2={_fmt(s.g2)} "
              f"ou_phis={_fmt(s.phi_s)} ou_phii={_fmt(s.phi_i)} "
              f"ou_residual={_fmt(ou.residual)} branch={ou.branch} "
              f"fallback={int(ou.fallback_used)}")
    except PdcModelError as exc:
        print(f"interferometer extraction failed: {_tag(exc)}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage problems; fold into our code
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers: dict[str, Callable] = {
        "sweep-length": _cmd_sweep_length,
        "sweep-psi": _cmd_sweep_psi,
        "oracle-check": _cmd_oracle_check,
        "decompose": _cmd_decompose,
    }
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
