"""``udwlab`` command-line front end.

Exit codes: 0 success, 2 invalid input, 3 quadrature failure, 4 oracle truncation too small.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import qmatrix as qm
from .channel import (
    ChannelParams,
    Regime,
    build_channel,
    apply_channel,
    choi_matrix,
    cohering_power,
    decohering_power,
    fixed_points,
    is_entanglement_breaking,
    mixed_unitary_decomposition,
    negativity,
)
from .errors import QuadratureNoConvergence, TruncationTooSmall
from .field import (
    FieldStateSpec,
    QuadratureConfig,
    SmearingProfile,
    StateKind,
    field_renyi2,
    nu_from_wightman,
    smeared_wightman,
)
from .oracle import (
    DEFAULT_GRID_MODES,
    ModeState,
    OracleConfig,
    comparison_report,
    modulation_sign,
)
from .recovery import recovery_gap_ground, recovery_gap_thermal

MAX_GRID = 1_000_000
QUAD_TOL_ENV = "UDWLAB_QUAD_TOL"

DEFAULT_GRIDS = {
    "fig1": "0.500001:1:200",
    "fig2": "0.500001:1:50",
    "fig3": "0.01:100:41:log",
    "sweep": "1e-4:10:50:log",
}


# ---------------------------------------------------------------------------
# parsing helpers

def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count[:log]`` (or ``:lin``) to an array of grid points."""
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"grid must look like start:stop:count[:log], got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2])
    scale = parts[3].strip().lower() if len(parts) == 4 else "lin"
    if not 1 <= count <= MAX_GRID:
        raise ValueError(f"grid count must lie in [1, {MAX_GRID}], got {count}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("grid end points must be finite")
    if scale in ("lin", "linear"):
        return np.linspace(start, stop, count)
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grid needs positive end points")
        return np.geomspace(start, stop, count)
    raise ValueError(f"unknown grid scale {parts[3]!r}")


def parse_floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def parse_complex(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def quadrature_config() -> QuadratureConfig:
    tol = os.environ.get(QUAD_TOL_ENV)
    if tol is None or tol == "":
        return QuadratureConfig()
    return QuadratureConfig(rel_tol=float(tol))


def run_rows(fn, items, jobs: int) -> list:
    """Map ``fn`` over ``items``; results keep the input order whatever ``jobs`` is."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        x = 0.0
    return format(x, ".17g")


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return 0.0 if x == 0.0 else x
    return x


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def emit(args, rows, columns=None):
    """Write a table (list of dicts) or a single report (dict) in the requested format."""
    fmt = args.format
    if isinstance(rows, dict):
        text = to_json(rows) if fmt == "json" else to_csv([rows], columns or list(rows))
    else:
        text = to_csv(rows, columns) if fmt == "csv" else to_json(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    if getattr(args, "plot", False):
        if not args.out:
            raise ValueError("--plot needs --out")
        from .plotting import PLOTTERS
        PLOTTERS[args.command](rows, Path(args.out).with_suffix(".png"))


# ---------------------------------------------------------------------------
# commands

def cmd_fig1(args):
    grid = parse_grid(args.grid)

    def row(p):
        r = recovery_gap_ground([p])[0]
        return {"p": r.p, "entropy_diff": r.entropy_diff, "petz_bound": r.bound,
                "closed_form_fidelity": r.closed_form_fidelity}

    rows = run_rows(row, grid, args.jobs)
    emit(args, rows, ["p", "entropy_diff", "petz_bound", "closed_form_fidelity"])


def cmd_fig2(args):
    grid = parse_grid(args.grid)
    betas = parse_floats(args.beta)
    if not betas:
        raise ValueError("need at least one beta*Omega value")
    items = [(b, p) for b in betas for p in grid]

    def row(item):
        return recovery_gap_thermal(item[0], [item[1]])[0]._asdict()

    rows = run_rows(row, items, args.jobs)
    emit(args, rows, ["beta_omega", "p", "entropy_diff", "bound", "closed_form_diff",
                      "closed_form_fidelity"])


def cmd_fig3(args):
    temps = parse_grid(args.grid)
    T = float(args.T)
    if not T > 0:
        raise ValueError("switching width T must be positive")
    masses = parse_floats(args.mass) if args.mass is not None else [0.0, 1.0 / T, 5.0 / T]
    cfg = quadrature_config()
    items = [(m, t) for m in masses for t in temps]

    def row(item):
        m, t = item
        if not t > 0:
            raise ValueError("temperatures must be positive")
        prof = SmearingProfile(coupling=float(args.coupling), switching_width=T, mass=m, beta=T / t)
        w = smeared_wightman(prof, cfg)
        return {"temperature": t, "mass": m, "W": w, "S2_field": field_renyi2(w)}

    rows = run_rows(row, items, args.jobs)
    emit(args, rows, ["temperature", "mass", "W", "S2_field"])


def cmd_wightman(args):
    prof = SmearingProfile(coupling=float(args.coupling), switching_width=float(args.T),
                           mass=float(args.mass), beta=float(args.beta),
                           ball_width=None if args.ball_width is None else float(args.ball_width))
    w, err = smeared_wightman(prof, quadrature_config(), full_output=True)
    nu = nu_from_wightman(w)
    report = {"W": w, "abserr": err, "nu": nu, "p": 0.5 * (1.0 + nu)}
    emit(args, report, ["W", "abserr", "nu", "p"])


def _field_spec(args) -> FieldStateSpec:
    kind = StateKind(args.state)
    w = float(args.W)
    if args.nu is not None:
        nu0 = parse_complex(args.nu)
        if nu0.imag != 0 or not 0 < nu0.real <= 1:
            raise ValueError("--nu with --state needs a real reference value in (0, 1]")
        w = -0.5 * math.log(nu0.real)
    return FieldStateSpec(kind, W_ff=w, E_alpha_f=float(args.E_alpha), E_zeta_f=float(args.E_zeta),
                          W_zeta_zeta=float(args.W_zeta), ReW_f_zeta=float(args.ReW_f_zeta))


def analyze_report(params: ChannelParams, rho_in, w_eff: float, cohering: float) -> dict:
    k = build_channel(params)
    mud = mixed_unitary_decomposition(params)
    choi = choi_matrix(k)
    fam = fixed_points(params)
    out = apply_channel(k, rho_in)
    return {
        "nu_re": params.nu.real,
        "nu_im": params.nu.imag,
        "p": params.p,
        "axis": list(params.axis),
        "regime": params.regime.value,
        "kraus_labels": list(k.labels),
        "kraus_re": [op.real.tolist() for op in k.ops],
        "kraus_im": [op.imag.tolist() for op in k.ops],
        "kraus_completeness_error": k.completeness_error(),
        "mixed_unitary_weights": list(mud.probabilities),
        "choi_eigenvalues": qm.eig_hermitian(choi).eigenvalues.tolist(),
        "negativity": negativity(choi),
        "entanglement_breaking": is_entanglement_breaking(k),
        "fixed_point_axis": list(fam.axis),
        "fixed_point_deviation": fam.verify(k),
        "cohering_power": cohering,
        "decohering_power": decohering_power(w_eff),
        "W_effective": w_eff,
        "S2_field": field_renyi2(w_eff),
        "input_bloch": qm.bloch_vector(rho_in).tolist(),
        "detector_entropy": qm.von_neumann_entropy(out),
        "detector_renyi2": qm.renyi_entropy(out, 2),
    }


def cmd_analyze(args):
    regime = Regime(args.regime)
    rho_in = qm.check_density(qm.state_from_bloch(parse_floats(args.input)))
    if np.linalg.norm(qm.bloch_vector(rho_in)) > 1 + 1e-12:
        raise ValueError("input Bloch vector must have length <= 1")
    if args.state is None:
        nu = parse_complex(args.nu if args.nu is not None else nu_from_wightman(float(args.W)))
        params = ChannelParams(nu, args.axis, regime)
        r = abs(params.nu)
        w_eff = math.inf if r == 0 else -0.5 * math.log(r)
        cohering = cohering_power(params.nu.imag)
    else:
        spec = _field_spec(args)
        params = spec.channel_params(args.axis, regime)
        w_eff = spec.effective_w()
        cohering = cohering_power(spec.cohering_input())
    emit(args, analyze_report(params, rho_in, w_eff, cohering))


def cmd_sweep(args):
    grid = parse_grid(args.grid)
    regime = Regime(args.regime)

    def row(x):
        if args.param == "nu":
            if not 0 <= x <= 1:
                raise ValueError("nu grid must lie in [0, 1]")
            nu, w = float(x), (math.inf if x == 0 else -0.5 * math.log(x))
        else:
            w = float(x)
            nu = nu_from_wightman(w)
        params = ChannelParams(nu, args.axis, regime)
        k = build_channel(params)
        choi = choi_matrix(k)
        out = apply_channel(k, qm.GROUND)
        return {"W": w, "nu": nu, "p": params.p, "negativity": negativity(choi),
                "entanglement_breaking": is_entanglement_breaking(k),
                "decohering_power": decohering_power(w), "S2_field": field_renyi2(w),
                "S2_detector": qm.renyi_entropy(out, 2)}

    rows = run_rows(row, grid, args.jobs)
    emit(args, rows, ["W", "nu", "p", "negativity", "entanglement_breaking", "decohering_power",
                      "S2_field", "S2_detector"])


_ORACLE_INPUTS = (
    ("ground", qm.GROUND),
    ("plus_axis", None),
    ("mixed", qm.state_from_bloch([0.3, -0.4, 0.5])),
)


def cmd_oracle(args):
    if args.mode is not None:
        param = None
        if args.mode_param is not None:
            vals = parse_floats(args.mode_param)
            if args.mode == "coherent":
                param = complex(vals[0], vals[1] if len(vals) > 1 else 0.0)
            elif args.mode == "weyl_squeeze":
                param = tuple(vals[:2])
            else:
                param = vals[0]
        elif args.mode in ("thermal", "coherent", "squeezed", "weyl_squeeze"):
            raise ValueError(f"mode {args.mode!r} needs --mode-param")
        modes = (ModeState(args.mode, param),)
    else:
        modes = DEFAULT_GRID_MODES
    cfgs = [OracleConfig(float(args.r_f), float(args.u), float(args.v), int(args.dim), m) for m in modes]
    axis_state = qm.state_from_bloch(np.asarray(ChannelParams(1.0, args.axis).axis))
    inputs = [(name, axis_state if rho is None else rho) for name, rho in _ORACLE_INPUTS]
    items = [(c, name, rho) for c in cfgs for name, rho in inputs]

    def run(item):
        c, name, rho = item
        return name, comparison_report(c, rho, args.axis)

    results = run_rows(run, items, args.jobs)
    report = {"r_f": float(args.r_f), "u": float(args.u), "v": float(args.v), "dim": int(args.dim)}
    overall = 0.0
    for name, rep in results:
        prefix = f"{rep['mode_state']}_{name}"
        for key, val in rep.items():
            if key.endswith("deviation"):
                report[f"{prefix}_{key}"] = val
        overall = max(overall, rep["max_deviation"])
    report["max_deviation"] = overall
    try:
        report["modulation_sign"] = modulation_sign(cfgs, [rho for _, rho in inputs], args.axis)
    except ValueError:
        report["modulation_sign"] = 0
    emit(args, report)


# ---------------------------------------------------------------------------
# argument parsing

def _load_config(path) -> dict:
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udwlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, fmt, plot=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--jobs", type=int, default=1, help="worker threads for grid rows")
        sp.add_argument("--config", help="TOML file with default values (flags take precedence)")
        sp.set_defaults(func=fn)
        if plot:
            sp.add_argument("--plot", action="store_true", help="also write a PNG next to --out")
        return sp

    sp = add("fig1", cmd_fig1, "recovery gap for the ground-state input", "csv", plot=True)
    sp.add_argument("--grid", default=DEFAULT_GRIDS["fig1"], help="p grid start:stop:count[:log]")

    sp = add("fig2", cmd_fig2, "recovery gap for detector Gibbs states", "csv", plot=True)
    sp.add_argument("--grid", default=DEFAULT_GRIDS["fig2"], help="p grid")
    sp.add_argument("--beta", default="0.1,1,5", help="comma-separated beta*Omega values")

    sp = add("fig3", cmd_fig3, "field Renyi-2 entropy against temperature", "csv", plot=True)
    sp.add_argument("--grid", default=DEFAULT_GRIDS["fig3"], help="temperature grid in units of 1/T")
    sp.add_argument("--mass", default=None, help="comma-separated masses (default 0,1/T,5/T)")
    sp.add_argument("--lambda", dest="coupling", default=0.1, type=float)
    sp.add_argument("--T", default=1.0, type=float, help="switching width")

    sp = add("wightman", cmd_wightman, "smeared Wightman function of a flat-space detector", "json")
    sp.add_argument("--lambda", dest="coupling", default=1.0, type=float)
    sp.add_argument("--T", default=1.0, type=float)
    sp.add_argument("--mass", default=0.0, type=float)
    sp.add_argument("--beta", default=math.inf, type=float, help="inverse temperature (inf: vacuum)")
    sp.add_argument("--ball-width", dest="ball_width", default=None, type=float)

    sp = add("analyze", cmd_analyze, "channel structure report", "json")
    sp.add_argument("--nu", default=None, help="channel parameter (complex allowed, e.g. 0.3+0.2j)")
    sp.add_argument("--W", default=0.0, type=float, help="two-point value (used when --nu is absent)")
    sp.add_argument("--state", default=None, choices=[k.value for k in StateKind])
    sp.add_argument("--E-alpha", dest="E_alpha", default=0.0, type=float)
    sp.add_argument("--E-zeta", dest="E_zeta", default=0.0, type=float)
    sp.add_argument("--W-zeta", dest="W_zeta", default=0.0, type=float)
    sp.add_argument("--ReW-f-zeta", dest="ReW_f_zeta", default=0.0, type=float)
    sp.add_argument("--axis", default="x")
    sp.add_argument("--regime", default="gapless", choices=[r.value for r in Regime])
    sp.add_argument("--input", default="0,0,1", help="Bloch vector of the detector input state")

    sp = add("oracle", cmd_oracle, "truncated-mode oracle against the analytic channel", "json")
    sp.add_argument("--r-f", dest="r_f", default=0.8, type=float)
    sp.add_argument("--u", default=0.3, type=float)
    sp.add_argument("--v", default=0.7, type=float)
    sp.add_argument("--dim", default=64, type=int)
    sp.add_argument("--mode", default=None,
                    choices=("vacuum", "thermal", "coherent", "squeezed", "weyl_squeeze"))
    sp.add_argument("--mode-param", dest="mode_param", default=None,
                    help="beta_mode, 're,im' of z, r, or 'c1,c2'")
    sp.add_argument("--axis", default="x")

    sp = add("sweep", cmd_sweep, "channel quantities over a W or nu grid", "csv", plot=True)
    sp.add_argument("--grid", default=DEFAULT_GRIDS["sweep"])
    sp.add_argument("--param", default="W", choices=("W", "nu"))
    sp.add_argument("--axis", default="x")
    sp.add_argument("--regime", default="gapless", choices=[r.value for r in Regime])
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    data = _load_config(known.config)
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub_action.choices.items():
        values = dict(flat)
        if isinstance(data.get(name), dict):
            values.update(data[name])
        dests = {a.dest for a in sp._actions}
        values = {k.replace("-", "_"): v for k, v in values.items()}
        if "lambda" in values:
            values["coupling"] = values.pop("lambda")
        sp.set_defaults(**{k: v for k, v in values.items() if k in dests})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"udwlab: error: config: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        args.func(args)
    except QuadratureNoConvergence as exc:
        print(f"udwlab: quadrature failure: {exc}", file=sys.stderr)
        return 3
    except TruncationTooSmall as exc:
        print(f"udwlab: truncation too small: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        print(f"udwlab: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
