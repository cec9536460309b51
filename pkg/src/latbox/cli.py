"""Command-line front end.

Every run resolves a full configuration (precision, seed, workers,
command parameters), embeds it in the emitted report, and renders
numbers as full-precision decimal strings, so identical configurations
give byte-identical CSV/JSON output.

Exit codes: 0 success, 1 input or parse error (including violated
parameter-domain assumptions and exhausted literal precision), 2
mathematical degeneracy (lattice not weakly admissible, vanishing
product minimum, singular input, blown enumeration budget).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import gmpy2
from gmpy2 import mpfr

from . import __version__
from .boxes import (
    AlignedBox,
    count_points,
    skriganov_bound_homogeneous,
    skriganov_bound_inhomogeneous,
    volume,
)
from .dio import (
    build_application,
    corollary_bound,
    parse_irrational,
    phi_from_cf,
)
from .dualcompare import example31_build, nu_profile_compare
from .errors import (
    AssumptionViolationError,
    BudgetExceededError,
    DegenerateLatticeError,
    EmptyCandidateSetError,
    LatboxError,
    NotWeaklyAdmissibleError,
    PrecisionExhaustedError,
    RhoBelowThresholdError,
)
from .linalg import LatticeBasis, Matrix
from .numetrics import hermite_constant, s_sum, weak_admissibility_probe
from .precision import (
    apply_context,
    as_mpfr,
    scalar_str,
    set_working_digits,
    to_scalar,
)
from .reduction import DEFAULT_NODE_BUDGET

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2

_DEGENERATE_ERRORS = (
    NotWeaklyAdmissibleError,
    RhoBelowThresholdError,
    EmptyCandidateSetError,
    DegenerateLatticeError,
    BudgetExceededError,
)


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on bad command lines."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, "%s: error: %s\n" % (self.prog, message))


def _matrix_from_text(text: str) -> Matrix:
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        rows.append([cell.strip() for cell in chunk.split(",")])
    if not rows:
        raise LatboxError("empty matrix literal")
    return Matrix(rows)


def _vector_from_text(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise LatboxError("empty vector literal")
    return tuple(parts)


def _basis_from_args(cfg: dict) -> LatticeBasis:
    if not cfg.get("matrix"):
        raise LatboxError("a --matrix literal is required")
    return LatticeBasis.create(_matrix_from_text(cfg["matrix"]))


def _box_from_args(cfg: dict) -> AlignedBox:
    if not cfg.get("box_t"):
        raise LatboxError("a --box-t literal is required")
    sides = _vector_from_text(cfg["box_t"])
    if cfg.get("box_y"):
        corner = _vector_from_text(cfg["box_y"])
    else:
        corner = ("0",) * len(sides)
    return AlignedBox(sides, corner)


def _geometric_grid(n: int, rho_max, points: int) -> list:
    lo = gmpy2.sqrt(hermite_constant(n).value) * (mpfr(1) + mpfr("1e-3"))
    hi = as_mpfr(to_scalar(rho_max))
    if not hi > lo:
        raise RhoBelowThresholdError(
            "rho_max = %s does not exceed the Hermite threshold" % hi
        )
    if points < 1:
        raise LatboxError("grid needs at least one point")
    if points == 1:
        return [hi]
    step = (hi / lo) ** (mpfr(1) / (points - 1))
    return [lo * step**i for i in range(points - 1)] + [hi]


def _render_csv(config: dict, header: list, rows: list) -> str:
    lines = ["# %s=%s" % (k, config[k]) for k in sorted(config)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(str(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _render_json(config: dict, payload: dict) -> str:
    doc = dict(payload)
    doc["config"] = config
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_nu(cfg: dict):
    basis = _basis_from_args(cfg)
    profile = weak_admissibility_probe(
        basis,
        to_scalar(cfg["rho_max"]),
        grid_points=cfg["grid_points"],
        node_budget=cfg["node_budget"],
    )
    header = ["rho", "nu", "zero_flag", "z"]
    rows = [
        [
            scalar_str(r.rho),
            scalar_str(r.value),
            1 if r.zero_flag else 0,
            " ".join(str(int(c)) for c in r.minimizer.z),
        ]
        for r in profile.rows
    ]
    code = EXIT_DEGENERATE if profile.flagged else EXIT_OK
    if cfg["format"] == "json":
        payload = {
            "flagged": profile.flagged,
            "rows": [dict(zip(header, row)) for row in rows],
        }
        return code, _render_json(cfg["report"], payload)
    return code, _render_csv(cfg["report"], header, rows)


def cmd_count(cfg: dict):
    basis = _basis_from_args(cfg)
    box = _box_from_args(cfg)
    result = count_points(basis, box, node_budget=cfg["node_budget"])
    vol = volume(box)
    payload = {
        "count": result.count,
        "volume": scalar_str(vol),
        "error": scalar_str(result.count - to_scalar(vol)),
        "boundary_warnings": len(result.boundary_warnings),
    }
    if cfg["format"] == "csv":
        header = sorted(payload)
        return EXIT_OK, _render_csv(
            cfg["report"], header, [[payload[k] for k in header]]
        )
    return EXIT_OK, _render_json(cfg["report"], payload)


def _default_rho(basis: LatticeBasis, vol_f: mpfr) -> mpfr:
    n = basis.n
    candidate = vol_f ** (2 - mpfr(2) / n)
    floor_rho = mpfr("1.01") * gmpy2.sqrt(hermite_constant(n).value)
    return max(candidate, floor_rho)


def cmd_bound(cfg: dict):
    basis = _basis_from_args(cfg)
    box = _box_from_args(cfg)
    n = basis.n
    if cfg.get("homogeneous"):
        t_scale = to_scalar(cfg["t_scale"])
        vol_f = as_mpfr(t_scale) ** n
        rho = to_scalar(cfg["rho"]) if cfg.get("rho") else _default_rho(basis, vol_f)
        report = skriganov_bound_homogeneous(
            basis, box, t_scale, rho, node_budget=cfg["node_budget"]
        )
    else:
        vol_f = as_mpfr(volume(box))
        rho = to_scalar(cfg["rho"]) if cfg.get("rho") else _default_rho(basis, vol_f)
        report = skriganov_bound_inhomogeneous(
            basis, box, rho, node_budget=cfg["node_budget"]
        )
    payload = {}
    for name, value in vars(report).items():
        if isinstance(value, int):
            payload[name] = value
        else:
            payload[name] = scalar_str(to_scalar(value))
    if cfg["format"] == "csv":
        header = sorted(payload)
        return EXIT_OK, _render_csv(
            cfg["report"], header, [[payload[k] for k in header]]
        )
    return EXIT_OK, _render_json(cfg["report"], payload)


def cmd_s_sum(cfg: dict):
    basis = _basis_from_args(cfg)
    result = s_sum(basis, to_scalar(cfg["r"]), node_budget=cfg["node_budget"])
    payload = {
        "total": scalar_str(to_scalar(result.total)),
        "member_count": result.member_count,
        "max_term": scalar_str(to_scalar(result.max_term)),
        "r": scalar_str(to_scalar(result.r)),
    }
    if cfg["format"] == "csv":
        header = sorted(payload)
        return EXIT_OK, _render_csv(
            cfg["report"], header, [[payload[k] for k in header]]
        )
    return EXIT_OK, _render_json(cfg["report"], payload)


def cmd_dual_compare(cfg: dict):
    basis = _basis_from_args(cfg)
    grid = _geometric_grid(basis.n, cfg["rho_max"], cfg["grid_points"])
    worst, table = nu_profile_compare(basis, grid, node_budget=cfg["node_budget"])
    header = ["rho", "nu_primal", "nu_dual", "abs_diff"]
    rows = [
        [
            scalar_str(r.rho),
            scalar_str(to_scalar(r.nu_primal)),
            scalar_str(to_scalar(r.nu_dual)),
            scalar_str(to_scalar(r.abs_diff)),
        ]
        for r in table
    ]
    if cfg["format"] == "json":
        payload = {
            "worst_abs_diff": scalar_str(to_scalar(worst)),
            "rows": [dict(zip(header, row)) for row in rows],
        }
        return EXIT_OK, _render_json(cfg["report"], payload)
    return EXIT_OK, _render_csv(cfg["report"], header, rows)


def cmd_example31(cfg: dict):
    n = cfg["n"]
    basis = example31_build(n, seed=cfg["seed"])
    dual = basis.dual()
    probe_rho = to_scalar(cfg["probe_rho"])
    dual_probe = weak_admissibility_probe(
        dual, probe_rho, grid_points=cfg["grid_points"], node_budget=cfg["node_budget"]
    )
    primal_probe = weak_admissibility_probe(
        basis, probe_rho, grid_points=cfg["grid_points"], node_budget=cfg["node_budget"]
    )
    payload = {
        "n": n,
        "matrix": [[scalar_str(e) for e in row] for row in basis.matrix.rows],
        "dual_corner_entry": scalar_str(dual.matrix.entry(n - 1, n - 1)),
        "dual_flagged": dual_probe.flagged,
        "primal_flagged": primal_probe.flagged,
    }
    return EXIT_OK, _render_json(cfg["report"], payload)


def _require(cfg: dict, *names):
    for name in names:
        if not cfg.get(name):
            raise LatboxError("--%s is required" % name.replace("_", "-"))


def cmd_dio(cfg: dict):
    _require(cfg, "alpha", "eps", "t")
    alpha = parse_irrational(cfg["alpha"])
    phi = phi_from_cf(alpha, cfg["q_max"])
    result = corollary_bound(alpha, cfg["y"], cfg["eps"], cfg["t"], phi)
    payload = {
        "alpha": cfg["alpha"],
        "phi_kind": phi.kind,
        "phi_constant": scalar_str(phi.constant) if phi.constant is not None else None,
        "phi_q_checked": phi.q_checked,
        "phi_observed_min": scalar_str(phi.observed_min),
        "phi_universal": phi.universal,
        "count": result.count,
        "volume": scalar_str(to_scalar(result.volume)),
        "abs_error": scalar_str(to_scalar(result.abs_error)),
        "E": scalar_str(result.E),
        "E_prime": scalar_str(result.E_prime),
        "bound": scalar_str(result.bound),
    }
    if cfg.get("cross_check"):
        basis, box = build_application(
            alpha, cfg["y"], cfg["eps"], cfg["t"], check=False
        )
        box_count = count_points(basis, box, node_budget=cfg["node_budget"]).count
        payload["box_count"] = box_count
        payload["abs_n_minus_box"] = abs(result.count - box_count)
    return EXIT_OK, _render_json(cfg["report"], payload)


def _sweep_row(alpha, phi, y, eps, t_text, node_budget):
    apply_context()
    t_val = to_scalar(t_text)
    result = corollary_bound(alpha, y, eps, t_val, phi)
    basis, box = build_application(alpha, y, eps, t_val, check=False)
    box_count = count_points(basis, box, node_budget=node_budget).count
    ln_vol = gmpy2.log(as_mpfr(result.volume))
    return [
        scalar_str(t_val),
        scalar_str(to_scalar(eps)),
        result.count,
        scalar_str(to_scalar(result.volume)),
        scalar_str(to_scalar(result.abs_error)),
        scalar_str(ln_vol),
        scalar_str(result.E),
        scalar_str(result.E_prime),
        scalar_str(result.bound),
        box_count,
        abs(result.count - box_count),
    ]


def cmd_dio_sweep(cfg: dict):
    _require(cfg, "alpha", "eps", "t_list")
    alpha = parse_irrational(cfg["alpha"])
    phi = phi_from_cf(alpha, cfg["q_max"])
    t_texts = _vector_from_text(cfg["t_list"])
    t_sorted = sorted(t_texts, key=lambda s: as_mpfr(to_scalar(s)))
    y = to_scalar(cfg["y"])
    eps = to_scalar(cfg["eps"])
    header = [
        "t",
        "eps",
        "N",
        "vol",
        "abs_error",
        "ln_vol",
        "E",
        "E_prime",
        "bound",
        "box_count",
        "abs_n_minus_box",
    ]
    with ThreadPoolExecutor(max_workers=cfg["workers"]) as pool:
        rows = list(
            pool.map(
                lambda tt: _sweep_row(alpha, phi, y, eps, tt, cfg["node_budget"]),
                t_sorted,
            )
        )
    if cfg["format"] == "json":
        payload = {"rows": [dict(zip(header, row)) for row in rows]}
        return EXIT_OK, _render_json(cfg["report"], payload)
    return EXIT_OK, _render_csv(cfg["report"], header, rows)


_COMMANDS = {
    "nu": cmd_nu,
    "count": cmd_count,
    "bound": cmd_bound,
    "s-sum": cmd_s_sum,
    "dual-compare": cmd_dual_compare,
    "example31": cmd_example31,
    "dio": cmd_dio,
    "dio-sweep": cmd_dio_sweep,
}

_CSV_DEFAULT = {"nu", "dual-compare", "dio-sweep"}


def build_parser() -> _Parser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--precision", type=int, default=None,
                        help="working decimal digits (>= 30, default 50)")
    shared.add_argument("--seed", type=int, default=None,
                        help="seed for randomized constructions (default 0)")
    shared.add_argument("--out", default=None, help="output path (default stdout)")
    shared.add_argument("--format", choices=["csv", "json"], default=None)
    shared.add_argument("--workers", type=int, default=None,
                        help="sweep worker pool size (default: available cores)")
    shared.add_argument("--node-budget", type=int, default=None,
                        help="enumeration/count node budget")
    shared.add_argument("--config", default=None,
                        help="JSON file with the same keys as the flags")

    parser = _Parser(prog="latbox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("nu", parents=[shared],
                       help="product-minimum profile over a radius grid")
    p.add_argument("--matrix", default=None, help="rows 'a,b;c,d' of the basis")
    p.add_argument("--rho-max", default=None)
    p.add_argument("--grid-points", type=int, default=None)

    p = sub.add_parser("count", parents=[shared],
                       help="exact lattice point count in an aligned box")
    p.add_argument("--matrix", default=None)
    p.add_argument("--box-t", default=None, help="side lengths 't1,t2,...'")
    p.add_argument("--box-y", default=None, help="corner 'y1,y2,...' (default 0)")

    p = sub.add_parser("bound", parents=[shared],
                       help="count vs volume with the explicit error bound")
    p.add_argument("--matrix", default=None)
    p.add_argument("--box-t", default=None)
    p.add_argument("--box-y", default=None)
    p.add_argument("--rho", default=None,
                   help="smoothing radius (default max(vol^{2-2/n}, 1.01*sqrt(gamma_n)))")
    p.add_argument("--homogeneous", action="store_true",
                   help="unit-volume box dilated by --t-scale")
    p.add_argument("--t-scale", default=None)

    p = sub.add_parser("s-sum", parents=[shared],
                       help="sum of lambda_1^{-n} over the dyadic dilation family")
    p.add_argument("--matrix", default=None)
    p.add_argument("--r", default=None, help="exponent-vector radius")

    p = sub.add_parser("dual-compare", parents=[shared],
                       help="primal vs dual product-minimum profiles")
    p.add_argument("--matrix", default=None)
    p.add_argument("--rho-max", default=None)
    p.add_argument("--grid-points", type=int, default=None)

    p = sub.add_parser("example31", parents=[shared],
                       help="build a lattice whose dual hits a coordinate hyperplane")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--probe-rho", default=None)
    p.add_argument("--grid-points", type=int, default=None)

    p = sub.add_parser("dio", parents=[shared],
                       help="inhomogeneous approximation count and growth bound")
    p.add_argument("--alpha", default=None, help="surd:a,b,c,d or dec:0.ddd...")
    p.add_argument("--y", default=None)
    p.add_argument("--eps", default=None)
    p.add_argument("--t", default=None)
    p.add_argument("--q-max", type=int, default=None)
    p.add_argument("--cross-check", action="store_true")

    p = sub.add_parser("dio-sweep", parents=[shared],
                       help="growth-bound sweep over a list of t values")
    p.add_argument("--alpha", default=None)
    p.add_argument("--y", default=None)
    p.add_argument("--eps", default=None)
    p.add_argument("--t-list", default=None, help="comma-separated t values")
    p.add_argument("--q-max", type=int, default=None)

    return parser


_COMMAND_DEFAULTS = {
    "nu": {"rho_max": "20", "grid_points": 30},
    "count": {},
    "bound": {"t_scale": "1"},
    "s-sum": {},
    "dual-compare": {"rho_max": "20", "grid_points": 20},
    "example31": {"n": 3, "probe_rho": "20", "grid_points": 15},
    "dio": {"y": "0", "q_max": 10**6},
    "dio-sweep": {"y": "0", "q_max": 10**6},
}


def _resolve_config(args) -> dict:
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise LatboxError("config file must hold a JSON object")
        file_cfg = data

    def pick(name, default=None):
        value = getattr(args, name, None)
        if value is not None:
            return value
        if file_cfg.get(name) is not None:
            return file_cfg[name]
        return default

    cfg = {"command": args.command}
    cfg["precision"] = int(pick("precision", 50))
    cfg["seed"] = int(pick("seed", 0))
    cfg["format"] = pick(
        "format", "csv" if args.command in _CSV_DEFAULT else "json"
    )
    cfg["workers"] = int(pick("workers", os.cpu_count() or 1))
    if cfg["workers"] < 1:
        raise LatboxError("workers must be >= 1")
    cfg["node_budget"] = int(pick("node_budget", DEFAULT_NODE_BUDGET))
    cfg["out"] = pick("out")
    for key, default in _COMMAND_DEFAULTS[args.command].items():
        cfg[key] = pick(key, default)
    # command parameters without baked-in defaults
    for key in (
        "matrix", "box_t", "box_y", "rho", "r", "alpha", "y", "eps", "t",
        "t_list",
    ):
        if hasattr(args, key) and key not in cfg:
            cfg[key] = pick(key)
    for key in ("homogeneous", "cross_check"):
        if hasattr(args, key):
            cfg[key] = bool(pick(key, False))
    # config files may carry integer-valued keys as strings
    for key in ("grid_points", "q_max", "n"):
        if cfg.get(key) is not None:
            cfg[key] = int(cfg[key])
    # the embedded report config: everything that shaped the run
    report = {"version": __version__}
    for key, value in cfg.items():
        if key in ("out",) or value is None:
            continue
        report[key] = value
    cfg["report"] = report
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on parse errors / --help
        return int(exc.code or 0)
    try:
        cfg = _resolve_config(args)
        set_working_digits(cfg["precision"])
        code, text = _COMMANDS[args.command](cfg)
    except AssumptionViolationError as exc:
        print("latbox: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except PrecisionExhaustedError as exc:
        print("latbox: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except _DEGENERATE_ERRORS as exc:
        print("latbox: %s" % exc, file=sys.stderr)
        return EXIT_DEGENERATE
    except LatboxError as exc:
        print("latbox: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print("latbox: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
