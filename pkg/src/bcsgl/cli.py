"""Command-line front end: gap solve, GL coefficients, T_c(B), GL
minimization, and the verification suite.

Every command writes its results as files into ``--out`` (JSON / delimited
text, plus rendered figures) and prints a short summary — machine-readable
with ``--json``.  All outputs are deterministic: rerunning a command
reproduces every file byte for byte.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .gap import GapSolution, critical_temperature
from .glcoeff import GLCoefficients, compute_coefficients, tc_shift
from .glmin import MagneticCell, egl_curve, threshold_exponent
from .model import RadialFunction, builtin_potential, load_radial, save_radial
from .verify import run_identity_suite

__all__ = ["main", "entry"]

_FIGURE_DPI = 150


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Fully resolved settings for one command invocation."""

    command: str
    out: Path
    mu: float = 1.0
    potential: str = "gaussian:v0=2,a=1"
    bracket: tuple = (0.05, 0.3)
    d_range: tuple = (0.5, 1.5, 5)
    b_range: tuple | None = None  # None: 0 .. 0.8/Dc once Dc is known
    cell_n: int = 64
    seed: int = 20260818
    groups: list | None = None
    as_json: bool = False


def _parse_pair(text: str, what: str) -> tuple:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"{what} wants LO,HI, got {text!r}")
    lo, hi = (float(t) for t in parts)
    if not lo < hi:
        raise ValueError(f"{what} needs LO < HI, got {text!r}")
    return lo, hi


def _parse_triple(text: str, what: str) -> tuple:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"{what} wants LO,HI,STEPS, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    steps = int(parts[2])
    if steps < 1:
        raise ValueError(f"{what} needs at least one step")
    if steps > 1 and not lo < hi:
        raise ValueError(f"{what} needs LO < HI, got {text!r}")
    return lo, hi, steps


def _parse_potential_spec(spec: str) -> RadialFunction:
    """Build a potential from 'family:key=val,...' or 'file:PATH'."""
    name, _, argstr = spec.partition(":")
    name = name.strip()
    if name == "file":
        if not argstr:
            raise ValueError("file potential wants a path: file:PATH")
        return load_radial(argstr)
    params: dict = {}
    if argstr:
        for item in argstr.split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"bad potential parameter {item!r} (want key=value)")
            key = key.strip()
            params[key] = int(val) if key in ("n_panels", "order") else float(val)
    return builtin_potential(name, **params)


_CONFIG_KEYS = ("mu", "potential", "bracket", "d_range", "b_range", "cell_n", "seed", "out", "groups")


def _read_config_file(path: str) -> dict:
    """Flat key=value settings from an INI file ([run] section or top level)."""
    if not os.path.exists(path):
        raise ValueError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ValueError(f"malformed config file {path}: {exc}") from exc
    found: dict = {}
    sections = ["DEFAULT"] + [s for s in cp.sections()]
    for sec in sections:
        for key in _CONFIG_KEYS:
            if cp.has_option(sec, key):
                found[key] = cp.get(sec, key)
    return found


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, out=Path("."))
    file_vals = _read_config_file(args.config) if args.config else {}

    def pick(flag_val, key):
        return flag_val if flag_val is not None else file_vals.get(key)

    out = pick(args.out, "out")
    if out is not None:
        cfg.out = Path(out)
    mu = pick(args.mu, "mu")
    if mu is not None:
        cfg.mu = float(mu)
    pot = pick(args.potential, "potential")
    if pot is not None:
        cfg.potential = str(pot)
        _parse_potential_spec(cfg.potential)  # a bad spec is a config error, not a solver one
    bracket = pick(args.bracket, "bracket")
    if bracket is not None:
        cfg.bracket = _parse_pair(bracket, "--bracket")
    d_range = pick(getattr(args, "d_range", None), "d_range")
    if d_range is not None:
        cfg.d_range = _parse_triple(d_range, "--d-range")
    b_range = pick(getattr(args, "b_range", None), "b_range")
    if b_range is not None:
        cfg.b_range = _parse_triple(b_range, "--b-range")
    cell_n = pick(getattr(args, "cell_n", None), "cell_n")
    if cell_n is not None:
        cfg.cell_n = int(cell_n)
        if cfg.cell_n < 2 or cfg.cell_n % 2:
            raise ValueError(f"--cell-n must be an even integer >= 2, got {cfg.cell_n}")
    seed = pick(getattr(args, "seed", None), "seed")
    if seed is not None:
        cfg.seed = int(seed)
    groups = pick(getattr(args, "groups", None), "groups")
    if groups is not None:
        cfg.groups = [g.strip() for g in str(groups).split(",") if g.strip()]
    cfg.as_json = bool(args.json)
    if not (cfg.bracket[0] > 0):
        raise ValueError("--bracket temperatures must be positive")
    if cfg.mu <= 0:
        raise ValueError("--mu must be positive (the derivation lives at mu > 0)")
    return cfg


# ---------------------------------------------------------------------------
# deterministic output helpers
# ---------------------------------------------------------------------------


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_figure(fig, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    # a pinned dpi and no Software tag keep the bytes reproducible
    fig.savefig(tmp, format="png", dpi=_FIGURE_DPI, metadata={"Software": None})
    plt.close(fig)
    os.replace(tmp, path)


def _save_radial_atomic(f: RadialFunction, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    save_radial(f, tmp)
    os.replace(tmp, path)


def _emit(cfg: RunConfig, payload: dict, human_lines: list) -> None:
    if cfg.as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _solve_gap(cfg: RunConfig) -> GapSolution:
    V = _parse_potential_spec(cfg.potential)
    return critical_temperature(V, cfg.mu, bracket=cfg.bracket)


def _solve_coeffs(cfg: RunConfig) -> tuple:
    sol = _solve_gap(cfg)
    return sol, compute_coefficients(sol)


def cmd_gap(cfg: RunConfig) -> int:
    sol = _solve_gap(cfg)
    payload = sol.to_json_dict()
    _write_json(cfg.out / "gap.json", payload)
    _save_radial_atomic(sol.alpha_star, cfg.out / "alpha_star.txt")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    mask = sol.alpha_star.nodes <= 30.0
    ax1.plot(sol.alpha_star.nodes[mask], sol.alpha_star.values[mask], lw=1.2)
    ax1.axhline(0.0, color="0.6", lw=0.6)
    ax1.set_xlabel("r")
    ax1.set_ylabel(r"$\alpha_*(r)$")
    ax1.set_title(f"pair state at $T_c$ = {sol.Tc:.6f}")
    ax2.plot(sol.alpha_hat.nodes, sol.alpha_hat.values, lw=1.2)
    ax2.set_xlabel("p")
    ax2.set_ylabel(r"$\hat\alpha(p)$")
    ax2.set_title(rf"momentum profile, $\mu$ = {sol.mu:g}")
    fig.tight_layout()
    _write_figure(fig, cfg.out / "alpha_star.png")

    _emit(
        cfg,
        payload,
        [
            f"T_c                 {sol.Tc:.12f}",
            f"eta(T_c) - 1        {sol.eta_residual:.3e}",
            f"gap-equation resid  {sol.gap_residual:.3e}",
            f"spectral gap kappa  {sol.kappa:.8f}",
            f"wrote gap.json, alpha_star.txt, alpha_star.png -> {cfg.out}",
        ],
    )
    return 0


def cmd_coeffs(cfg: RunConfig) -> int:
    _, coeffs = _solve_coeffs(cfg)
    payload = coeffs.to_json_dict()
    _write_json(cfg.out / "coeffs.json", payload)
    _emit(
        cfg,
        payload,
        [
            f"Lambda_0  {coeffs.Lambda0:.12e}",
            f"Lambda_2  {coeffs.Lambda2:.12e}",
            f"Lambda_3  {coeffs.Lambda3:.12e}",
            f"D_c       {coeffs.Dc:.12e}",
            f"T_c       {coeffs.Tc:.12f}",
            f"wrote coeffs.json -> {cfg.out}",
        ],
    )
    return 0


def cmd_tcshift(cfg: RunConfig) -> int:
    _, coeffs = _solve_coeffs(cfg)
    if cfg.b_range is not None:
        lo, hi, steps = cfg.b_range
    else:
        lo, hi, steps = 0.0, 0.8 / coeffs.Dc, 9
    B = np.linspace(lo, hi, steps)
    tc = np.atleast_1d(tc_shift(coeffs.Tc, coeffs.Dc, B))

    rows = ["# B tc"]
    rows += [f"{b:.12e} {t:.12e}" for b, t in zip(B, tc)]
    _write_text(cfg.out / "tcshift.csv", "\n".join(rows) + "\n")

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(B, tc, "o-", ms=3.5, lw=1.2)
    ax.axhline(0.0, color="0.6", lw=0.6, ls="--")
    ax.set_xlabel("B")
    ax.set_ylabel(r"$T_c(B)$")
    ax.set_title(rf"$T_c(B) = T_c(1 - D_c B)$,  $D_c$ = {coeffs.Dc:.4f}")
    fig.tight_layout()
    _write_figure(fig, cfg.out / "tcshift.png")

    payload = {
        "Tc": coeffs.Tc,
        "Dc": coeffs.Dc,
        "B": [float(b) for b in B],
        "tc": [float(t) for t in tc],
    }
    _emit(
        cfg,
        payload,
        [
            f"T_c(0)    {coeffs.Tc:.12f}",
            f"D_c       {coeffs.Dc:.12e}",
            f"B range   [{B[0]:g}, {B[-1]:g}] in {len(B)} steps",
            f"wrote tcshift.csv, tcshift.png -> {cfg.out}",
        ],
    )
    return 0


def cmd_glmin(cfg: RunConfig) -> int:
    _, coeffs = _solve_coeffs(cfg)
    cell = MagneticCell(B=1.0, N=cfg.cell_n)
    lo, hi, steps = cfg.d_range
    d_over = np.linspace(lo, hi, steps)
    results = egl_curve(d_over * coeffs.Dc, coeffs, cell, seed=cfg.seed)
    try:
        exponent = threshold_exponent(results, coeffs.Dc)
    except ValueError:
        exponent = None

    rows = ["# D D_over_Dc energy"]
    rows += [
        f"{r.D:.12e} {f:.12e} {r.energy:.12e}" for f, r in zip(d_over, results)
    ]
    _write_text(cfg.out / "egl_curve.csv", "\n".join(rows) + "\n")

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(d_over, [r.energy for r in results], "o-", ms=3.5, lw=1.2)
    ax.axvline(1.0, color="0.6", lw=0.6, ls="--")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(r"$D / D_c$")
    ax.set_ylabel(r"$E_{\mathrm{GL}}$")
    ax.set_title(f"minimized GL energy, {cell.N} x {cell.N} cell")
    fig.tight_layout()
    _write_figure(fig, cfg.out / "egl_curve.png")

    last = results[-1]
    psi = last.psi.values
    coords = cell.h * np.arange(cell.N)
    lines = [
        f"# cell: N={cell.N} side={cell.side:.17g} B={cell.B:g} D={last.D:.17g}",
        "# columns: x y re(psi) im(psi)",
    ]
    for i in range(cell.N):
        for j in range(cell.N):
            lines.append(
                f"{coords[i]:.17g} {coords[j]:.17g} "
                f"{psi[i, j].real:.17g} {psi[i, j].imag:.17g}"
            )
    _write_text(cfg.out / "psi.txt", "\n".join(lines) + "\n")

    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    im = ax.imshow(
        np.abs(psi).T,
        origin="lower",
        extent=(0.0, cell.side, 0.0, cell.side),
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label=r"$|\psi|$")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(rf"minimizer at $D/D_c$ = {d_over[-1]:g}")
    fig.tight_layout()
    _write_figure(fig, cfg.out / "psi.png")

    payload = {
        "coefficients": coeffs.to_json_dict(),
        "cell": {"B": cell.B, "N": cell.N, "side": cell.side},
        "results": [
            dict(r.to_json_dict(), D_over_Dc=float(f))
            for f, r in zip(d_over, results)
        ],
        "threshold_exponent": exponent,
    }
    _write_json(cfg.out / "glmin.json", payload)

    lines = [
        f"D_c       {coeffs.Dc:.12e}",
        f"cell      {cell.N} x {cell.N}, side {cell.side:.6f}, B = {cell.B:g}",
    ]
    lines += [
        f"E(D = {f:.3f} D_c)  {r.energy: .6e}" for f, r in zip(d_over, results)
    ]
    if exponent is not None:
        lines.append(f"threshold exponent  {exponent:.4f}")
    lines.append(
        f"wrote glmin.json, egl_curve.csv, egl_curve.png, psi.txt, psi.png -> {cfg.out}"
    )
    _emit(cfg, payload, lines)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    suite_cfg: dict = {"cell_n": cfg.cell_n, "seed": cfg.seed}
    if cfg.groups is not None:
        suite_cfg["groups"] = cfg.groups
    report = run_identity_suite(suite_cfg)
    _write_text(cfg.out / "verify.jsonl", report.to_jsonl())

    if cfg.as_json:
        print(json.dumps(report.summary(), sort_keys=True))
    else:
        width = max((len(e.name) for e in report.entries), default=10)
        for e in report.entries:
            status = "pass" if e.passed else "FAIL"
            err = f"{e.error:.3e}" if np.isfinite(e.error) else "inf"
            print(f"{e.name:<{width}}  {err:>10}  (tol {e.tol:g})  {status}")
        print(f"{report.n_passed}/{report.n_total} checks passed")
        print(f"wrote verify.jsonl -> {cfg.out}")
    return 0 if report.passed else 3


_COMMANDS = {
    "gap": cmd_gap,
    "coeffs": cmd_coeffs,
    "tcshift": cmd_tcshift,
    "glmin": cmd_glmin,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    numerical failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bcsgl",
        description="BCS gap problem, GL coefficients, and the critical-field ratio.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_common(p):
        p.add_argument("--config", metavar="PATH", help="INI file with key=value settings")
        p.add_argument("--out", metavar="DIR", help="output directory (default: .)")
        p.add_argument("--json", action="store_true", help="print the summary as JSON")

    def add_problem(p):
        p.add_argument("--mu", type=float, help="chemical potential (default 1)")
        p.add_argument(
            "--potential",
            metavar="SPEC",
            help="potential: 'gaussian:v0=2,a=1', 'yukawa-cut:rc=0.1', or 'file:PATH' "
            "(default gaussian)",
        )
        p.add_argument("--bracket", metavar="LO,HI", help="T_c search bracket (default 0.05,0.3)")

    p = sub.add_parser("gap", help="solve the gap problem: T_c and the pair state")
    add_common(p)
    add_problem(p)

    p = sub.add_parser("coeffs", help="GL coefficients and the critical ratio D_c")
    add_common(p)
    add_problem(p)

    p = sub.add_parser("tcshift", help="critical temperature in a weak field")
    add_common(p)
    add_problem(p)
    p.add_argument(
        "--b-range",
        dest="b_range",
        metavar="LO,HI,STEPS",
        help="field sweep (default 0,0.8/D_c,9)",
    )

    p = sub.add_parser("glmin", help="minimize the GL energy on the magnetic cell")
    add_common(p)
    add_problem(p)
    p.add_argument(
        "--d-range",
        dest="d_range",
        metavar="LO,HI,STEPS",
        help="sweep of D/D_c values (default 0.5,1.5,5)",
    )
    p.add_argument("--cell-n", dest="cell_n", metavar="N", help="lattice points per side (default 64)")
    p.add_argument("--seed", metavar="INT", help="minimizer noise seed")

    p = sub.add_parser("verify", help="run the numerical certification suite")
    add_common(p)
    p.add_argument(
        "--groups",
        metavar="LIST",
        help="comma list from symbols,gap,coeffs,glmin (default: all)",
    )
    p.add_argument("--cell-n", dest="cell_n", metavar="N", help="lattice points per side (default 64)")
    p.add_argument("--seed", metavar="INT", help="seed for the randomized checks")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr in ("mu", "potential", "bracket", "out", "config", "json"):
        if not hasattr(args, attr):
            setattr(args, attr, None if attr != "json" else False)
    try:
        cfg = _resolve_config(args)
    except ValueError as exc:
        print(f"bcsgl: error: {exc}", file=sys.stderr)
        return 1
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[cfg.command](cfg)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"bcsgl: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
