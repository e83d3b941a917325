"""Command-line front end.

Subcommands cover the full workflow: ``ingest`` turns delimited DOS data
into a tabulated model document, ``fit`` matches a multi-peak Lorentzian
to it, ``kernel``/``translate``/``classify`` evaluate memory kernels,
coupling functions and Ohmicity, and ``debye`` builds Debye model
documents. Structured results are JSON, curves are CSV (UTF-8, LF line
endings, '.' decimals), and each curve CSV gets a rendered PNG next to
it unless ``--no-plot`` is given.

Exit codes: 0 success, 1 input or usage error, 2 fit did not converge.
All commands are deterministic for fixed inputs and ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import shutil
import sys
from pathlib import Path

import numpy as np

from . import datasets, document
from .document import CouplingDoc, DebyeDoc, ModelDocument
from .fitting import FitOptions, fit_lorentzian
from .kernel import analytic_kernel, kernel_quadrature
from .models import (
    DebyeParams,
    LorentzianSumModel,
    TabulatedDos,
    debye_from_temperature,
    eval_dos,
    support_interval,
)
from .translate import SpectralDensity, classify_ohmicity, coupling_from_dos
from .units import THZ_PER_MEV, omega_from_thz, thz_from_omega

__all__ = ["main", "run", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    # repr gives the shortest decimal that round-trips the double
    return repr(float(value))


def _write_csv(path, header, columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_json(path, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def _check_finite(name: str, *arrays) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} output contains NaN or Inf; refusing to write")


def _figure_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def _split_pair(text: str, what: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"{what} must look like LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ValueError(f"{what} must be numeric, got {text!r}") from exc
    return lo, hi


def cmd_ingest(args) -> int:
    raw = Path(args.path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(raw), delimiter=args.delimiter)
    needed = max(args.freq_col, args.dos_col) + 1
    freqs, dos, errors = [], [], []
    saw_data = False
    for lineno, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        if cells[0].lstrip().startswith("#"):
            continue
        if len(cells) < needed:
            errors.append(f"line {lineno}: expected at least {needed} columns")
            continue
        try:
            f = float(cells[args.freq_col])
            v = float(cells[args.dos_col])
        except ValueError:
            if not saw_data:
                # single header row, auto-detected
                saw_data = True
                continue
            errors.append(f"line {lineno}: non-numeric value")
            continue
        saw_data = True
        freqs.append(f)
        dos.append(v)
    if errors:
        raise ValueError("unparsable rows: " + "; ".join(errors))
    if len(freqs) < 2:
        raise ValueError("need at least two data rows")
    nu_thz = np.asarray(freqs, dtype=float)
    if args.freq_unit == "meV":
        nu_thz = nu_thz * THZ_PER_MEV
    note = args.unit_note or (
        f"source frequency unit {args.freq_unit}; DOS vertical scale arbitrary"
    )
    table = TabulatedDos.from_samples(omega_from_thz(nu_thz), dos, unit_note=note)
    doc = document.from_model(
        table,
        document.spec_from_doc(CouplingDoc()),
        provenance=f"ingested from {args.path}",
    )
    document.save(doc, args.out)
    return 0


def cmd_fit(args) -> int:
    if args.peaks < 1:
        raise ValueError("--peaks must be at least 1")
    doc = document.load(args.data)
    if doc.kind != "tabulated":
        raise ValueError("fit expects a tabulated DOS document (produce one with ingest)")
    table, _ = document.to_model(doc)
    opts = FitOptions(
        n_peaks=args.peaks,
        max_iter=args.max_iter,
        tol=args.tol,
        allow_negative_weights=args.allow_negative,
        seed=args.seed,
        n_restarts=args.restarts,
    )
    report = fit_lorentzian(table, opts)
    fitted = document.from_model(
        report.model,
        document.spec_from_doc(CouplingDoc()),
        provenance=f"lorentzian fit ({args.peaks} peaks, seed {args.seed}) to {args.data}",
    )
    payload = {
        "model": document.as_dict(fitted),
        "fit": {
            "converged": report.converged,
            "iterations": report.iterations,
            "cost": report.cost,
            "rms_residual": report.rms_residual,
            "positivity_ok": report.positivity_ok,
            "ratios": list(report.ratios),
            "n_restarts": opts.n_restarts,
            "seed": opts.seed,
        },
    }
    _write_json(args.out, payload)
    if args.curve:
        nu = thz_from_omega(table.grid)
        fit_vals = report.model.dos(table.grid)
        residual = fit_vals - table.values
        _check_finite("fit curve", nu, table.values, fit_vals, residual)
        _write_csv(
            args.curve,
            ["nu_thz", "dos_data", "dos_fit", "residual"],
            [nu, table.values, fit_vals, residual],
        )
        if not args.no_plot:
            from .plotting import save_fit_figure

            save_fit_figure(
                _figure_path(args.curve),
                nu,
                table.values,
                fit_vals,
                residual,
                title=f"{args.peaks}-peak Lorentzian fit",
            )
    return 0 if report.converged else 2


def cmd_kernel(args) -> int:
    doc = document.load(args.model)
    model, spec = document.to_model(doc)
    if args.tau_max < 0:
        raise ValueError("--tau-max must be nonnegative")
    if args.n < 1:
        raise ValueError("--n must be at least 1")
    if args.tau_max == 0 or args.n == 1:
        taus = np.array([0.0])
    else:
        taus = np.linspace(0.0, args.tau_max, args.n)
    header = ["tau_ps"]
    columns = [taus]
    curves = {}
    if args.method in ("analytic", "both"):
        if isinstance(model, TabulatedDos):
            raise ValueError(
                "no closed-form kernel for tabulated models; use --method quadrature"
            )
        k_an = analytic_kernel(model, spec, taus).values
        header.append("k_analytic")
        columns.append(k_an)
        curves["analytic"] = k_an
    if args.method in ("quadrature", "both"):
        curve = kernel_quadrature(model, spec, taus)
        if curve.warning:
            print(f"warning: {curve.warning}", file=sys.stderr)
        header.append("k_quadrature")
        columns.append(curve.values)
        curves["quadrature"] = curve.values
    if args.method == "both":
        scale = float(np.max(np.abs(curves["analytic"])))
        if scale == 0.0:
            rel = np.zeros_like(taus)
        else:
            rel = np.abs(curves["analytic"] - curves["quadrature"]) / scale
        header.append("rel_err")
        columns.append(rel)
    _check_finite("kernel", *columns)
    _write_csv(args.out, header, columns)
    if not args.no_plot:
        from .plotting import save_kernel_figure

        save_kernel_figure(_figure_path(args.out), taus, curves, title=doc.kind)
    return 0


def cmd_translate(args) -> int:
    doc = document.load(args.model)
    model, spec = document.to_model(doc)
    lo, hi = _split_pair(args.grid.rsplit(":", 1)[0], "--grid")
    try:
        n = int(args.grid.rsplit(":", 1)[1])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"--grid must look like LO:HI:N, got {args.grid!r}") from exc
    if not (0 <= lo < hi) or n < 2:
        raise ValueError("--grid needs 0 <= LO < HI and N >= 2")
    nu = np.linspace(lo, hi, n)
    w = omega_from_thz(nu)
    slo, shi = support_interval(model)
    if isinstance(model, TabulatedDos) and (w[0] < slo or w[-1] > shi):
        raise ValueError("grid extends outside the tabulated frequency range")
    dos_vals = np.asarray(eval_dos(model, w), dtype=float)
    coupling = coupling_from_dos(model, spec)
    c_vals = np.asarray(coupling(w), dtype=float)
    j_vals = np.empty_like(c_vals)
    positive = w > 0
    j_vals[positive] = c_vals[positive] ** 2 / w[positive]
    if np.any(~positive):
        if np.any(c_vals[~positive] != 0):
            raise ValueError(
                "spectral density diverges at zero frequency; start the grid above 0"
            )
        j_vals[~positive] = 0.0
    _check_finite("translate", nu, dos_vals, c_vals, j_vals)
    _write_csv(
        args.out,
        ["nu_thz", "dos", "coupling_c", "spectral_j"],
        [nu, dos_vals, c_vals, j_vals],
    )
    if not args.no_plot:
        from .plotting import save_translate_figure

        save_translate_figure(
            _figure_path(args.out), nu, dos_vals, c_vals, j_vals, title=doc.kind
        )
    return 0


def _default_window_thz(model) -> tuple:
    if isinstance(model, LorentzianSumModel):
        nu_min = thz_from_omega(float(model.omega0s.min()))
        return nu_min / 100.0, nu_min / 10.0
    if isinstance(model, DebyeParams):
        nu_d = thz_from_omega(model.cutoff)
        return nu_d / 100.0, nu_d / 2.0
    lo = thz_from_omega(float(model.grid[0]))
    hi = thz_from_omega(float(model.grid[-1]))
    if lo <= 0:
        lo = thz_from_omega(float(model.grid[1]))
    return lo, min(10.0 * lo, hi)


def cmd_classify(args) -> int:
    doc = document.load(args.model)
    model, spec = document.to_model(doc)
    if args.window:
        lo, hi = _split_pair(args.window, "--window")
    else:
        lo, hi = _default_window_thz(model)
    if not (0 < lo < hi):
        raise ValueError("--window needs 0 < LO < HI")
    wlo, whi = omega_from_thz(lo), omega_from_thz(hi)
    slo, shi = support_interval(model)
    if wlo < slo or whi > shi:
        raise ValueError("classification window lies outside the model support")
    j = SpectralDensity(coupling_from_dos(model, spec))
    report = classify_ohmicity(j, (wlo, whi), 64)
    print(
        json.dumps(
            {
                "s": report.s,
                "class": report.classification,
                "window_thz": [lo, hi],
                "r_squared": report.r_squared,
                "n_samples": report.n_samples,
            },
            indent=2,
        )
    )
    return 0


def cmd_debye(args) -> int:
    dim = args.dim
    d_s = args.ds if args.ds is not None else dim
    if not (1 <= d_s <= dim):
        raise ValueError("--ds must be between 1 and --dim")
    if args.cutoff_thz is not None:
        nu_d = args.cutoff_thz
        origin = f"cutoff {args.cutoff_thz} THz"
    else:
        nu_d = thz_from_omega(debye_from_temperature(args.debye_temp))
        origin = f"Debye temperature {args.debye_temp} K"
    if not nu_d > 0:
        raise ValueError("Debye cutoff must be positive")
    doc = ModelDocument(
        "debye",
        CouplingDoc("constant", g=args.g, d_s=d_s, d=dim),
        debye=DebyeDoc(args.c, nu_d, dim),
        provenance=args.provenance or f"Debye model from {origin}, c = {args.c} km/s",
    )
    if args.out:
        document.save(doc, args.out)
    else:
        print(document.dumps(doc), end="")
    return 0


def cmd_examples(args) -> int:
    if args.export:
        target = Path(args.export)
        target.mkdir(parents=True, exist_ok=True)
        for name in datasets.EXAMPLE_DATA_FILES:
            src = datasets.document_path(name)
            shutil.copyfile(src, target / src.name)
            print(target / src.name)
    else:
        for name in datasets.EXAMPLE_DATA_FILES:
            print(name)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="bathlink",
        description="Translate bath densities of states into coupling functions, "
        "fit multi-peak Lorentzian DOS models, and evaluate memory kernels.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="delimited DOS data -> tabulated model document")
    p.add_argument("path", help="delimited text file with frequency and DOS columns")
    p.add_argument("--freq-unit", choices=["THz", "meV"], default="THz")
    p.add_argument("--freq-col", type=int, default=0)
    p.add_argument("--dos-col", type=int, default=1)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--unit-note", default="", help="free-text record of source units")
    p.add_argument("--out", required=True, help="output document path (JSON)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit a multi-peak Lorentzian DOS to tabulated data")
    p.add_argument("data", help="tabulated model document (from ingest)")
    p.add_argument("--peaks", type=int, required=True, help="number of Lorentzian peaks")
    p.add_argument("--allow-negative", action="store_true",
                   help="allow negative peak weights (needed for gapped spectra)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True, help="fit report path (JSON)")
    p.add_argument("--curve", help="optional curve CSV (data, fit, residual)")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG next to the CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("kernel", help="evaluate the memory kernel of a model document")
    p.add_argument("model", help="model document (JSON)")
    p.add_argument("--tau-max", type=float, default=2.0, help="largest time in ps")
    p.add_argument("--n", type=int, default=512, help="number of time samples")
    p.add_argument("--method", choices=["analytic", "quadrature", "both"],
                   default="quadrature")
    p.add_argument("--out", required=True, help="kernel CSV path")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("translate", help="tabulate DOS, coupling C and spectral density J")
    p.add_argument("model", help="model document (JSON)")
    p.add_argument("--grid", required=True, help="frequency grid LO:HI:N in THz")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("classify", help="Ohmicity class of the model's spectral density")
    p.add_argument("model", help="model document (JSON)")
    p.add_argument("--window", help="fit window LO:HI in THz (default: model-dependent)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("debye", help="build a Debye model document")
    p.add_argument("--c", type=float, required=True, help="sound speed in km/s")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cutoff-thz", type=float, help="Debye frequency nu_D in THz")
    group.add_argument("--debye-temp", type=float, help="Debye temperature in K")
    p.add_argument("--dim", type=int, choices=[1, 2, 3], default=3)
    p.add_argument("--ds", type=int, help="system dimension (default: same as --dim)")
    p.add_argument("--g", type=float, default=1.0, help="constant coupling strength")
    p.add_argument("--provenance", default="")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_debye)

    p = sub.add_parser("examples", help="list or export the bundled example files")
    p.add_argument("--export", metavar="DIR", help="copy the bundled files to DIR")
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
