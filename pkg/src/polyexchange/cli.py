"""Command-line front end.

Exit codes: 0 when every check passes, 1 for a failed mathematical verdict,
2 for bad input or a degenerate direction. Reports are written as sorted,
indented JSON and CSV with rationals as ``num/den``; the worker count never
enters an output file, so reruns are byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .core import as_rational, format_rational
from .cube import (
    UncertifiedDirection,
    build_cube_section_exchange,
    certify_generic,
    certify_square_direction,
    construct_two_diagonals,
    counterexample,
    cube_complexity,
    lattice_diagonals,
)
from .exchange import (
    ExchangeError,
    Exchange,
    generalized_diagonals,
    idoc2_certify,
    language,
    prop1_complexity,
)
from .prism import (
    BASES,
    PrismLanguage,
    PrismModel,
    UnsupportedBase,
    build_prism_exchange,
    certify_prism_direction,
    corollary_check,
    diagonal_bounds,
    stabilization_check,
)
from .section import DegenerateDirection

DEFAULT_OMEGA = "104729/1000003,224737/1000003,350377/1000003"


class InputError(click.ClickException):
    exit_code = 2


def parse_omega(text: str, size=(3,)):
    try:
        om = tuple(as_rational(part) for part in text.split(","))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad direction {text!r}: {exc}") from None
    if len(om) not in size:
        raise InputError(f"direction needs {' or '.join(map(str, size))} components, got {len(om)}")
    return om


def _check_config(nmax, horizon, precision=None):
    if nmax < 1:
        raise InputError("nmax must be at least 1")
    if horizon is not None and horizon < nmax:
        raise InputError("horizon must be at least nmax")
    if precision is not None and precision < 53:
        raise InputError("precision must be at least 53 bits")


def _plain(obj):
    """JSON-ready copy: rationals become ``num/den`` strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    try:
        return format_rational(obj)
    except (TypeError, ValueError):
        return str(obj)


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def complexity_csv(p: list, N: list) -> str:
    """Rows ``n,p,s,delta_s,N``; fields that need data beyond the table stay empty."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "p", "s", "delta_s", "N"])
    m = len(p)
    for n in range(1, m + 1):
        s = p[n] - p[n - 1] if n < m else ""
        ds = p[n + 1] - 2 * p[n] + p[n - 1] if n + 1 < m else ""
        w.writerow([n, p[n - 1], s, ds, N[n - 1] if n <= len(N) else ""])
    return buf.getvalue()


def svg_curves(title: str, series: dict, *, width=480, height=320) -> str:
    """A bare line plot, one polyline per series over ``n = 1, 2, ...``."""
    pad = 40
    vals = [float(v) for ys in series.values() for v in ys] or [0.0]
    lo, hi = min(0.0, min(vals)), max(vals) or 1.0
    count = max((len(ys) for ys in series.values()), default=1)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]

    def xy(i, v):
        x = pad + (width - 2 * pad) * (i / max(count - 1, 1))
        y = height - pad - (height - 2 * pad) * ((float(v) - lo) / ((hi - lo) or 1.0))
        return f"{x:.2f},{y:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{pad}" y="20" font-size="13">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for k, (name, ys) in enumerate(series.items()):
        c = colors[k % len(colors)]
        pts = " ".join(xy(i, v) for i, v in enumerate(ys))
        out.append(f'<polyline fill="none" stroke="{c}" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 90}" y="{pad + 15 * k}" font-size="11" fill="{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


class Writer:
    def __init__(self, out):
        self.dir = Path(out) if out else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def __call__(self, name: str, text: str):
        if self.dir:
            (self.dir / name).write_text(text)


def _fail(kind: str, detail: str, code: int = 2):
    click.echo(dumps({"error": kind, "detail": detail}), err=True, nl=False)
    sys.exit(code)


def _guard(fn):
    """Map domain errors to exit code 2 with a machine-readable reason."""

    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DegenerateDirection as exc:
            _fail("degenerate-direction", str(exc))
        except UncertifiedDirection as exc:
            cert = exc.certificate.to_dict() if exc.certificate is not None else None
            click.echo(dumps({"error": "uncertified-direction", "detail": str(exc), "certificate": cert}),
                       err=True, nl=False)
            sys.exit(2)
        except UnsupportedBase as exc:
            _fail("unsupported-base", str(exc))
        except ExchangeError as exc:
            _fail("invalid-exchange", str(exc))

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


omega_opt = click.option("--omega", default=DEFAULT_OMEGA, show_default=True,
                         help="comma-separated rationals")
nmax_opt = click.option("--nmax", default=10, show_default=True, type=int)
horizon_opt = click.option("--horizon", default=None, type=int, help="defaults to nmax")
out_opt = click.option("--out", default=None, type=click.Path(file_okay=False), help="report directory")
svg_opt = click.option("--emit-svg", is_flag=True, help="also write SVG plots")
workers_opt = click.option("--workers", default=1, show_default=True, type=int)
precision_opt = click.option("--precision", default=128, show_default=True, type=int)


@click.group()
def main():
    """Exact experiments on polygon exchanges and polyhedral billiards."""


@main.command()
@omega_opt
@nmax_opt
@horizon_opt
@out_opt
@svg_opt
@workers_opt
@precision_opt
@click.option("--counterexample", "with_counterexample", is_flag=True,
              help="also verify the transcendental triple-edge witness")
@_guard
def cube(omega, nmax, horizon, out, emit_svg, workers, precision, with_counterexample):
    """Complexity and diagonals of the cube billiard."""
    _check_config(nmax, horizon, precision)
    om = parse_omega(omega)
    horizon = horizon or nmax
    build_cube_section_exchange(om)  # corner degeneracies first
    cert = certify_generic(om, horizon)
    if not cert.passed:
        raise UncertifiedDirection(f"direction fails genericity at horizon {horizon}", cert)
    report = cube_complexity(om, nmax, workers=workers)
    oracle = lattice_diagonals(om, nmax)
    buf = io.StringIO()
    rows = csv.writer(buf, lineterminator="\n")
    rows.writerow(["n", "start_type", "end_type", "start", "end"])
    for n in range(1, nmax + 1):
        for d in construct_two_diagonals(om, n):
            rows.writerow([n, d.start_type, d.end_type, *(";".join(map(format_rational, q)) for q in (d.start, d.end))])
    oracle_ok = report.N == [len(oracle[n]) for n in range(1, nmax + 1)] == [2] * nmax
    payload = report.to_dict()
    payload["horizon"] = horizon
    payload["certificate"] = cert.to_dict()
    payload["N_oracle_agrees"] = oracle_ok
    ok = report.theorem_ok and oracle_ok
    if with_counterexample:
        payload["counterexample"] = counterexample(precision)
        ok = ok and payload["counterexample"]["ok"]
    w = Writer(out)
    w("certificate.json", dumps(cert.to_dict()))
    w("complexity.csv", complexity_csv(report.p, report.N))
    w("diagonals.csv", buf.getvalue())
    w("report.json", dumps(payload))
    if emit_svg:
        w("complexity.svg", svg_curves("p(n)", {"p(n)": report.p, "n^2+n+1": [n * n + n + 1 for n in range(1, nmax + 1)]}))
    click.echo(dumps({"theorem_ok": report.theorem_ok, "N_is_2": oracle_ok, "ok": ok}), nl=False)
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("fixture", required=False, type=click.Path(dir_okay=False))
@click.option("--omega", default=None, help="use the cube section exchange in this direction")
@nmax_opt
@horizon_opt
@out_opt
@svg_opt
@workers_opt
@_guard
def exchange(fixture, omega, nmax, horizon, out, emit_svg, workers):
    """Language, diagonals and the closed-form identity for an exchange."""
    _check_config(nmax, horizon)
    if (fixture is None) == (omega is None):
        raise InputError("give either a fixture path or --omega")
    if fixture is not None:
        try:
            ex = Exchange.load(fixture)
        except OSError as exc:
            raise InputError(str(exc)) from None
    else:
        ex, _ = build_cube_section_exchange(parse_omega(omega))
    ex.validate()
    horizon = horizon or nmax
    lang = language(ex, nmax, workers=workers, validate=False)
    p = lang.complexity()
    N = generalized_diagonals(ex, max(nmax - 2, 1), refinement=lang.refinement).counts()
    mismatches = [n for n in range(3, nmax + 1) if prop1_complexity(p[0], p[1], N, n) != p[n - 1]]
    cert = idoc2_certify(ex, horizon)
    payload = {
        "p": p,
        "N": N,
        "identity_ok": not mismatches,
        "identity_mismatches": mismatches,
        "idoc2": cert.to_dict(),
    }
    w = Writer(out)
    w("complexity.csv", complexity_csv(p, N))
    w("report.json", dumps(payload))
    if emit_svg:
        w("complexity.svg", svg_curves("p(n)", {"p(n)": p}))
    click.echo(dumps({"identity_ok": not mismatches, "idoc2": cert.status}), nl=False)
    sys.exit(0 if not mismatches else 1)


@main.command()
@click.option("--base", default="hexagon", show_default=True)
@click.option("--height", default="1", show_default=True)
@omega_opt
@nmax_opt
@horizon_opt
@click.option("--coding", type=click.Choice(["M", "M1", "M2"]), default="M", show_default=True)
@out_opt
@svg_opt
@workers_opt
@_guard
def prism(base, height, omega, nmax, horizon, coding, out, emit_svg, workers):
    """Bounds, coding chain and stabilization for a right prism."""
    _check_config(nmax, horizon)
    if base not in BASES:
        raise UnsupportedBase(f"unsupported base {base!r}; choose from {sorted(BASES)}")
    try:
        model = PrismModel(base, as_rational(height))
    except ValueError as exc:
        if isinstance(exc, UnsupportedBase):
            raise
        raise InputError(str(exc)) from None
    om = parse_omega(omega)
    px = build_prism_exchange(model, om)
    lang = PrismLanguage(px, workers)
    bounds = diagonal_bounds(model, om, nmax, coding=coding, lang=lang)
    cor = corollary_check(model, om, nmax, lang=lang)
    stab = stabilization_check(model, om, nmax, lang=lang)
    tables = {k: lang.table(k, nmax).complexity() for k in ("M", "M1", "M2")}
    chain = all(a <= b <= c for a, b, c in zip(tables["M"], tables["M1"], tables["M2"]))
    payload = {
        "model": model.to_dict(),
        "omega": [format_rational(w) for w in om],
        "coding": coding,
        "p": tables,
        "bounds": bounds.to_dict(),
        "corollary": cor.to_dict(),
        "stabilization": stab.to_dict(),
        "chain_ok": chain,
    }
    if horizon is not None:
        payload["idoc2"] = certify_prism_direction(model, om, horizon).to_dict()
    if base == "square" and model.height == 1:
        payload["cube_match"] = tables["M"] == cube_complexity(om, nmax, force=True, diagonals=False).p
    ok = chain and cor.passed and bounds.N_min >= 1 and payload.get("cube_match", True)
    w = Writer(out)
    w("complexity.csv", complexity_csv(tables[coding], list(bounds.N)))
    w("report.json", dumps(payload))
    if emit_svg:
        ratios = [as_rational(v) / (n * n) for n, v in enumerate(tables[coding], 1)]
        w("complexity.svg", svg_curves("p(n) under the three codings", tables))
        w("ratio.svg", svg_curves("p(n)/n^2", {coding: ratios}))
    click.echo(dumps({"chain_ok": chain, "corollary_ok": cor.passed, "N_min": bounds.N_min, "ok": ok}), nl=False)
    sys.exit(0 if ok else 1)


@main.command()
@omega_opt
@horizon_opt
@click.option("--base", default=None, help="certify a prism direction instead of a cube one")
@out_opt
@_guard
def certify(omega, horizon, base, out):
    """Genericity certificate of a direction (two components: the square)."""
    om = parse_omega(omega, size=(2, 3))
    horizon = 10 if horizon is None else horizon
    if horizon < 1:
        raise InputError("horizon must be positive")
    if len(om) == 2:
        cert = certify_square_direction(om, horizon)
        passed = cert.passed
    elif base is not None:
        cert = certify_prism_direction(PrismModel(base), om, horizon)
        passed = cert.certified
    else:
        cert = certify_generic(om, horizon)
        passed = cert.passed
    text = dumps(cert.to_dict())
    Writer(out)("certificate.json", text)
    click.echo(text, nl=False)
    sys.exit(0 if passed else 1)


@main.command("counterexample")
@precision_opt
@out_opt
def counterexample_cmd(precision, out):
    """Verify the transcendental triple-edge witness and its perturbed control."""
    if precision < 53:
        raise InputError("precision must be at least 53 bits")
    result = counterexample(precision)
    text = dumps(result)
    Writer(out)("counterexample.json", text)
    click.echo(text, nl=False)
    sys.exit(0 if result["ok"] else 1)


if __name__ == "__main__":
    main()
