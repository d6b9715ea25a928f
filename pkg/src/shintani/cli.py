"""Command line interface: shintani {enumerate,shape,eis,weyl,fit,residues,verify}.

Exit status: 0 on success or all checks passing, 1 on a failed check or
runtime error, 2 on a usage error.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import cache as io_
from .cubic_forms import discriminant, format_form, parse_form
from .eisenstein import EisensteinParams, eval_E
from .shapes import group_point, shape_point
from .spectral_zeta import (
    FAMILIES, IRREDUCIBLE_POLES, POLES, build_coefficients, fit_asymptotics, model_exponents,
    parse_grid, partial_sums, pole_location, residue,
)
from .suites import SUITES, run_suite


def _emit(rep: dict, out: str | None = None):
    text = io_.dumps_report(rep)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _sign(value: str) -> int:
    return 1 if value == "pos" else -1


def _positive(ctx, param, value):
    if value is not None and not value > 0:
        raise click.BadParameter("must be positive")
    return value


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Eisenstein-twisted zeta functions of binary cubic forms."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command("enumerate")
@click.option("--sign", type=click.Choice(["pos", "neg"]), required=True)
@click.option("--max-disc", type=click.IntRange(1, 10 ** 8), required=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--oracle", is_flag=True, help="Also run the brute-force oracle and diff (max-disc <= 10^4).")
def cmd_enumerate(sign, max_disc, cache_dir, oracle):
    """Build or extend the class cache."""
    s = _sign(sign)
    table, path, built = io_.load_or_build(s, max_disc, cache_dir)
    text = Path(path).read_text()
    results = {"path": str(path), "classes": len(table), "built": built,
               "file_sha256": io_.sha256(text)}
    status = 0
    if oracle:
        from .enumeration import compare_with_oracle
        r = compare_with_oracle(s, max_disc)
        results["oracle"] = {k: r[k] for k in ("enumerated", "oracle", "missing", "problems")}
        if r["problems"] or r["missing"] or r["enumerated"] != r["oracle"]:
            status = 1
    _emit(io_.report("enumerate", {"sign": s, "max_disc": max_disc, "cache_dir": cache_dir}, results))
    sys.exit(status)


@main.command("shape")
@click.option("--form", "form_text", required=True, help="Coefficients a,b,c,d.")
def cmd_shape(form_text):
    """Lattice shape and group point of one form."""
    try:
        f = parse_form(form_text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--form")
    if discriminant(f) == 0:
        raise click.BadParameter("singular form", param_hint="--form")
    p, q = shape_point(f), group_point(f)
    _emit(io_.report("shape", {"form": format_form(f)},
                     {"disc": int(discriminant(f)), "shape_x": p.x, "shape_y": p.y,
                      "group_x": q.x, "group_y": q.y}))


@main.command("eis")
@click.option("--gamma", type=float, required=True)
@click.option("--tau", "tau_text", required=True, help="x,y with y > 0.")
@click.option("--tol", type=float, default=1e-10, callback=_positive)
def cmd_eis(gamma, tau_text, tol):
    """E(i gamma, x + i y) with its truncation data."""
    try:
        x, y = (float(v) for v in tau_text.split(","))
    except ValueError:
        raise click.BadParameter("expected x,y", param_hint="--tau")
    if y <= 0:
        raise click.BadParameter("y must be positive", param_hint="--tau")
    try:
        params = EisensteinParams(gamma, tol)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    v = eval_E(params, complex(x, y))
    _emit(io_.report("eis", {"gamma": gamma, "tau": [x, y], "tol": tol},
                     {"value": v.value, "terms_used": v.terms_used, "tail_bound": v.tail_bound}))


@main.command("weyl")
@click.option("--gamma", type=float, required=True)
@click.option("--sign", type=click.Choice(["pos", "neg"]), required=True)
@click.option("--max-disc", type=click.IntRange(1, 10 ** 8), required=True)
@click.option("--irreducible-only", is_flag=True)
@click.option("--grid", "grid_spec", required=True, help="geometric:A:B:K")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--tol", type=float, default=1e-10, callback=_positive, help="Eisenstein truncation tolerance.")
@click.option("--threads", type=click.IntRange(1, 256), default=1)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--no-build", is_flag=True, help="Fail instead of building a missing cache.")
def cmd_weyl(gamma, sign, max_disc, irreducible_only, grid_spec, out, tol, threads, cache_dir, no_build):
    """Partial sums S(X) of the twisted coefficients on a grid; writes CSV."""
    if gamma == 0:
        raise click.BadParameter("gamma must be nonzero", param_hint="--gamma")
    try:
        grid = parse_grid(grid_spec)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--grid")
    if grid.max() > max_disc:
        raise click.BadParameter("grid endpoint exceeds --max-disc", param_hint="--grid")
    s = _sign(sign)
    table, path, _ = io_.load_or_build(s, max_disc, cache_dir, build=not no_build)
    series = build_coefficients(gamma, s, max_disc, irreducible_only, table=table,
                                truncation_tol=tol, threads=threads)
    W = partial_sums(series, grid)
    config = {"gamma": gamma, "sign": s, "max_disc": max_disc, "irreducible_only": irreducible_only,
              "grid": grid_spec, "tol": tol, "max_tail_bound": series.max_tail_bound}
    Path(out).write_text(io_.dumps_weyl(W.X, W.S, config))
    _emit(io_.report("weyl", config, {"out": out, "points": int(W.X.size)}))


@main.command("fit")
@click.option("--in", "inp", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--gamma", type=float, required=True)
@click.option("--family", type=click.Choice(list(FAMILIES)), required=True)
@click.option("--irreducible-only", is_flag=True, help="Fit only the (11+-z)/12 poles.")
def cmd_fit(inp, gamma, family, irreducible_only):
    """Least-squares amplitudes at the fixed poles plus a free slope."""
    X, S = io_.loads_weyl(Path(inp).read_text())
    poles = IRREDUCIBLE_POLES if irreducible_only else POLES
    try:
        fr = fit_asymptotics(X, S, model_exponents(gamma, poles))
    except ValueError as exc:
        raise click.UsageError(str(exc))
    predicted = [residue(family, p, gamma) / pole_location(p, gamma) for p in poles]
    corrected = [residue(family, p, gamma, True) / pole_location(p, gamma) for p in poles]
    _emit(io_.report("fit", {"in": inp, "gamma": gamma, "family": family, "poles": list(poles)},
                     {"model_poles": fr.model_poles, "amplitudes": fr.amplitudes, "residual": fr.residual,
                      "free_slope": fr.free_slope, "predicted_amplitudes": predicted,
                      "corrected_amplitudes": corrected}))


@main.command("residues")
@click.option("--gamma", type=float, required=True)
@click.option("--corrected", is_flag=True, help="Use the corrected (11+-z)/12 entries.")
def cmd_residues(gamma, corrected):
    """The 8 residues (2 families x 4 poles) at z = i gamma."""
    if gamma == 0:
        raise click.BadParameter("gamma must be nonzero", param_hint="--gamma")
    rows = [{"family": f, "pole": p, "location": pole_location(p, gamma),
             "residue": residue(f, p, gamma, corrected)}
            for f in FAMILIES for p in POLES]
    _emit(io_.report("residues", {"gamma": gamma, "corrected": corrected}, rows))


@main.command("verify")
@click.option("--suite", type=click.Choice(list(SUITES)), required=True)
@click.option("--tol", type=float, default=None, callback=_positive, help="Override every tolerance.")
def cmd_verify(suite, tol):
    """Run a verification suite; exit status 1 if any check fails."""
    records = run_suite(suite, tol)
    _emit(io_.report("verify", {"suite": suite, "tol": tol}, records))
    sys.exit(0 if all(r["passed"] for r in records) else 1)


def run():
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2 if isinstance(exc, click.UsageError) else 1)
    except click.Abort:
        sys.exit(1)
    except (io_.CacheError, ArithmeticError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    run()
