"""Command line interface: identity suites, theta evaluation, data ingestion.

Flags can also come from environment variables with the CURVETHETA_ prefix
(CURVETHETA_SEED, CURVETHETA_PRECISION, CURVETHETA_THREADS,
CURVETHETA_TOL). Complex scalars on the command line are parsed from
`re,im` pairs or Python literals like `0.3+0.8j`; matrices are row-major
JSON with [re, im] entries.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import curve as cv
from . import jactheta as jt
from .report import FAIL
from .suites import SUITE_NAMES, SuiteConfig, run_suite
from .theta import Characteristic, ThetaFunction


def _parse_complex(text: str) -> complex:
    text = text.strip()
    if "," in text:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    return complex(text.replace(" ", ""))


def _parse_complex_vector(text: str) -> np.ndarray:
    return np.array([_parse_complex(t) for t in text.split(";")])


def _parse_matrix(text: str) -> np.ndarray:
    data = json.loads(text)
    return np.array([[complex(e[0], e[1]) for e in row] for row in data])


def _parse_tols(text: str | None) -> dict:
    out = {}
    if text:
        for item in text.split(","):
            name, value = item.split("=")
            out[name.strip()] = float(value)
    return out


@click.group()
def main():
    """Numerical identity suites for theta functions on curve Jacobians."""


@main.command()
@click.argument("name", type=click.Choice(SUITE_NAMES))
@click.option("--seed", envvar="CURVETHETA_SEED", default=1, show_default=True, type=int)
@click.option("--tol", "tol_text", envvar="CURVETHETA_TOL", default=None,
              help="comma-separated overrides: check-id=value,...")
@click.option("--precision", envvar="CURVETHETA_PRECISION", default="double",
              type=click.Choice(["double", "extended"]), show_default=True)
@click.option("--threads", envvar="CURVETHETA_THREADS", default=1, show_default=True,
              type=int, help="suite-level parallelism for `all`")
@click.option("--bundle", "bundle_path", default=None, type=click.Path(exists=True),
              help="jacobian bundle JSON for data-dependent checks")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="write the JSON report here")
def suite(name, seed, tol_text, precision, threads, bundle_path, out_path):
    """Run a named identity suite and print one line per check."""
    bundle = None
    if bundle_path:
        with open(bundle_path, "r", encoding="utf-8") as fh:
            bundle = json.load(fh)
    config = SuiteConfig(seed=seed, precision=precision, threads=threads,
                         tolerances=_parse_tols(tol_text), bundle=bundle)
    report = run_suite(name, config)
    for line in report.summary_lines():
        click.echo(line)
    counts = report.to_dict()["counts"]
    click.echo(f"suite {name}: {counts['pass']} pass, {counts['fail']} fail, "
               f"{counts['skipped']} skipped")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        click.echo(f"report written to {out_path}")
    sys.exit(1 if report.failed else 0)


@main.group()
def theta():
    """Theta function evaluation."""


@theta.command("eval")
@click.option("--z", "z_text", required=True,
              help="argument vector, entries `re,im` separated by `;`")
@click.option("--tau", "tau_text", required=True,
              help="period matrix as row-major JSON [[ [re,im], ... ], ...]")
@click.option("--char", "char_text", default=None,
              help="characteristic `a1 .. ag | b1 .. bg` (halves allowed)")
@click.option("--deriv", "deriv_text", default="",
              help="derivative multi-index, e.g. `0,0,1`")
@click.option("--eps", default=1e-13, show_default=True, type=float,
              help="absolute tail bound for the lattice sum")
@click.option("--precision", default="double",
              type=click.Choice(["double", "extended"]), show_default=True)
def theta_eval(z_text, tau_text, char_text, deriv_text, eps, precision):
    """Evaluate theta (or a derivative) and print value plus certified bound."""
    z = _parse_complex_vector(z_text)
    tau = _parse_matrix(tau_text)
    char = None
    if char_text:
        a_part, b_part = char_text.split("|")
        char = Characteristic([float(x) for x in a_part.split()],
                              [float(x) for x in b_part.split()])
    deriv = tuple(int(d) for d in deriv_text.split(",") if d.strip() != "")
    th = ThetaFunction(tau, eps=eps, precision=precision)
    val = th.value(z, char, deriv)
    click.echo(f"value: {val.real!r} {val.imag:+}j")
    click.echo(f"tail bound: {eps:g} (ellipsoidal truncation)")


@main.command()
@click.argument("path", type=click.Path(exists=True))
def ingest(path):
    """Validate a curve or jacobian-bundle JSON file and summарize it."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    data = json.loads(text)
    if data.get("type") == "hyperelliptic":
        curve = cv.curve_from_json(text)
        pd = cv.period_matrix(curve)
        click.echo(f"hyperelliptic curve: genus {curve.genus}, "
                   f"{curve.n_branch} branch points")
        click.echo(f"bilinear residual: {pd.bilinear_residual:.3e}")
        sys.exit(0)
    if "tau" in data and "points" in data:
        ctx = jt.JacobianContext.from_bundle(data)
        click.echo(f"jacobian bundle: g = {ctx.g}, "
                   f"{len(ctx.bundle_points)} labelled points")
        sys.exit(0)
    raise click.ClickException(
        "unrecognized input: expected a hyperelliptic curve or a jacobian bundle")


if __name__ == "__main__":
    main()
