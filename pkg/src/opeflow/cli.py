# -*- coding=utf-8 -*-
"""The ``opeflow`` command line.

Every run writes its result file and a ``manifest.json`` into ``--out``.
Exit status is 0 on success, 1 when a computation fails or a check does not
pass, and 2 for usage and configuration errors; errors are printed to stderr
as ``{"error": {"code": ..., "message": ...}}``.
"""
import argparse
import csv
import dataclasses
import io
import json
import os
import platform
import sys
import time

from fractions import Fraction
from importlib import metadata
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import (
    check_associativity,
    expected_degree,
    scaling_degree,
    write_scaling_csv,
)
from .cache import CoefficientCache
from .config import RunConfig, load_config
from .contextmanagers import atomic_open_for_write, seeded_rng, timed
from .covariance import derivative_order_limit
from .exceptions import OpeflowError, UsageError
from .lemmas import LEMMAS, run_lemma_suite
from .misc import (
    _get_logger,
    canonical_json,
    content_digest,
    fraction_to_ratio,
    set_verbosity,
)
from .operators import UNIT, CompositeOperator, enumerate_basis
from .path import mkdir_p
from .recursion import build_interaction_operator, integrate_first_order
from .termcolors import status_line, verdict
from .theories import Theory
from .ward import ward_expression
from .wick import target_operators

__all__ = ["main", "build_parser", "CommandResult"]

logger = _get_logger(__name__)

MANIFEST = "manifest.json"
DEPENDENCIES = ("numpy", "scipy", "networkx", "colorama")
DEFAULT_TRUNCATIONS = (2, 4, 6, 8)


@dataclasses.dataclass
class CommandResult:
    payload: Dict[str, Any]
    header: List[str]
    rows: List[List[Any]]
    passed: bool = True
    csv_text: Optional[str] = None


def _operator(theory, text):
    # type: (Theory, str) -> CompositeOperator
    try:
        value = theory.parse(text)
    except (KeyError, ValueError) as exc:
        raise UsageError("cannot parse operator {0!r}: {1}".format(text, exc))
    items = value.items()
    if len(items) != 1 or items[0][1] != 1:
        raise UsageError(
            "{0!r} is not a single monomial in canonical order".format(text), parsed=str(value)
        )
    return items[0][0]


def _point(text):
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("points are four comma separated numbers")
    if len(values) != 4:
        raise argparse.ArgumentTypeError("points are four comma separated numbers")
    return values


def _points(args, config, count):
    # type: (argparse.Namespace, RunConfig, int) -> np.ndarray
    """Explicit ``--point`` values or seeded random points with ``x_s`` at the origin."""
    if args.point:
        if len(args.point) != count:
            raise UsageError("expected {0} points, got {1}".format(count, len(args.point)))
        return np.asarray(args.point, dtype=float)
    with seeded_rng(config.seed) as rng:
        points = rng.normal(scale=0.5 / config.mu, size=(count, 4))
    points[-1] = 0.0
    return points


def _operators(args, theory):
    if not args.A:
        raise UsageError("at least one --A operator is required")
    return [_operator(theory, text) for text in args.A]


def run_basis(args, config, theory, cache):
    basis = enumerate_basis(theory.fields, config.d_max, limit=config.basis_limit)
    rows = [[str(op), fraction_to_ratio(op.dimension), op.ghost_number] for op in basis]
    return CommandResult(basis.as_dict(), ["operator", "dimension", "ghost_number"], rows)


def run_free_ope(args, config, theory, cache):
    A = _operators(args, theory)
    points = _points(args, config, len(A))
    if args.B:
        targets = [_operator(theory, text) for text in args.B]
    else:
        targets = target_operators(A, theory, config.d_max)
    entries = []
    rows = []
    for B in targets:
        coefficient = cache.free_coefficient(theory, A, B, config.mu, config.graph_limit)
        value = float(coefficient.evaluate(list(points))) if not coefficient.is_zero else 0.0
        entries.append(
            {"B": str(B), "expression": str(coefficient), "coefficient": coefficient.as_dict(), "value": value}
        )
        rows.append([str(B), str(coefficient), value])
    payload = {"A": [str(op) for op in A], "points": points.tolist(), "coefficients": entries}
    return CommandResult(payload, ["B", "expression", "value"], rows)


def run_recursion(args, config, theory, cache):
    A = _operators(args, theory)
    B = _operator(theory, args.B[0]) if args.B else UNIT
    points = _points(args, config, len(A))
    interaction = build_interaction_operator(theory)
    result = integrate_first_order(
        A, B, interaction, points, tol=config.tol, theory=theory, mu=config.mu, levels=config.levels
    )
    if not result.converged:
        logger.warning("first order quadrature did not reach tol %g", config.tol)
    row = [str(B), result.value, result.error, result.truncation_estimate, result.converged]
    return CommandResult(
        result.as_dict(),
        ["B", "value", "quad_error", "truncation_estimate", "converged"],
        [row],
        passed=result.converged,
    )


def run_ward(args, config, theory, cache):
    if not theory.has_brst:
        raise UsageError("theory {0!r} has no BRST differential".format(theory.name))
    A = _operators(args, theory)
    B = _operator(theory, args.B[0]) if args.B else UNIT
    D = config.d_max if args.cutoff is None else args.cutoff
    points = _points(args, config, len(A))
    functional = ward_expression(B, A, D, theory, mu=config.mu)
    value = float(functional(points))
    payload = functional.as_dict()
    payload.update({"points": points.tolist(), "value": value})
    passed = functional.is_zero and value == 0.0
    print(status_line("K^{0}_{1}".format(B, ",".join(map(str, A))), passed, "value {0:.3e}".format(value)))
    return CommandResult(payload, ["B", "symbolic_zero", "value"], [[str(B), functional.is_zero, value]], passed)


def run_scaling(args, config, theory, cache):
    A = _operators(args, theory)
    if not args.B:
        raise UsageError("scaling needs a target --B")
    B = _operator(theory, args.B[0])
    points = _points(args, config, len(A))
    coefficient = cache.free_coefficient(theory, A, B, config.mu, config.graph_limit)
    if coefficient.is_zero:
        raise UsageError("C^{0} vanishes for these operators".format(B))
    fit = scaling_degree(coefficient, points, expected=expected_degree(A, B))
    payload = fit.as_dict()
    payload.update({"A": [str(op) for op in A], "B": str(B), "points": points.tolist()})
    print(status_line("scaling of C^{0}".format(B), fit.passed, "slope {0:.4f} against {1}".format(fit.slope, fit.expected)))
    return CommandResult(
        payload, ["tau", "value"], fit.rows(), fit.passed, csv_text=write_scaling_csv(fit)
    )


def run_assoc(args, config, theory, cache):
    A = _operators(args, theory)
    if len(A) != 3:
        raise UsageError("assoc takes exactly three --A operators")
    B = _operator(theory, args.B[0]) if args.B else UNIT
    if args.point:
        points = _points(args, config, 3)
    else:
        # x1 - x2 orthogonal to x2 - x3 and a hundred times shorter
        points = np.array([[10.0, 0.1, 0.0, 0.0], [10.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]]) / config.mu
    results = [
        check_associativity(A[0], A[1], A[2], B, points, d, theory, config.mu)
        for d in (args.d_trunc or DEFAULT_TRUNCATIONS)
    ]
    residuals = [r.residual for r in results]
    monotone = all(b <= a for a, b in zip(residuals, residuals[1:]))
    payload = {
        "A": [str(op) for op in A],
        "B": str(B),
        "points": points.tolist(),
        "results": [r.as_dict() for r in results],
        "monotone": monotone,
    }
    rows = [[str(r.d_trunc), r.lhs, r.rhs, r.residual, r.relative, r.terms] for r in results]
    print("associativity residuals {0}: {1}".format(
        ", ".join("{0:.3e}".format(r) for r in residuals), verdict(monotone))
    )
    return CommandResult(
        payload, ["d_trunc", "lhs", "rhs", "residual", "relative", "terms"], rows, monotone
    )


def run_trees_check(args, config, theory, cache):
    samples = args.samples or config.samples
    reports = run_lemma_suite(args.lemma, samples=samples, seed=config.seed)
    rows = []
    for report in reports:
        marker = "info" if report.diagnostic else verdict(report.passed)
        print("{0:<24} {1:>8} {2:>6} {3}".format(report.name, report.samples, report.violations, marker))
        rows.append([
            report.name, report.samples, report.violations, report.worst_ratio,
            report.constant, report.diagnostic, report.passed,
        ])
    payload = {"samples": samples, "reports": [r.as_dict() for r in reports]}
    return CommandResult(
        payload,
        ["name", "samples", "violations", "worst_ratio", "constant", "diagnostic", "passed"],
        rows,
        all(r.passed for r in reports),
    )


COMMANDS = {
    "basis": run_basis,
    "free-ope": run_free_ope,
    "recursion": run_recursion,
    "ward": run_ward,
    "scaling": run_scaling,
    "assoc": run_assoc,
    "trees-check": run_trees_check,
}  # type: Dict[str, Callable[..., CommandResult]]


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", default=".", help="directory for results and the manifest")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--seed", type=int, help="seed for sampled points and lemma checks")
    common.add_argument("--dmax", type=Fraction, help="dimension cutoff, e.g. 4 or 7/2")
    common.add_argument("--format", choices=("json", "csv"), dest="output_format")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _operator_options(parser, points=True):
    parser.add_argument("--A", action="append", metavar="OPERATOR", help="an operator A_k, in order")
    parser.add_argument("--B", action="append", metavar="OPERATOR", help="the target operator")
    if points:
        parser.add_argument("--point", action="append", type=_point, metavar="X1,X2,X3,X4")


def build_parser():
    # type: () -> argparse.ArgumentParser
    common = _common_options()
    parser = argparse.ArgumentParser(prog="opeflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True
    commands.add_parser("basis", parents=[common], help="enumerate the operator basis")
    for name, text in (
        ("free-ope", "free OPE coefficients by Wick expansion"),
        ("recursion", "first order coefficient by the coupling recursion"),
        ("scaling", "scaling degree of a free coefficient"),
    ):
        _operator_options(commands.add_parser(name, parents=[common], help=text))
    ward = commands.add_parser("ward", parents=[common], help="free Ward identity K == 0")
    _operator_options(ward)
    ward.add_argument("--cutoff", type=Fraction, help="the cutoff D, default d_max")
    assoc = commands.add_parser("assoc", parents=[common], help="associativity residuals")
    _operator_options(assoc)
    assoc.add_argument("--d-trunc", type=Fraction, action="append", dest="d_trunc")
    trees = commands.add_parser("trees-check", parents=[common], help="tree weight lemma checks")
    trees.add_argument("--lemma", action="append", choices=sorted(LEMMAS))
    trees.add_argument("--samples", type=int)
    return parser


def _versions():
    versions = {"opeflow": __version__, "python": platform.python_version()}
    for name in DEPENDENCIES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


def _render(result, output_format):
    # type: (CommandResult, str) -> str
    if output_format == "json":
        return canonical_json(result.payload) + "\n"
    if result.csv_text is not None:
        return result.csv_text
    stream = io.StringIO()
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(result.header)
    writer.writerows(result.rows)
    return stream.getvalue()


def _write(path, text):
    with atomic_open_for_write(path, newline="") as fh:
        fh.write(text)


def run(command, config, args):
    # type: (str, RunConfig, argparse.Namespace) -> int
    """Execute *command* and write its artifacts; returns the exit status."""
    timings = {}  # type: Dict[str, float]
    cache = CoefficientCache(config.cache_dir)
    started = time.perf_counter()
    with timed(timings, "theory"):
        theory = config.build_theory()
    with timed(timings, command), derivative_order_limit(config.max_derivative_order):
        result = COMMANDS[command](args, config, theory, cache)
    out = mkdir_p(args.out)
    name = "{0}.{1}".format(command, config.output_format)
    text = _render(result, config.output_format)
    _write(os.path.join(out, name), text)
    timings["total"] = time.perf_counter() - started
    manifest = {
        "command": command,
        "config": config.as_dict(),
        "config_hash": config.content_hash(),
        "versions": _versions(),
        "timings": timings,
        "cache": cache.stats(),
        "results": {name: content_digest(text)},
        "passed": result.passed,
    }
    _write(os.path.join(out, MANIFEST), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    logger.info("wrote %s and %s to %s", name, MANIFEST, out)
    return 0 if result.passed else 1


def _report(error):
    # type: (OpeflowError) -> int
    print(json.dumps(error.as_dict(), sort_keys=True), file=sys.stderr)
    return error.exit_status


def main(argv=None):
    # type: (Optional[Sequence[str]]) -> int
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config).replace(
            tol=args.tol, seed=args.seed, d_max=args.dmax, output_format=args.output_format
        )
        set_verbosity(args.verbose, config.log_level)
        return run(args.command, config, args)
    except OpeflowError as exc:
        return _report(exc)
    except (ValueError, KeyError, ArithmeticError) as exc:
        logger.debug("computation failed", exc_info=True)
        print(
            json.dumps({"error": {"code": "COMPUTATION_FAILED", "message": str(exc)}}, sort_keys=True),
            file=sys.stderr,
        )
        return 1
