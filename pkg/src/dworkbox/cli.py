"""Batch command-line front end.

One JSON config file describes the geometry; subcommands build the quotient
basis, reduce polynomials, expand deformation series with the D-matrix
ladder, transport period matrices and run the verification suite.  All
machine-readable output serializes rationals as "p/q" strings and is
byte-stable under a fixed config and seed.

Exit codes: 0 success, 2 input error, 3 mathematical-assumption failure
(smoothness guard, independence), 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .cohomology import build_presentation
from .deformation import (
    BaseChange,
    PeriodMatrix,
    build_deformation,
    d_matrix,
    period_transport,
    t_series,
    u_basis,
)
from .errors import (
    AssumptionError,
    DworkboxError,
    InputError,
    InternalCheckError,
)
from .operators import dwork_potential
from .polyparse import parse, render
from .superalgebra import VariableContext
from .verify import fault_injection, run_suite

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ASSUMPTION = 3
EXIT_INTERNAL = 4


def _frac_str(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return repr(value)  # floating entries stay floating


def _matrix_json(matrix):
    return [[_frac_str(v) for v in row] for row in matrix]


class JobConfig:
    """Validated problem description loaded from a JSON file."""

    def __init__(self, raw: dict):
        try:
            self.n = int(raw["n"])
            self.k = int(raw["k"])
            degrees = tuple(int(d) for d in raw["degrees"])
            g_texts = list(raw["G"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"config missing or malformed field: {exc}")
        order_name = raw.get("monomialOrder", "graded-lex")
        self.ctx = VariableContext(self.n, self.k, degrees, order_name)
        if len(g_texts) != self.k:
            raise InputError(f"expected {self.k} polynomials in G, got {len(g_texts)}")
        self.G = [parse(t, self.ctx) for t in g_texts]
        self.H = None
        if raw.get("H") is not None:
            h_texts = list(raw["H"])
            if len(h_texts) != self.k:
                raise InputError(f"expected {self.k} polynomials in H, got {len(h_texts)}")
            self.H = [parse(t, self.ctx) for t in h_texts]
        self.truncation_order = int(raw.get("truncationOrder", 6))
        self.slack = int(raw.get("slack", 2))
        self.h_override = raw.get("h")
        self.y_choice = tuple(raw["yPower"]) if raw.get("yPower") else None
        self.seed = int(raw.get("seed", 0))

    @classmethod
    def load(cls, path: str) -> "JobConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise InputError(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise InputError("config must be a JSON object")
        return cls(raw)

    def dwork(self):
        return dwork_potential(self.ctx, self.G)


def _emit(payload: dict, text_lines, args) -> None:
    if args.format == "json":
        body = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        body = "\n".join(text_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(body)
    else:
        sys.stdout.write(body)


def _build(config: JobConfig):
    D = config.dwork()
    return D, build_presentation(D, slack=config.slack)


def cmd_basis(args) -> int:
    config = JobConfig.load(args.config)
    D, pres = _build(config)
    basis_texts = [render(e) for e in pres.basis_elements()]
    payload = {
        "cG": pres.c_G,
        "dimension": pres.dimension,
        "hodge": pres.hodge_numbers(),
        "basis": basis_texts,
        "weights": list(pres.weight_counts),
    }
    lines = [
        f"background charge: {pres.c_G}",
        f"quotient dimension: {pres.dimension}",
        "hodge numbers: " + " ".join(str(h) for h in pres.hodge_numbers()),
        "basis (by weight, largest monomials first):",
    ]
    lines += [f"  e{i + 1} = {t}" for i, t in enumerate(basis_texts)]
    _emit(payload, lines, args)
    return EXIT_OK


def cmd_reduce(args) -> int:
    config = JobConfig.load(args.config)
    D, pres = _build(config)
    f = parse(args.polynomial, config.ctx)
    result = pres.reduce(f)
    payload = {
        "input": render(f),
        "coefficients": [_frac_str(c) for c in result.coefficients],
        "basis": [render(e) for e in pres.basis_elements()],
        "certificate": render(result.certificate),
    }
    lines = [f"input: {payload['input']}", "coefficients:"]
    lines += [
        f"  e{i + 1}: {c}" for i, c in enumerate(payload["coefficients"])
    ]
    lines.append(f"certificate: {payload['certificate']}")
    _emit(payload, lines, args)
    return EXIT_OK


def _deformation_pipeline(config: JobConfig, order: int):
    if config.H is None:
        raise InputError("config has no H block; nothing to deform")
    D, pres = _build(config)
    deform = build_deformation(D, config.H)
    pres_U = build_presentation(deform.deformed, slack=config.slack)
    h_elt = parse(config.h_override, config.ctx) if config.h_override else None
    basis_u = u_basis(deform, pres, pres_U, h=h_elt, y_choice=config.y_choice)
    series = t_series(deform, pres, basis_u, order)
    ladder = d_matrix(series)
    return D, pres, deform, basis_u, series, ladder


def cmd_deform(args) -> int:
    config = JobConfig.load(args.config)
    order = args.order if args.order is not None else config.truncation_order
    if order < 1:
        raise InputError("truncation order must be >= 1")
    _, pres, deform, basis_u, series, ladder = _deformation_pipeline(config, order)
    series_rows = [
        {"rho": rho + 1, "exponent": list(expo), "value": f"{num}/{den}"}
        for rho, expo, num, den in series.series_rows()
    ]
    payload = {
        "uBasis": [render(u) for u in basis_u.elements],
        "primeIndices": list(basis_u.prime_indices),
        "order": order,
        "series": series_rows,
        "dLadder": {str(m): _matrix_json(mat) for m, mat in ladder.items()},
    }
    lines = [
        "u basis: " + ", ".join(payload["uBasis"]),
        f"deformed indices I': {list(basis_u.prime_indices)}",
        f"series to total order {order} (T^rho, exponent, value):",
    ]
    lines += [
        f"  T^{row['rho']} t^{tuple(row['exponent'])} = {row['value']}"
        for row in series_rows
    ]
    lines.append("D-matrix ladder:")
    for m, mat in ladder.items():
        lines.append(f"  order {m}: " + json.dumps(_matrix_json(mat)))
    _emit(payload, lines, args)
    return EXIT_OK


def _parse_matrix_entry(value):
    if isinstance(value, bool):
        raise InputError("matrix entries must be numbers or strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad matrix entry {value!r}: {exc}")
    raise InputError(f"bad matrix entry {value!r}")


def _load_matrix(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read matrix file: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix file is not valid JSON: {exc}")
    meta = {}
    if isinstance(raw, dict):
        meta = raw
        raw = raw.get("matrix")
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise InputError("matrix file must hold an array of arrays")
    return [[_parse_matrix_entry(v) for v in row] for row in raw], meta


def cmd_transport(args) -> int:
    config = JobConfig.load(args.config)
    order = args.order if args.order is not None else config.truncation_order
    omega_rows, _ = _load_matrix(args.omega)
    b_rows, b_meta = _load_matrix(args.base_change)
    integral = bool(b_meta.get("integral", True))
    if integral:
        for row in b_rows:
            for v in row:
                if isinstance(v, Fraction) and v.denominator != 1:
                    raise InputError("integral base change needs integer entries")
        b_int = [[int(v) for v in row] for row in b_rows]
        base = BaseChange(tuple(tuple(r) for r in b_int), integral=True)
    else:
        base = BaseChange(tuple(tuple(r) for r in b_rows), integral=False)
    omega = PeriodMatrix(tuple(tuple(r) for r in omega_rows))
    _, pres, deform, basis_u, series, ladder = _deformation_pipeline(config, order)
    if omega.size != pres.dimension:
        raise InputError(
            f"period matrix is {omega.size}x{omega.size}, expected {pres.dimension}")
    payload = {"orders": []}
    lines = [f"period transport through order {order}:"]
    for m, mat in ladder.items():
        result = period_transport(mat, omega, base)
        payload["orders"].append({"order": m, "matrix": _matrix_json(result.entries)})
        lines.append(f"  order {m}: " + json.dumps(_matrix_json(result.entries)))
    _emit(payload, lines, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = JobConfig.load(args.config)
    seed = args.seed if args.seed is not None else config.seed
    iterations = args.iterations
    D, pres = _build(config)
    if args.inject_fault:
        with fault_injection(args.inject_fault):
            report = run_suite(D, pres, seed=seed, iterations=iterations,
                               deformation_H=config.H)
    else:
        report = run_suite(D, pres, seed=seed, iterations=iterations,
                           deformation_H=config.H)
    payload = {
        "seed": seed,
        "iterations": iterations,
        "ok": report.ok,
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail}
            for c in report.checks
        ],
    }
    _emit(payload, report.lines(), args)
    return EXIT_OK if report.ok else EXIT_INTERNAL


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dworkbox",
        description="exact quotient bases, reductions and period deformation "
                    "series for smooth projective complete intersections")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--out", help="write the report to this path instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p_basis = sub.add_parser("basis", help="quotient basis and Hodge numbers")
    p_basis.add_argument("config")
    p_basis.set_defaults(func=cmd_basis)

    p_reduce = sub.add_parser("reduce", help="normal form of a polynomial")
    p_reduce.add_argument("config")
    p_reduce.add_argument("polynomial")
    p_reduce.set_defaults(func=cmd_reduce)

    p_deform = sub.add_parser("deform", help="deformation series and D ladder")
    p_deform.add_argument("config")
    p_deform.add_argument("--order", type=int, default=None)
    p_deform.set_defaults(func=cmd_deform)

    p_transport = sub.add_parser("transport", help="transport a period matrix")
    p_transport.add_argument("config")
    p_transport.add_argument("--omega", required=True)
    p_transport.add_argument("--base-change", required=True, dest="base_change")
    p_transport.add_argument("--order", type=int, default=None)
    p_transport.set_defaults(func=cmd_transport)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("config")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--iterations", type=int, default=200)
    p_verify.add_argument("--inject-fault", default=None,
                          help="testing hook: corrupt an operator on purpose")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AssumptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except InternalCheckError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, DworkboxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
