"""Seeded random verification of the algebraic invariants.

Each check family draws random elements from a fixed-seed generator and
confirms an exact identity; any counterexample is rendered in the report.
The CLI `verify` command runs every family and fails loudly on the first
broken invariant, so a corrupted build cannot slip through quietly.

A fault-injection hook exists purely so the harness itself can be tested:
it deliberately corrupts one operator for the duration of a run and the
suite is expected to catch it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import operators as ops
from .cohomology import (
    QuotientPresentation,
    build_presentation,
    charge_generator,
    enumerate_piece,
)
from .deformation import build_deformation, k_gamma, mc_check
from .operators import DworkData, LinearFunctional
from .polyparse import render
from .superalgebra import (
    SuperElement,
    SuperMonomial,
    VariableContext,
    grade,
    monomial_charge,
    partial_eta,
    partial_q,
)


def random_element(ctx: VariableContext, rng: random.Random, *, max_eta: int = 2,
                   max_weight: int = 2, max_xdeg: int = 4, terms: int = 3,
                   homogeneous_degree: Optional[int] = None) -> SuperElement:
    """A small random element; degree-homogeneous when requested."""
    acc = {}
    for _ in range(terms):
        size = homogeneous_degree if homogeneous_degree is not None \
            else rng.randint(0, max_eta)
        eta = tuple(sorted(rng.sample(range(1, ctx.nvars + 1), size))) if size else ()
        v = [rng.randint(0, max_weight) for _ in range(ctx.k)]
        u = [rng.randint(0, max_xdeg) for _ in range(ctx.n + 1)]
        mono = SuperMonomial(tuple(v + u), eta)
        coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if coeff:
            acc[mono] = acc.get(mono, Fraction(0)) + coeff
    return SuperElement(ctx, acc)


def random_homogeneous(ctx: VariableContext, rng: random.Random, **kw) -> SuperElement:
    """Random element homogeneous in cohomological degree (possibly zero)."""
    deg = rng.randint(0, min(2, ctx.nvars))
    e = random_element(ctx, rng, homogeneous_degree=deg, **kw)
    if e.is_zero():
        return SuperElement.one(ctx) if deg == 0 else SuperElement.eta(ctx, 1)
    return e


def random_charge_element(D: DworkData, rng: random.Random, charge: int,
                          eta_degree: int, max_weight: int = 3) -> SuperElement:
    """Random element inside the (charge, eta_degree) slice, weights <= max_weight."""
    ctx = D.ctx
    acc = {}
    for w in range(0, max_weight + 1):
        piece = enumerate_piece(ctx, charge, w, eta_degree)
        if not piece.monomials:
            continue
        for mono in rng.sample(piece.monomials, min(2, len(piece.monomials))):
            coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if coeff:
                acc[mono] = acc.get(mono, Fraction(0)) + coeff
    return SuperElement(ctx, acc)


@dataclass
class CheckReport:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    seed: int
    iterations: int
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(CheckReport(name, passed, detail))

    def lines(self):
        out = [f"verification seed={self.seed} iterations={self.iterations}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            suffix = f"  [{c.detail}]" if (c.detail and not c.passed) else ""
            out.append(f"{status}  {c.name}{suffix}")
        out.append("result: " + ("all invariants hold" if self.ok else "INVARIANT FAILURE"))
        return out


def _counterexample(*elements) -> str:
    return " ; ".join(render(e) for e in elements)


def _check_loop(report: VerifyReport, name: str, iterations: int, body) -> None:
    """Run `body(i)` until it returns a failure detail or all iterations pass."""
    for i in range(iterations):
        detail = body(i)
        if detail:
            report.add(name, False, detail)
            return
    report.add(name, True)


def run_suite(D: DworkData, presentation: Optional[QuotientPresentation] = None,
              seed: int = 0, iterations: int = 200,
              deformation_H=None) -> VerifyReport:
    """All invariant families on one geometry; deterministic under the seed."""
    ctx = D.ctx
    rng = random.Random(seed)
    report = VerifyReport(seed, iterations)
    if presentation is None:
        presentation = build_presentation(D)

    def rand():
        return random_element(ctx, rng)

    def rand_h():
        return random_homogeneous(ctx, rng)

    # --- super-algebra laws -------------------------------------------------
    def super_comm(_):
        a, b = rand_h(), rand_h()
        da, db = a.homogeneous_degree(), b.homogeneous_degree()
        sign = -1 if (da * db) % 2 else 1
        if a * b != (b * a).scale(sign):
            return _counterexample(a, b)
    _check_loop(report, "product: graded commutativity", iterations, super_comm)

    def assoc(_):
        a, b, c = rand(), rand(), rand()
        if (a * b) * c != a * (b * c):
            return _counterexample(a, b, c)
    _check_loop(report, "product: associativity", iterations, assoc)

    def grading(_):
        a, b = rand_h(), rand_h()
        ga, gb = grade(a), grade(b)
        if len(ga) != 1 or len(gb) != 1:
            return None  # need tri-homogeneous samples; skip silently
        (ca, wa, da, _a), (cb, wb, db, _b) = ga[0], gb[0]
        prod = a * b
        if prod.is_zero():
            return None
        for cp, wp, dp, _p in grade(prod):
            if (cp, wp, dp) != (ca + cb, wa + wb, da + db):
                return _counterexample(a, b)
    _check_loop(report, "product: gradings additive", iterations, grading)

    def eta_sq(_):
        a = rand()
        i = rng.randint(1, ctx.nvars)
        j = rng.randint(1, ctx.nvars)
        if not partial_eta(i, partial_eta(i, a)).is_zero():
            return _counterexample(a)
        lhs = partial_eta(i, partial_eta(j, a))
        rhs = partial_eta(j, partial_eta(i, a))
        if lhs != -rhs:
            return _counterexample(a)
    _check_loop(report, "odd derivatives: square zero / anticommute", iterations, eta_sq)

    def q_comm(_):
        a = rand()
        i = rng.randint(1, ctx.nvars)
        j = rng.randint(1, ctx.nvars)
        if partial_q(i, partial_q(j, a)) != partial_q(j, partial_q(i, a)):
            return _counterexample(a)
        if partial_q(i, partial_eta(j, a)) != partial_eta(j, partial_q(i, a)):
            return _counterexample(a)
    _check_loop(report, "even derivatives: commute (also with odd)", iterations, q_comm)

    # --- differential laws ---------------------------------------------------
    def differentials(_):
        a = rand()
        if not ops.apply_delta(ops.apply_delta(a)).is_zero():
            return "delta^2: " + _counterexample(a)
        if not ops.apply_q(D, ops.apply_q(D, a)).is_zero():
            return "Q^2: " + _counterexample(a)
        if not ops.apply_k(D, ops.apply_k(D, a)).is_zero():
            return "K^2: " + _counterexample(a)
        anti = ops.apply_delta(ops.apply_q(D, a)) + ops.apply_q(D, ops.apply_delta(a))
        if not anti.is_zero():
            return "delta Q + Q delta: " + _counterexample(a)
    _check_loop(report, "differentials: squares and anticommutator vanish",
                iterations, differentials)

    def q_derivation(_):
        a, b = rand_h(), rand()
        sign = -1 if a.homogeneous_degree() % 2 else 1
        lhs = ops.apply_q(D, a * b)
        rhs = ops.apply_q(D, a) * b + (a * ops.apply_q(D, b)).scale(sign)
        if lhs != rhs:
            return _counterexample(a, b)
    _check_loop(report, "Q: derivation of the product", iterations, q_derivation)

    # --- bracket laws ---------------------------------------------------------
    def l2_sym(_):
        a, b = rand_h(), rand_h()
        da, db = a.homogeneous_degree(), b.homogeneous_degree()
        sign = -1 if (da * db) % 2 else 1
        if ops.ell2(D, a, b) != ops.ell2(D, b, a).scale(sign):
            return _counterexample(a, b)
    _check_loop(report, "bracket: graded symmetry", iterations, l2_sym)

    def l2_definition(_):
        a, b = rand_h(), rand_h()
        sign = -1 if a.homogeneous_degree() % 2 else 1
        expected = (ops.apply_k(D, a * b) - ops.apply_k(D, a) * b
                    - (a * ops.apply_k(D, b)).scale(sign))
        if ops.ell2(D, a, b) != expected:
            return _counterexample(a, b)
    _check_loop(report, "bracket: defining expansion against K", iterations,
                l2_definition)

    def l2_jacobi(_):
        a, b, c = rand_h(), rand_h(), rand_h()
        da, db = a.homogeneous_degree(), b.homogeneous_degree()
        lhs = ops.ell2(D, a, ops.ell2(D, b, c))
        s1 = -1 if (da + 1) % 2 else 1
        s2 = -1 if ((da + 1) * (db + 1)) % 2 else 1
        rhs = ops.ell2(D, ops.ell2(D, a, b), c).scale(s1) + \
            ops.ell2(D, b, ops.ell2(D, a, c)).scale(s2)
        if lhs != rhs:
            return _counterexample(a, b, c)
    _check_loop(report, "bracket: graded Jacobi", max(iterations // 2, 1), l2_jacobi)

    def l2_poisson(_):
        a, b, c = rand_h(), rand_h(), rand_h()
        da, db = a.homogeneous_degree(), b.homogeneous_degree()
        sign = -1 if ((da + 1) * db) % 2 else 1
        lhs = ops.ell2(D, a, b * c)
        rhs = ops.ell2(D, a, b) * c + (b * ops.ell2(D, a, c)).scale(sign)
        if lhs != rhs:
            return _counterexample(a, b, c)
    _check_loop(report, "bracket: Poisson rule", max(iterations // 2, 1), l2_poisson)

    def l3_vanishes(_):
        args = tuple(rand_h() for _ in range(3))
        if not ops.ell_n(D, args).is_zero():
            return _counterexample(*args)
        if not ops.ell_n(D, args + (rand_h(),)).is_zero():
            return "l4: " + _counterexample(*args)
    _check_loop(report, "descendants: l_n = 0 for n >= 3",
                max(iterations // 4, 1), l3_vanishes)

    def exp_identities(_):
        gamma = random_element(ctx, rng, homogeneous_degree=0, terms=2, max_xdeg=2)
        lam = random_homogeneous(ctx, rng, terms=2, max_xdeg=2)
        for order in (1, 2, 3):
            if ops.exp_identity_lhs(D, gamma, None, order) != \
                    ops.exp_identity_rhs(D, gamma, None, order):
                return f"order {order}: " + _counterexample(gamma)
            if ops.exp_identity_lhs(D, gamma, lam, order) != \
                    ops.exp_identity_rhs(D, gamma, lam, order):
                return f"order {order} with argument: " + _counterexample(gamma, lam)
    _check_loop(report, "exponential identities at truncation orders <= 3",
                max(iterations // 20, 1), exp_identities)

    def bell_consistency(_):
        xs = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(6)]
        for n in range(1, 7):
            total = sum(ops.bell_partial(n, j, xs[:n - j + 1]) for j in range(1, n + 1))
            if total != ops.bell_complete(n, xs[:n]):
                return f"n={n}, xs={xs}"
    _check_loop(report, "Bell polynomials: partial sums match complete",
                max(iterations // 10, 1), bell_consistency)

    # --- reduction machinery ---------------------------------------------------
    c_G = ctx.background_charge()

    def reduce_sound(_):
        f = random_charge_element(D, rng, c_G, 0)
        result = presentation.reduce(f)
        rebuilt = ops.apply_k(D, result.certificate) + result.as_element(presentation)
        if rebuilt != f:
            return _counterexample(f)
    _check_loop(report, "reduce: certificate soundness", iterations, reduce_sound)

    def reduce_kernel(_):
        xi = random_charge_element(D, rng, c_G, -1)
        image = ops.apply_k(D, xi)
        if image.is_zero():
            return None
        result = presentation.reduce(image)
        if any(result.coefficients):
            return _counterexample(xi)
    _check_loop(report, "reduce: vanishes on the image of K", iterations, reduce_kernel)

    def reduce_idem(i):
        rho = i % presentation.dimension
        e = presentation.basis_elements()[rho]
        result = presentation.reduce(e)
        expected = tuple(Fraction(1) if j == rho else Fraction(0)
                         for j in range(presentation.dimension))
        if result.coefficients != expected or not result.certificate.is_zero():
            return render(e)
    _check_loop(report, "reduce: basis idempotence",
                min(iterations, presentation.dimension), reduce_idem)

    def reduce_linear(_):
        f, g = (random_charge_element(D, rng, c_G, 0) for _ in range(2))
        a = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        b = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        lhs = presentation.reduce(f.scale(a) + g.scale(b)).coefficients
        rf = presentation.reduce(f).coefficients
        rg = presentation.reduce(g).coefficients
        rhs = tuple(a * x + b * y for x, y in zip(rf, rg))
        if lhs != rhs:
            return _counterexample(f, g)
    _check_loop(report, "reduce: linearity", max(iterations // 2, 1), reduce_linear)

    def concentration(_):
        lam = c_G + rng.choice([-2, -1, 1, 2, 3])
        xi = random_charge_element(D, rng, lam, -1)
        f = ops.apply_k(D, xi)  # K-closed by construction
        if f.is_zero():
            return None
        deg = f.homogeneous_degree()
        sign = -1 if deg % 2 else 1
        R = charge_generator(D)
        witness = (f * R).scale(Fraction(sign, lam - c_G))
        if ops.apply_k(D, witness) != f:
            return _counterexample(f)
    _check_loop(report, "charge concentration: R-witness gives exact preimages",
                max(iterations // 4, 1), concentration)

    def cochain_functional(_):
        row = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                    for _ in range(presentation.dimension))
        f = reduction_functional(presentation, row)
        xi = random_element(ctx, rng)
        if f(ops.apply_k(D, xi)) != 0:
            return _counterexample(xi)
    _check_loop(report, "reduction functionals kill the image of K",
                max(iterations // 4, 1), cochain_functional)

    def descendant_moments(_):
        # moment/cumulant shape of the descendant maps: f(Gamma^m) equals the
        # complete Bell polynomial of the phi values
        row = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                    for _ in range(presentation.dimension))
        f = reduction_functional(presentation, row)
        gamma = random_element(ctx, rng, homogeneous_degree=0, terms=2, max_xdeg=2)
        cache: dict = {}
        phis = [ops.phi_n(f, (gamma,) * m, _cache=cache) for m in range(1, 5)]
        for m in range(1, 5):
            if f(gamma ** m) != ops.bell_complete(m, phis[:m]):
                return f"m={m}: " + _counterexample(gamma)
    _check_loop(report, "descendant maps assemble exponentials",
                max(iterations // 20, 1), descendant_moments)

    def parse_render_round_trip(_):
        e = random_element(ctx, rng, terms=4)
        from .polyparse import parse

        if parse(render(e), ctx) != e:
            return _counterexample(e)
    _check_loop(report, "surface syntax: parse inverts render",
                max(iterations // 2, 1), parse_render_round_trip)

    # --- deformation ------------------------------------------------------------
    if deformation_H is not None:
        deform = build_deformation(D, deformation_H)
        try:
            mc_check(D, deform.gamma)
        except Exception as exc:
            report.add("deformation: Maurer-Cartan equation", False, str(exc))
        else:
            report.add("deformation: Maurer-Cartan equation", True)

        def deformed_operator(_):
            lam = rand()
            if k_gamma(D, deform.gamma, lam) != ops.apply_k(deform.deformed, lam):
                return _counterexample(lam)
        _check_loop(report, "deformation: K_Gamma equals the deformed K",
                    iterations, deformed_operator)

    return report


def reduction_functional(presentation: QuotientPresentation, row) -> LinearFunctional:
    """The cochain functional x -> row . reduce(x), extended by zero.

    Elements are first projected to cohomological degree 0 and the
    background charge; everything else is annihilated, mirroring how the
    period functionals act.
    """
    row = tuple(Fraction(c) if not isinstance(c, Fraction) else c for c in row)
    if len(row) != presentation.dimension:
        raise ValueError("row length must match the basis dimension")
    ctx = presentation.dwork.ctx
    c_G = presentation.c_G

    def evaluate(x: SuperElement) -> Fraction:
        picked = {m: c for m, c in x.terms.items()
                  if not m.eta and monomial_charge(ctx, m) == c_G}
        if not picked:
            return Fraction(0)
        result = presentation.reduce(SuperElement(ctx, picked), _use_cache=True)
        return sum((a * b for a, b in zip(row, result.coefficients)), Fraction(0))

    return LinearFunctional(evaluate, cochain=True, name="row-dot-reduce")


# -- fault injection (harness self-test) --------------------------------------

FAULT_HOOKS = ("delta-drop-term", "bracket-sign")


class fault_injection:
    """Context manager corrupting one operator; only for testing the suite."""

    def __init__(self, name: str):
        if name not in FAULT_HOOKS:
            raise ValueError(f"unknown fault hook {name!r}; choose from {FAULT_HOOKS}")
        self.name = name
        self._saved = None

    def __enter__(self):
        if self.name == "delta-drop-term":
            self._saved = ops.apply_delta
            original = self._saved

            def corrupted(a):
                value = original(a)
                if value.is_zero():
                    return value
                # drop one term: breaks delta^2 = 0 and K^2 = 0 downstream
                terms = dict(value.terms)
                terms.pop(next(iter(terms)))
                return SuperElement(value.ctx, terms)

            ops.apply_delta = corrupted
        else:
            self._saved = ops.ell2
            original = self._saved

            def corrupted(D, a, b):
                return original(D, a, b).scale(-1)

            ops.ell2 = corrupted
        return self

    def __exit__(self, *exc):
        if self.name == "delta-drop-term":
            ops.apply_delta = self._saved
        else:
            ops.ell2 = self._saved
        return False
