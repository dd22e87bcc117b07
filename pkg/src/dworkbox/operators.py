"""Differentials and homotopy-algebra operators attached to a Dwork potential.

For defining polynomials G_1..G_k (degrees d_1..d_k, in the x variables only)
the potential is S = sum_l y_l * G_l.  The three differentials on the
super-algebra are

    delta(a) = sum_i  d/dq_i ( d/deta_i (a) )          (second order, weight -1)
    Q(a)     = sum_i  (dS/dq_i) * d/deta_i (a)         (weight 0)
    K        = Q + delta                               (the twisted differential)

K fails to be a derivation of the product; the failure is the degree-1
bracket

    l2(a, b) = K(a*b) - K(a)*b - (-1)^|a| a*K(b)

and the higher descendant brackets l_n / descendant maps phi_n measure the
higher failures (of K, respectively of a linear functional) against the
product.  Because K has order two, l_n vanishes identically for n >= 3; the
general recursion is implemented anyway and that vanishing is part of the
test suite.

Complete and partial Bell polynomials close the module; they assemble the
exponential of a formal series and drive the deformation expansion of a
functional f(u * e^Gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import ContextMismatchError, InputError
from .superalgebra import (
    SuperElement,
    VariableContext,
    partial_eta,
    partial_q,
)


@dataclass(frozen=True)
class DworkData:
    """A variable context together with S = sum y_l G_l and its gradient."""

    ctx: VariableContext
    G: tuple
    S: SuperElement
    grad: tuple  # grad[i] = dS/dq_{i+1}

    def __repr__(self):
        return f"DworkData(n={self.ctx.n}, k={self.ctx.k}, degrees={self.ctx.degrees})"


def dwork_potential(ctx: VariableContext, G: Sequence[SuperElement]) -> DworkData:
    """Validate the defining polynomials and build S with its gradient.

    Each G_l must be nonzero, use only x variables, carry no eta factors and
    be homogeneous of degree d_l in x.
    """
    G = tuple(G)
    if len(G) != ctx.k:
        raise InputError(f"expected {ctx.k} defining polynomials, got {len(G)}")
    for l, g in enumerate(G, start=1):
        if g.ctx != ctx:
            raise ContextMismatchError("defining polynomial over a different context")
        if g.is_zero():
            raise InputError(f"G_{l} is zero")
        for mono in g.terms:
            if mono.eta:
                raise InputError(f"G_{l} contains an eta factor")
            if any(mono.qexp[i] for i in range(ctx.k)):
                raise InputError(f"G_{l} contains a y variable")
            xdeg = sum(mono.qexp[ctx.k:])
            if xdeg != ctx.degrees[l - 1]:
                raise InputError(
                    f"G_{l} not homogeneous of degree {ctx.degrees[l - 1]}: "
                    f"found a degree-{xdeg} monomial")
    S = SuperElement.zero(ctx)
    for l, g in enumerate(G, start=1):
        S = S + SuperElement.variable(ctx, l) * g
    grad = tuple(partial_q(i, S) for i in range(1, ctx.nvars + 1))
    return DworkData(ctx, G, S, grad)


def apply_delta(a: SuperElement) -> SuperElement:
    """delta = sum_i d/dq_i d/deta_i; drops weight by 1, raises degree by 1."""
    ctx = a.ctx
    out = SuperElement.zero(ctx)
    for i in range(1, ctx.nvars + 1):
        stripped = partial_eta(i, a)
        if not stripped.is_zero():
            out = out + partial_q(i, stripped)
    return out


def apply_q(D: DworkData, a: SuperElement) -> SuperElement:
    """Q = sum_i (dS/dq_i) d/deta_i; preserves charge and weight."""
    if a.ctx != D.ctx:
        raise ContextMismatchError("element over a different context")
    out = SuperElement.zero(D.ctx)
    for i in range(1, D.ctx.nvars + 1):
        stripped = partial_eta(i, a)
        if not stripped.is_zero():
            out = out + D.grad[i - 1] * stripped
    return out


def apply_k(D: DworkData, a: SuperElement) -> SuperElement:
    """The twisted differential K = Q + delta."""
    return apply_q(D, a) + apply_delta(a)


def ell2(D: DworkData, a: SuperElement, b: SuperElement) -> SuperElement:
    """The GBV bracket l2(a,b) = K(ab) - K(a)b - (-1)^|a| a K(b).

    ``a`` must be homogeneous in cohomological degree (the sign needs |a|).
    """
    deg = a.homogeneous_degree()
    if deg is None:
        raise InputError("ell2 needs the first argument degree-homogeneous")
    sign = -1 if deg % 2 else 1
    return apply_k(D, a * b) - apply_k(D, a) * b - sign * (a * apply_k(D, b))


def _check_degree(x: SuperElement) -> int:
    deg = x.homogeneous_degree()
    if deg is None:
        raise InputError("descendant brackets need degree-homogeneous arguments")
    return deg


def ell_n(D: DworkData, args: Sequence[SuperElement], _cache: Optional[dict] = None) -> SuperElement:
    """Descendant bracket l_n, n = len(args) >= 1, by the inductive formula

        l_1 = K
        l_n(x_1..x_n) = l_{n-1}(x_1,..,x_{n-2}, x_{n-1} x_n)
                        - l_{n-1}(x_1,..,x_{n-1}) x_n
                        - (-1)^(|x_{n-1}|(1+|x_1|+..+|x_{n-2}|))
                              x_{n-1} l_{n-1}(x_1,..,x_{n-2}, x_n)

    Results are memoized per call tree on the argument tuple (the recursion
    revisits sub-brackets exponentially otherwise).
    """
    args = tuple(args)
    if len(args) < 1:
        raise InputError("ell_n needs at least one argument")
    cache = {} if _cache is None else _cache
    return _ell_rec(D, args, cache)


def _ell_rec(D: DworkData, args: tuple, cache: dict) -> SuperElement:
    if len(args) == 1:
        return apply_k(D, args[0])
    hit = cache.get(args)
    if hit is not None:
        return hit
    head, a, b = args[:-2], args[-2], args[-1]
    deg_a = _check_degree(a)
    deg_head = sum(_check_degree(x) for x in head)
    sign = -1 if (deg_a * (1 + deg_head)) % 2 else 1
    value = (
        _ell_rec(D, head + (a * b,), cache)
        - _ell_rec(D, head + (a,), cache) * b
        - sign * (a * _ell_rec(D, head + (b,), cache))
    )
    cache[args] = value
    return value


class LinearFunctional:
    """A linear map from the super-algebra to exact scalars.

    The callable contract: linear over ExactScalar and vanishing outside
    cohomological degree 0.  ``cochain`` flags maps known to kill the image
    of K (the reduction-derived functionals set it; ad-hoc stand-ins may
    not).
    """

    def __init__(self, func: Callable[[SuperElement], Fraction], cochain: bool = False,
                 name: str = "functional"):
        self._func = func
        self.cochain = cochain
        self.name = name

    def __call__(self, a: SuperElement) -> Fraction:
        value = self._func(a)
        if not isinstance(value, Fraction):
            value = Fraction(value)
        return value

    def __repr__(self):
        return f"LinearFunctional({self.name}, cochain={self.cochain})"


def _two_block_partitions(m: int):
    """2-block partitions of {1..m} with m-1 and m in different blocks.

    Blocks come out ordered by their minimum (block containing 1 first);
    indices inside a block are increasing.  Yields (B1, B2) as tuples of
    0-based positions.
    """
    rest = list(range(1, m))
    # Choose the subset joining position 0; positions m-2 and m-1 must split.
    for mask in range(1 << (m - 1)):
        b1 = [0] + [rest[i] for i in range(m - 1) if mask >> i & 1]
        b2 = [rest[i] for i in range(m - 1) if not mask >> i & 1]
        if not b2:
            continue
        in1 = (m - 2) in b1
        if ((m - 1) in b1) == in1:
            continue
        yield tuple(b1), tuple(b2)


def phi_n(f: LinearFunctional, args: Sequence[SuperElement],
          _cache: Optional[dict] = None) -> Fraction:
    """Descendant map phi_n of a linear functional, n = len(args) >= 1.

        phi_1 = f
        phi_m(x_1..x_m) = phi_{m-1}(x_1,..,x_{m-2}, x_{m-1} x_m)
                          - sum over 2-block partitions pi of {1..m}
                            separating m-1 from m of phi(x_B1) phi(x_B2)

    Memoized per call tree on argument tuples, exactly like ell_n.
    """
    args = tuple(args)
    if len(args) < 1:
        raise InputError("phi_n needs at least one argument")
    cache = {} if _cache is None else _cache
    return _phi_rec(f, args, cache)


def _phi_rec(f: LinearFunctional, args: tuple, cache: dict) -> Fraction:
    if len(args) == 1:
        return f(args[0])
    hit = cache.get(args)
    if hit is not None:
        return hit
    m = len(args)
    value = _phi_rec(f, args[:-2] + (args[-2] * args[-1],), cache)
    for b1, b2 in _two_block_partitions(m):
        value -= (_phi_rec(f, tuple(args[i] for i in b1), cache)
                  * _phi_rec(f, tuple(args[i] for i in b2), cache))
    cache[args] = value
    return value


# -- Bell polynomials -------------------------------------------------------

def bell_complete(n: int, xs: Sequence) -> Fraction:
    """Complete Bell polynomial B_n(x_1..x_n), with B_0 = 1.

    Uses the recurrence B_{m+1} = sum_i C(m, i) B_{m-i} x_{i+1}.
    """
    if n < 0:
        raise InputError("bell_complete needs n >= 0")
    if len(xs) < n:
        raise InputError(f"need {n} arguments, got {len(xs)}")
    xs = [Fraction(x) if not isinstance(x, Fraction) else x for x in xs]
    b = [Fraction(1)]
    for m in range(n):
        value = Fraction(0)
        for i in range(m + 1):
            value += math.comb(m, i) * b[m - i] * xs[i]
        b.append(value)
    return b[n]


def bell_partial(n: int, j: int, xs: Sequence) -> Fraction:
    """Partial Bell polynomial B_{n,j}(x_1..x_{n-j+1}).

    Recurrence: B_{n,j} = sum_{i=1}^{n-j+1} C(n-1, i-1) x_i B_{n-i,j-1},
    with B_{0,0} = 1, B_{n,0} = 0 for n >= 1 and B_{0,j} = 0 for j >= 1.
    """
    if n < 0 or j < 0:
        raise InputError("bell_partial needs n, j >= 0")
    if j > n:
        raise InputError(f"bell_partial needs j <= n, got n={n}, j={j}")
    if j == 0:
        return Fraction(1) if n == 0 else Fraction(0)
    if len(xs) < n - j + 1:
        raise InputError(f"need {n - j + 1} arguments, got {len(xs)}")
    xs = [Fraction(x) if not isinstance(x, Fraction) else x for x in xs]
    cache: dict = {}

    def rec(nn: int, jj: int) -> Fraction:
        # every cell reached from (n, j) keeps nn - jj <= n - j, so the
        # argument list is never overrun
        if jj == 0:
            return Fraction(1) if nn == 0 else Fraction(0)
        if nn == 0:
            return Fraction(0)
        key = (nn, jj)
        hit = cache.get(key)
        if hit is not None:
            return hit
        value = Fraction(0)
        for i in range(1, nn - jj + 2):
            prev = rec(nn - i, jj - 1)
            if prev:
                value += math.comb(nn - 1, i - 1) * xs[i - 1] * prev
        cache[key] = value
        return value

    return rec(n, j)


# -- truncated exponential identities (test harness) ------------------------

def _gamma_powers(gamma: SuperElement, order: int):
    powers = [SuperElement.one(gamma.ctx)]
    for _ in range(order):
        powers.append(powers[-1] * gamma)
    return powers


def exp_identity_lhs(D: DworkData, gamma: SuperElement, lam: Optional[SuperElement],
                     order: int) -> SuperElement:
    """Left side of the exponential identities, truncated in powers of Gamma.

    With lam=None:   K(e^Gamma - 1)   = sum_{m=1..order} K(Gamma^m) / m!
    With lam given:  K(lam * e^Gamma) = sum_{m=0..order} K(lam Gamma^m) / m!
    """
    if order < 1:
        raise InputError("truncation order must be >= 1")
    if gamma.homogeneous_degree() != 0:
        raise InputError("Gamma must have cohomological degree 0")
    powers = _gamma_powers(gamma, order)
    out = SuperElement.zero(D.ctx)
    if lam is None:
        for m in range(1, order + 1):
            out = out + apply_k(D, powers[m]).scale(Fraction(1, math.factorial(m)))
    else:
        for m in range(0, order + 1):
            out = out + apply_k(D, lam * powers[m]).scale(Fraction(1, math.factorial(m)))
    return out


def exp_identity_rhs(D: DworkData, gamma: SuperElement, lam: Optional[SuperElement],
                     order: int) -> SuperElement:
    """Right side of the same identities, truncated at the same Gamma-order.

    With lam=None:   L(Gamma) e^Gamma where L(Gamma) = sum_{r>=1} l_r(Gamma..)/r!
    With lam given:  L_Gamma(lam) e^Gamma + (-1)^|lam| lam K(e^Gamma - 1)
                     where L_Gamma(lam) = K(lam) + sum_{r>=2} l_r(Gamma..,lam)/(r-1)!

    Both sides agree degree-by-degree in Gamma; disagreement at any
    truncation order is a bug in the bracket tower.
    """
    if order < 1:
        raise InputError("truncation order must be >= 1")
    if gamma.homogeneous_degree() != 0:
        raise InputError("Gamma must have cohomological degree 0")
    powers = _gamma_powers(gamma, order)
    cache: dict = {}
    # ell_r(Gamma, ..., Gamma)/r! and, with lam, ell_{r+1}(Gamma,..,lam)/r!
    l_parts = [SuperElement.zero(D.ctx)]  # index r = Gamma-homogeneity
    for r in range(1, order + 1):
        l_parts.append(ell_n(D, (gamma,) * r, _cache=cache).scale(Fraction(1, math.factorial(r))))
    out = SuperElement.zero(D.ctx)
    if lam is None:
        for m in range(1, order + 1):
            for r in range(1, m + 1):
                s = m - r
                out = out + (l_parts[r] * powers[s]).scale(Fraction(1, math.factorial(s)))
        return out
    lam_deg = lam.homogeneous_degree()
    if lam_deg is None:
        raise InputError("lam must be degree-homogeneous")
    lg_parts = [apply_k(D, lam)]
    for r in range(1, order + 1):
        lg = ell_n(D, (gamma,) * r + (lam,), _cache=cache)
        lg_parts.append(lg.scale(Fraction(1, math.factorial(r))))
    for m in range(0, order + 1):
        for r in range(0, m + 1):
            s = m - r
            out = out + (lg_parts[r] * powers[s]).scale(Fraction(1, math.factorial(s)))
    sign = -1 if lam_deg % 2 else 1
    tail = exp_identity_lhs(D, gamma, None, order)
    return out + sign * (lam * tail)
