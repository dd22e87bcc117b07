"""Deformation of the quotient and of period data.

A deformation replaces the defining polynomials G by U = G + H (same
degrees, zeros allowed in H) and is encoded by Gamma = sum_i y_i H_i, which
solves the shifted Maurer-Cartan equation K(Gamma) + 1/2 l2(Gamma, Gamma) = 0.
The deformed differential K_Gamma(x) = K(x) + l2(Gamma, x) coincides with the
twisted differential of U; both facts are checked exactly at construction.

From a deformation the module builds:

  * a basis {u_alpha} of the deformed quotient whose first |I'| members come
    from the nonzero H_i (the exact shape depends on the sign of the
    background charge), extended greedily by undeformed basis monomials;
  * the power series T^rho(t) determined by reducing the deformation
    exponential coefficient-by-coefficient, with K-exactness certificates
    retained at every multi-exponent;
  * the ladder of derivative matrices D (partial sums per total order) whose
    limit transports period matrices via  Omega_U = D * Omega_G * B.

Period matrices and the integral base change B are opaque user inputs; the
transport is plain matrix algebra in whatever arithmetic the entries carry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cohomology import QuotientPresentation, enumerate_piece
from .errors import (
    AssumptionError,
    IndependenceError,
    InputError,
    InternalCheckError,
)
from .operators import (
    DworkData,
    LinearFunctional,
    apply_k,
    bell_complete,
    dwork_potential,
    ell2,
    phi_n,
)
from .superalgebra import (
    SuperElement,
    VariableContext,
    monomial_sort_key,
)


@dataclass(frozen=True)
class DeformationData:
    """Base and deformed Dwork data joined by Gamma = sum y_i H_i."""

    base: DworkData
    H: tuple
    gamma: SuperElement
    deformed: DworkData
    nonzero_indices: tuple  # 1-based positions i with H_i != 0

    @property
    def is_trivial(self) -> bool:
        return not self.nonzero_indices


def mc_check(D: DworkData, gamma: SuperElement) -> None:
    """Verify K(Gamma) + 1/2 l2(Gamma, Gamma) = 0 exactly.

    Gamma must be eta-free (degree 0); a nonzero residual is reported with
    the offending summand.
    """
    if gamma.homogeneous_degree() != 0:
        raise InputError("Maurer-Cartan candidate must have degree 0")
    first = apply_k(D, gamma)
    second = ell2(D, gamma, gamma).scale(Fraction(1, 2))
    if not first.is_zero():
        raise InternalCheckError(f"Maurer-Cartan failure in K(Gamma): {first!r}")
    if not second.is_zero():
        raise InternalCheckError(f"Maurer-Cartan failure in l2(Gamma, Gamma): {second!r}")


def k_gamma(D: DworkData, gamma: SuperElement, lam: SuperElement) -> SuperElement:
    """The deformed differential K_Gamma(lam) = K(lam) + l2(Gamma, lam)."""
    out = apply_k(D, lam)
    if gamma.is_zero():
        return out
    return out + ell2(D, gamma, lam)


def build_deformation(base: DworkData, H: Sequence[SuperElement],
                      slack: int = 2) -> DeformationData:
    """Assemble Gamma and the deformed potential; runs the MC check.

    Each H_i is either zero or homogeneous of degree d_i in x only.  The
    deformed geometry is validated later when its presentation is built.
    """
    ctx = base.ctx
    H = tuple(H)
    if len(H) != ctx.k:
        raise InputError(f"expected {ctx.k} deformation polynomials, got {len(H)}")
    gamma = SuperElement.zero(ctx)
    nonzero = []
    U = []
    for i, (g, h) in enumerate(zip(base.G, H), start=1):
        if h.ctx != ctx:
            raise InputError("deformation polynomial over a different context")
        if not h.is_zero():
            for mono in h.terms:
                if mono.eta:
                    raise InputError(f"H_{i} contains an eta factor")
                if any(mono.qexp[j] for j in range(ctx.k)):
                    raise InputError(f"H_{i} contains a y variable")
                if sum(mono.qexp[ctx.k:]) != ctx.degrees[i - 1]:
                    raise InputError(
                        f"H_{i} not homogeneous of degree {ctx.degrees[i - 1]}")
            nonzero.append(i)
            gamma = gamma + SuperElement.variable(ctx, i) * h
        U.append(g + h)
    deformed = dwork_potential(ctx, U)
    if deformed.S != base.S + gamma:
        raise InternalCheckError("deformed potential does not equal S + Gamma")
    mc_check(base, gamma)
    return DeformationData(base, H, gamma, deformed, tuple(nonzero))


# -- u basis ------------------------------------------------------------------


@dataclass(frozen=True)
class UBasis:
    """Ordered basis u_1..u_delta of the deformed quotient.

    The first ``len(prime_indices)`` entries are the classes built from the
    nonzero H_i; ``prime_indices`` records their (1-based) positions in the
    basis order, i.e. I' viewed inside I.  For negative background charge the
    construction multiplies by y_j^m h; the choice made is recorded.
    """

    elements: tuple
    prime_indices: tuple
    h_factor: Optional[SuperElement]
    y_choice: Optional[tuple]  # (j, m) for negative background charge


def _smallest_x_monomial(ctx: VariableContext, degree: int) -> SuperElement:
    """Smallest canonical eta-free x-monomial of the given degree."""
    piece = [m for m in enumerate_piece(ctx, degree, 0, 0).monomials]
    if not piece:
        raise InputError(f"no x-monomial of degree {degree}")
    mono = min(piece, key=lambda m: monomial_sort_key(ctx, m))
    return SuperElement(ctx, {mono: Fraction(1)})


def _check_h_factor(ctx: VariableContext, h: SuperElement, degree: int) -> None:
    """Supplied charge-matching factors must be x-only of the forced degree."""
    if h.is_zero():
        raise InputError("h factor must be nonzero")
    for mono in h.terms:
        if mono.eta:
            raise InputError("h factor must not contain eta variables")
        if any(mono.qexp[i] for i in range(ctx.k)):
            raise InputError("h factor must not contain y variables")
        if sum(mono.qexp[ctx.k:]) != degree:
            raise InputError(f"h factor must be homogeneous of degree {degree}")


def _pick_y_power(ctx: VariableContext, c_G: int):
    """(j, m) minimizing m * d_j subject to m*d_j + c_G >= 0, m >= 1.

    Ties break toward the smallest index j.
    """
    best = None
    choice = None
    for j in range(1, ctx.k + 1):
        d = ctx.degrees[j - 1]
        m = max(1, (-c_G + d - 1) // d)  # least m >= 1 with m*d >= -c_G
        key = (m * d, j)
        if best is None or key < best:
            best = key
            choice = (j, m)
    return choice


def u_basis(def_data: DeformationData, pres_G: QuotientPresentation,
            pres_U: QuotientPresentation,
            h: Optional[SuperElement] = None,
            y_choice: Optional[tuple] = None) -> UBasis:
    """Construct {u_alpha} with the deformation classes in front.

    For background charge 0 the leading classes are y_i H_i; for positive
    charge they are multiplied by an x-polynomial h of degree c_G (smallest
    canonical monomial unless supplied); for negative charge additionally by
    y_j^m with (j, m) minimizing m d_j (overridable).  After verifying that
    these classes are linearly independent in the deformed quotient, the
    basis is completed greedily by the undeformed basis monomials whose
    deformed reductions keep the rank growing.
    """
    ctx = def_data.base.ctx
    c_G = ctx.background_charge()
    dim = pres_G.dimension
    if pres_U.dimension != dim:
        raise InternalCheckError(
            f"deformed quotient dimension {pres_U.dimension} != base {dim}")
    ell = len(def_data.nonzero_indices)
    if dim <= ell:
        # standing hypothesis of the construction, not a malformed input
        raise AssumptionError(
            f"need strictly more basis classes than deformed equations "
            f"(|I| = {dim} <= |I'| = {ell})")

    factor = SuperElement.one(ctx)
    picked_y = None
    if c_G > 0:
        if h is None:
            h = _smallest_x_monomial(ctx, c_G)
        else:
            _check_h_factor(ctx, h, c_G)
        factor = h
    elif c_G < 0:
        if y_choice is None:
            y_choice = _pick_y_power(ctx, c_G)
        j, m = y_choice
        if not (1 <= j <= ctx.k) or m < 1:
            raise InputError(f"invalid y power choice {y_choice}")
        hdeg = m * ctx.degrees[j - 1] + c_G
        if hdeg < 0:
            raise InputError(f"y power choice {y_choice} cannot reach charge {c_G}")
        if h is None:
            h = _smallest_x_monomial(ctx, hdeg)
        else:
            _check_h_factor(ctx, h, hdeg)
        factor = h * SuperElement.variable(ctx, j) ** m
        picked_y = (j, m)
    else:
        h = None

    leaders = []
    for i in def_data.nonzero_indices:
        u = SuperElement.variable(ctx, i) * def_data.H[i - 1] * factor
        if u.homogeneous_charge() != c_G:
            raise InternalCheckError("u class misses the background charge")
        leaders.append(u)

    # incremental exact rank tracking over reduced coordinate vectors;
    # every stored row has support >= its pivot position
    echelon: dict = {}

    def try_insert(vec):
        row = dict(vec)
        while row:
            pos = min(row)
            hit = echelon.get(pos)
            if hit is None:
                scale = row[pos]
                echelon[pos] = {p: c / scale for p, c in row.items()}
                return True
            lead = row[pos]
            for p, c in hit.items():
                new = row.get(p, Fraction(0)) - lead * c
                if new:
                    row[p] = new
                else:
                    row.pop(p, None)
        return False

    for idx, u in enumerate(leaders, start=1):
        coeffs = pres_U.reduce(u).coefficients
        vec = {i: c for i, c in enumerate(coeffs) if c}
        if not try_insert(vec):
            raise IndependenceError(
                f"deformation class {idx} is linearly dependent on the "
                "previous ones in the deformed quotient")

    elements = list(leaders)
    for mono in pres_G.basis:
        if len(elements) == dim:
            break
        candidate = SuperElement(ctx, {mono: Fraction(1)})
        coeffs = pres_U.reduce(candidate).coefficients
        vec = {i: c for i, c in enumerate(coeffs) if c}
        if try_insert(vec):
            elements.append(candidate)
    if len(elements) != dim:
        raise InternalCheckError("failed to complete the deformed basis")
    return UBasis(tuple(elements), tuple(range(1, ell + 1)), h, picked_y)


# -- the T series -------------------------------------------------------------


@dataclass(frozen=True)
class DeformationSeries:
    """Truncated expansion of the deformation in the undeformed basis.

    coefficients maps (rho, exponent) -> scalar where rho is a 0-based basis
    position and exponent a tuple over the u-basis variables t^1..t^delta;
    T^rho(t) = sum over exponents.  certificates[exponent] is the exact
    degree -1 element picked up while reducing that t-coefficient, so that

        rhs-coefficient(exponent) = sum_rho coeff * e_rho + K(certificate).
    """

    order: int
    dimension: int
    prime_indices: tuple
    coefficients: dict
    certificates: dict

    def coefficient(self, rho: int, exponent) -> Fraction:
        return self.coefficients.get((rho, tuple(exponent)), Fraction(0))

    def series_rows(self):
        """Deterministic export order: (rho, exponent, numerator, denominator)."""
        rows = []
        for (rho, expo), c in self.coefficients.items():
            rows.append((rho, expo, c.numerator, c.denominator))
        rows.sort(key=lambda r: (r[0], sum(r[1]), r[1]))
        return rows


def _exponents_of_order(nvars: int, total: int):
    if nvars == 0:
        if total == 0:
            yield ()
        return
    if nvars == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _exponents_of_order(nvars - 1, total - first):
            yield (first,) + rest


def t_series(def_data: DeformationData, pres_G: QuotientPresentation,
             basis_u: UBasis, order: int) -> DeformationSeries:
    """Expand the deformation exponential and reduce it coefficient-wise.

    Background charge 0:  sum_rho T^rho(t) e_rho + K(Lambda(t)) = e^{sum t^a u_a} - 1.
    Nonzero background charge: the exponential only carries the deformation
    classes y_i H_i and the prefactor (h + sum_{b outside I'} t^b u_b) or its
    y_j^m-twisted variant supplies the charge.

    Every t-coefficient of the right side is reduced through the undeformed
    presentation; coefficients land in T, certificates in Lambda.
    """
    if order < 1:
        raise InputError("truncation order must be >= 1")
    ctx = def_data.base.ctx
    c_G = ctx.background_charge()
    dim = pres_G.dimension
    elements = basis_u.elements
    prime = basis_u.prime_indices
    coefficients = {}
    certificates = {}

    if c_G == 0:
        # coefficient of t^m is prod u_a^{m_a} / prod m_a!
        for total in range(1, order + 1):
            for expo in _exponents_of_order(dim, total):
                value = SuperElement.one(ctx)
                denom = 1
                for a, e in enumerate(expo):
                    if e:
                        value = value * elements[a] ** e
                        denom *= math.factorial(e)
                value = value.scale(Fraction(1, denom))
                _record(pres_G, coefficients, certificates, expo, value)
    else:
        # exponential part: only the I' variables appear in the exponent
        prefactor_const = (basis_u.h_factor if c_G > 0
                           else basis_u.h_factor * SuperElement.variable(
                               ctx, basis_u.y_choice[0]) ** basis_u.y_choice[1])
        prime_set = set(p - 1 for p in prime)
        gamma_parts = {p - 1: SuperElement.variable(ctx, i) * def_data.H[i - 1]
                       for p, i in zip(prime, def_data.nonzero_indices)}
        for total in range(0, order + 1):
            for expo in _exponents_of_order(dim, total):
                outside = [a for a, e in enumerate(expo) if e and a not in prime_set]
                if len(outside) > 1:
                    continue
                if outside and expo[outside[0]] > 1:
                    continue
                value = prefactor_const if not outside else elements[outside[0]]
                denom = 1
                for a in prime_set:
                    e = expo[a]
                    if e:
                        value = value * gamma_parts[a] ** e
                        denom *= math.factorial(e)
                value = value.scale(Fraction(1, denom))
                _record(pres_G, coefficients, certificates, expo, value)

    return DeformationSeries(order, dim, prime, coefficients, certificates)


def _record(pres: QuotientPresentation, coefficients, certificates, expo, value):
    result = pres.reduce(value)
    for rho, c in enumerate(result.coefficients):
        if c:
            coefficients[(rho, expo)] = c
    if not result.certificate.is_zero():
        certificates[expo] = result.certificate


# -- the D matrix ladder ------------------------------------------------------

def d_matrix(series: DeformationSeries, prime_indices: Optional[Sequence[int]] = None):
    """Partial sums of D[beta][rho] = d/dt^beta T^rho at t = 1 on I', 0 off I'.

    Returns {order m: matrix} for m = 1..series.order where entry [beta][rho]
    accumulates m_beta * coeff(rho, m) over exponents m of total order <= m
    with m - e_beta supported inside I'.  Exact rational matrices; the caller
    inspects convergence across orders.

    Multinomial bookkeeping makes row beta at order M equal the cumulative
    reduction of u_beta * Gamma^j / j! over j < M (the direct route of
    expansion_coefficients); the test suite pins that equality.
    """
    prime = tuple(prime_indices) if prime_indices is not None else series.prime_indices
    prime_set = set(p - 1 for p in prime)
    dim = series.dimension
    ladders = {}
    running = [[Fraction(0)] * dim for _ in range(dim)]
    by_order: dict = {}
    for (rho, expo), c in series.coefficients.items():
        by_order.setdefault(sum(expo), []).append((rho, expo, c))
    for order in range(1, series.order + 1):
        for rho, expo, c in by_order.get(order, []):
            for beta in range(dim):
                e = expo[beta]
                if not e:
                    continue
                # exponent after one derivative must sit inside I'
                shifted = list(expo)
                shifted[beta] -= 1
                if any(shifted[a] and a not in prime_set for a in range(dim)):
                    continue
                running[beta][rho] += e * c
        ladders[order] = [row[:] for row in running]
    return ladders


# -- deformation evaluators ----------------------------------------------------

def expansion_coefficients(def_data: DeformationData, pres_G: QuotientPresentation,
                           u: SuperElement, order: int):
    """Cumulative reductions of u * Gamma^m / m! for m = 0..order.

    The sequence of coefficient vectors converges (coefficient-wise, in the
    formal sense) to the deformed functional's data; pairing with a numeric
    period row is left to the caller.
    """
    if order < 0:
        raise InputError("order must be >= 0")
    c_G = def_data.base.ctx.background_charge()
    if u.homogeneous_charge() != c_G:
        raise InputError("u must be homogeneous of the background charge")
    if u.homogeneous_degree() != 0:
        raise InputError("u must be eta-free")
    out = []
    running = [Fraction(0)] * pres_G.dimension
    power = u
    for m in range(order + 1):
        if m:
            power = power * def_data.gamma
        term = power.scale(Fraction(1, math.factorial(m)))
        red = pres_G.reduce(term)
        running = [a + b for a, b in zip(running, red.coefficients)]
        out.append(tuple(running))
    return out


def bell_expansion(f: LinearFunctional, gamma: SuperElement, u: SuperElement,
                   order: int):
    """Bell-polynomial expansion of the deformed functional, per order.

    Partial sums of

        f(u) + sum_{m>=1} sum_{j+k=m} 1/(j! k!)
                 B_j(phi_1(Gamma), .., phi_j(Gamma..Gamma))
                 * phi_{k+1}(Gamma, .., Gamma, u)

    for total order 0..order.  Must match the direct truncation
    sum_m f(u Gamma^m / m!) order by order whenever f kills the image of K.
    """
    if order < 0:
        raise InputError("order must be >= 0")
    if not f.cochain:
        raise InputError("bell_expansion needs a cochain functional (f . K = 0)")
    cache: dict = {}
    phis_gamma = [None]
    for j in range(1, order + 1):
        phis_gamma.append(phi_n(f, (gamma,) * j, _cache=cache))
    bells = [Fraction(1)]
    for j in range(1, order + 1):
        bells.append(bell_complete(j, phis_gamma[1:j + 1]))
    phi_with_u = [f(u)]
    for k in range(1, order + 1):
        phi_with_u.append(phi_n(f, (gamma,) * k + (u,), _cache=cache))
    sums = [f(u)]
    running = f(u)
    for m in range(1, order + 1):
        for j in range(0, m + 1):
            k = m - j
            running += (Fraction(1, math.factorial(j) * math.factorial(k))
                        * bells[j] * phi_with_u[k])
        sums.append(running)
    return sums


# -- period transport ---------------------------------------------------------


@dataclass(frozen=True)
class PeriodMatrix:
    """Square matrix of user-supplied period values (exact or floating)."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise InputError("period matrix must be square")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for row in self.entries for v in row)


@dataclass(frozen=True)
class BaseChange:
    """Integer base change on the cycle lattice; unimodular when integral."""

    matrix: tuple
    integral: bool = True

    def __post_init__(self):
        rows = tuple(tuple(v for v in r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise InputError("base change matrix must be square")
        if self.integral:
            if any(not isinstance(v, int) for row in rows for v in row):
                raise InputError("integral base change needs integer entries")
            det = _int_determinant([list(r) for r in rows])
            if det not in (1, -1):
                raise InputError(f"integral base change must be unimodular, det = {det}")

    @property
    def size(self) -> int:
        return len(self.matrix)


def _int_determinant(rows) -> Fraction:
    n = len(rows)
    mat = [[Fraction(v) for v in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if mat[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, n):
            if mat[r][col]:
                factor = mat[r][col] * inv
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[col])]
    return det


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def period_transport(d_entries, omega: PeriodMatrix, base_change: BaseChange) -> PeriodMatrix:
    """Omega_deformed = D * Omega * B as a plain matrix product.

    Exact whenever Omega is exact; floats propagate otherwise.
    """
    size = omega.size
    if len(d_entries) != size or any(len(r) != size for r in d_entries):
        raise InputError(f"D must be {size}x{size} to match the period matrix")
    if base_change.size != size:
        raise InputError(f"base change must be {size}x{size}")
    product = _matmul(_matmul([list(r) for r in d_entries],
                              [list(r) for r in omega.entries]),
                      [list(r) for r in base_change.matrix])
    return PeriodMatrix(tuple(tuple(r) for r in product))


# -- series export ------------------------------------------------------------

def series_to_json(series: DeformationSeries) -> str:
    payload = {
        "order": series.order,
        "dimension": series.dimension,
        "primeIndices": list(series.prime_indices),
        "coefficients": [
            {"rho": rho, "exponent": list(expo), "value": f"{num}/{den}"}
            for rho, expo, num, den in series.series_rows()
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
