"""Independent oracles shared by the unit and acceptance tests.

Everything here deliberately avoids the library's SuperElement machinery:
polynomials are plain dicts over x exponent tuples, ranks come from dense
rational elimination, and enumeration scans bounded exponent boxes.
"""

import itertools
from fractions import Fraction

from dworkbox import SuperMonomial
from dworkbox.superalgebra import monomial_charge, monomial_weight, partial_q


def poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return {k: v for k, v in out.items() if v}


def monomials_of_degree(nvars, degree):
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            yield (first,) + rest


def dense_rank(vectors, columns):
    index = {c: i for i, c in enumerate(columns)}
    rows = []
    for vec in vectors:
        row = [Fraction(0)] * len(columns)
        for mono, c in vec.items():
            row[index[mono]] = c
        rows.append(row)
    rank = 0
    for col in range(len(columns)):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col] * inv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def jacobian_ring_dimension(nvars, gradient_polys, degree):
    """dim of the degree piece of Q[x] / (gradient ideal), brute force."""
    columns = list(monomials_of_degree(nvars, degree))
    vectors = []
    for g in gradient_polys:
        gdeg = max(sum(e) for e in g)
        shift = degree - gdeg
        if shift < 0:
            continue
        for mono in monomials_of_degree(nvars, shift):
            vectors.append(poly_mul({mono: Fraction(1)}, g))
    return len(columns) - dense_rank(vectors, columns)


def x_poly(ctx, element):
    """Strip an x-only SuperElement down to the oracle's dict form."""
    out = {}
    for mono, c in element.terms.items():
        out[tuple(mono.qexp[ctx.k:])] = c
    return out


def griffiths_hodge_numbers(ctx, G):
    """Hypersurface (k = 1) primitive Hodge numbers via the Jacobian ring.

    h^{n-1-q, q}_prim = dim of the Jacobian ring in degree (q+1) d - (n+1).
    """
    d = ctx.degrees[0]
    n = ctx.n
    grads = [x_poly(ctx, partial_q(ctx.k + 1 + j, G)) for j in range(n + 1)]
    out = []
    for q in range(0, n):
        degree = (q + 1) * d - (n + 1)
        out.append(0 if degree < 0 else jacobian_ring_dimension(n + 1, grads, degree))
    return out


def two_quadrics_weight_coranks(dwork):
    """Coranks of the two graded pieces of the two-quadrics example.

    Weight 0 is the constants; weight 1 is assembled by hand over columns
    (y index, x exponent) from x_i * dS/dx_j and y_m * G_l.
    """
    ctx = dwork.ctx
    g = [x_poly(ctx, G) for G in dwork.G]
    dg = []
    for j in range(ctx.n + 1):
        dg.append(tuple(x_poly(ctx, partial_q(ctx.k + 1 + j, G)) for G in dwork.G))
    columns = [(m, e) for m in range(ctx.k)
               for e in monomials_of_degree(ctx.n + 1, 2)]
    vectors = []
    for i in range(ctx.n + 1):
        xi = [0] * (ctx.n + 1)
        xi[i] = 1
        xi = {tuple(xi): Fraction(1)}
        for j in range(ctx.n + 1):
            vec = {}
            for m, part in enumerate(dg[j]):
                for mono, c in poly_mul(xi, part).items():
                    vec[(m, mono)] = vec.get((m, mono), Fraction(0)) + c
            vectors.append(vec)
    for m in range(ctx.k):
        for gl in g:
            vectors.append({(m, mono): c for mono, c in gl.items()})
    corank1 = len(columns) - dense_rank(vectors, columns)
    return [1, corank1]


def brute_force_piece(ctx, charge, weight, eta_degree, exp_bound=12):
    """Enumerate a graded piece by scanning a bounded exponent box."""
    found = set()
    size = -eta_degree
    if size < 0 or size > ctx.nvars:
        return found
    for eta in itertools.combinations(range(1, ctx.nvars + 1), size):
        for v in itertools.product(range(0, weight + 1), repeat=ctx.k):
            for u in itertools.product(range(0, exp_bound + 1), repeat=ctx.n + 1):
                mono = SuperMonomial(tuple(v) + tuple(u), eta)
                if monomial_charge(ctx, mono) == charge and \
                        monomial_weight(ctx, mono) == weight:
                    found.add(mono)
    return found
