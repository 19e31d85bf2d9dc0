"""Exact linear algebra: row reduction over Q, GF(p) and Q(params)."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .arith import QQ, RatFun, crt_combine, default_primes, rational_reconstruct
from .caps import ResourceCaps, as_caps


class ReconstructionFailed(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# generic row reduction


def rref(rows, *, zero, is_zero, caps: ResourceCaps | None = None, pivot_key=None):
    """Reduced row echelon form of a list of rows (lists), in place.

    Returns ``(rows, pivots)``; works for any field whose elements support
    ``+ - * /``.  ``pivot_key`` may rank candidate pivots (smaller is
    preferred), e.g. to keep rational-function entries small.
    """
    caps = as_caps(caps)
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        cand = [k for k in range(r, len(rows)) if not is_zero(rows[k][c])]
        if not cand:
            continue
        k = min(cand, key=lambda t: pivot_key(rows[t][c])) if pivot_key else cand[0]
        rows[r], rows[k] = rows[k], rows[r]
        piv = rows[r][c]
        inv = 1 / piv if not isinstance(piv, RatFun) else piv.inverse()
        rows[r] = [x * inv if not is_zero(x) else zero for x in rows[r]]
        prow = rows[r]
        nz = [t for t in range(c, ncols) if not is_zero(prow[t])]
        for k in range(len(rows)):
            if k == r:
                continue
            f = rows[k][c]
            if is_zero(f):
                continue
            row = rows[k]
            for t in nz:
                row[t] = row[t] - f * prow[t]
        pivots.append(c)
        r += 1
        caps.check("row reduction")
    return rows[:r], pivots


def nullspace_from_rref(rows, pivots, ncols, *, zero, one, neg=lambda x: -x):
    """Kernel basis with one free variable set to 1 per vector."""
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(rows, pivots):
            v[p] = neg(row[f])
        basis.append(v)
    return basis


def nullspace_fraction(matrix, caps=None):
    rows, piv = rref(
        [[Fraction(x) for x in r] for r in matrix], zero=Fraction(0), is_zero=lambda x: x == 0, caps=caps
    )
    ncols = len(matrix[0]) if matrix else 0
    return nullspace_from_rref(rows, piv, ncols, zero=Fraction(0), one=Fraction(1))


# ---------------------------------------------------------------------------
# modular


def rref_mod(matrix, p: int, caps=None):
    """RREF modulo ``p`` of an integer matrix.  Returns (rows, pivots, row_ids).

    ``row_ids`` lists original row indices that were used as pivot rows,
    i.e. a maximal independent set of rows.
    """
    caps = as_caps(caps)
    rows = [([x % p for x in r], k) for k, r in enumerate(matrix)]
    if not rows:
        return [], [], []
    ncols = len(matrix[0])
    pivots, r = [], 0
    for c in range(ncols):
        if r == len(rows):
            break
        k = next((t for t in range(r, len(rows)) if rows[t][0][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        prow, pid = rows[r]
        inv = pow(prow[c], -1, p)
        prow = [x * inv % p for x in prow]
        rows[r] = (prow, pid)
        nz = [t for t in range(c, ncols) if prow[t]]
        for t in range(len(rows)):
            if t == r:
                continue
            row = rows[t][0]
            f = row[c]
            if f:
                for s in nz:
                    row[s] = (row[s] - f * prow[s]) % p
        pivots.append(c)
        r += 1
        caps.check("modular row reduction")
    return [x for x, _ in rows[:r]], pivots, [k for _, k in rows[:r]]


def nullspace_mod(matrix, p: int, caps=None):
    rows, piv, _ = rref_mod(matrix, p, caps)
    ncols = len(matrix[0]) if matrix else 0
    return piv, nullspace_from_rref(rows, piv, ncols, zero=0, one=1, neg=lambda x: (-x) % p)


def integer_rows(matrix):
    """Scale each rational row to coprime integers."""
    out = []
    for r in matrix:
        r = [Fraction(x) for x in r]
        d = lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * d) for x in r])
    return out


def nullspace_multimodular(matrix, primes=None, caps=None, verify=True):
    """Rational kernel basis from kernels modulo several primes.

    The pivot pattern from the first prime is kept; primes giving a
    different pattern are discarded as unlucky.  Entries are recovered by
    CRT and rational reconstruction once two successive prime counts give
    the same answer; the result is then checked exactly.
    """
    caps = as_caps(caps)
    primes = list(primes or default_primes())
    imat = integer_rows(matrix)
    ncols = len(imat[0]) if imat else 0
    ref_piv = None
    images = []
    previous = None
    for p in primes:
        piv, ker = nullspace_mod(imat, p, caps)
        if ref_piv is None or len(piv) > len(ref_piv):
            # more pivots means the earlier prime was unlucky
            ref_piv, images = piv, []
        elif piv != ref_piv:
            continue
        images.append((p, ker))
        if not ker:
            return []
        candidate = _reconstruct_kernel(images, ncols)
        if candidate is not None and candidate == previous:
            if not verify or all(_is_kernel_vector(imat, v) for v in candidate):
                return candidate
        previous = candidate
    raise ReconstructionFailed("rational reconstruction did not stabilise; supply more primes")


def _reconstruct_kernel(images, ncols):
    out = []
    nvec = len(images[0][1])
    for t in range(nvec):
        vec = []
        for c in range(ncols):
            r, m = crt_combine([(ker[t][c], p) for p, ker in images])
            q = rational_reconstruct(r, m)
            if q is None:
                return None
            vec.append(q)
        out.append(vec)
    return out


def _is_kernel_vector(imat, v):
    return all(sum((a * x for a, x in zip(row, v) if a), Fraction(0)) == 0 for row in imat)


# ---------------------------------------------------------------------------
# rational functions


def _ratfun_size(x: RatFun):
    return len(x.num) + len(x.den), max(x.num.total_degree(), x.den.total_degree())


def nullspace_ratfun(matrix, caps=None):
    """Kernel over the rational function field by exact elimination."""
    rows, piv = rref(
        [[QQ(x) for x in r] for r in matrix],
        zero=QQ.zero,
        is_zero=lambda x: not x,
        caps=caps,
        pivot_key=_ratfun_size,
    )
    ncols = len(matrix[0]) if matrix else 0
    return nullspace_from_rref(rows, piv, ncols, zero=QQ.zero, one=QQ.one)


def rank_ratfun(matrix, caps=None) -> int:
    _, piv = rref(
        [[QQ(x) for x in r] for r in matrix], zero=QQ.zero, is_zero=lambda x: not x, caps=caps, pivot_key=_ratfun_size
    )
    return len(piv)


def _univariate_ratrecon(values: list, points: list, var: str):
    """Rational function in ``var`` through the given points (Thiele-free EEA).

    Builds the interpolating polynomial, then runs the extended Euclidean
    algorithm against prod(x - x_k) and returns the first quotient with
    balanced degrees, or None.
    """
    import flint

    x = flint.fmpq_poly([0, 1])
    modulus = flint.fmpq_poly([1])
    interp = flint.fmpq_poly([0])
    # Newton interpolation
    for xk, yk in zip(points, values):
        yk = Fraction(yk)
        delta = (flint.fmpq(yk.numerator, yk.denominator) - interp(xk)) / modulus(xk)
        interp = interp + modulus * delta
        modulus = modulus * (x - xk)
    n = len(points)
    r0, r1 = modulus, interp
    t0, t1 = flint.fmpq_poly([0]), flint.fmpq_poly([1])
    best = None
    while True:
        if r1.degree() < 0:
            break
        if 2 * max(r1.degree(), t1.degree()) < n:
            best = (r1, t1)
            break
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if best is None:
        if interp.degree() < 0:
            return QQ.zero
        return None
    num, den = best
    return _fmpq_to_ratfun(num, var) / _fmpq_to_ratfun(den, var)


def _fmpq_to_ratfun(poly, var):
    v = QQ.var(var)
    out = QQ.zero
    for k, c in enumerate(poly.coeffs()):
        c = Fraction(int(c.p), int(c.q))
        if c:
            out = out + QQ(c) * v**k
    return out


def nullspace_interpolated(matrix, var: str, start_points: int = 8, max_points: int = 512, caps=None):
    """Kernel over Q(var) for a matrix whose entries involve only ``var``.

    The matrix is evaluated at increasing numbers of integer points, each
    image is solved over Q, and entries are reconstructed as rational
    functions; the candidate is accepted only after an exact check.
    Returns None if the evaluation route gives up (caller falls back to
    :func:`nullspace_ratfun`).
    """
    caps = as_caps(caps)
    mat = [[QQ(x) for x in r] for r in matrix]
    if not mat:
        return []
    ncols = len(mat[0])
    # generic rank and pivots: evaluate at a few points, keep the max rank
    npts = start_points
    x0 = 101
    cache: dict = {}

    def image(pt):
        if pt not in cache:
            try:
                m = [[x({var: pt}) for x in r] for r in mat]
            except ZeroDivisionError:
                cache[pt] = None
                return None
            rows, piv = rref(m, zero=Fraction(0), is_zero=lambda z: z == 0)
            cache[pt] = (piv, rows)
        return cache[pt]

    while npts <= max_points:
        caps.check("interpolated nullspace")
        pts, imgs = [], []
        best = None
        pt = x0
        while len(pts) < npts:
            im = image(pt)
            pt += 1
            if im is None:
                continue
            piv, rows = im
            if best is None or len(piv) > len(best):
                best, pts, imgs = piv, [], []
            if piv != best:
                continue
            pts.append(pt - 1)
            imgs.append(nullspace_from_rref(rows, piv, ncols, zero=Fraction(0), one=Fraction(1)))
        nvec = len(imgs[0])
        if nvec == 0:
            return []
        result = []
        ok = True
        for t in range(nvec):
            vec = []
            for c in range(ncols):
                f = _univariate_ratrecon([im[t][c] for im in imgs], pts, var)
                if f is None:
                    ok = False
                    break
                vec.append(f)
            if not ok:
                break
            result.append(vec)
        if ok and all(all(not sum((a * x for a, x in zip(row, v) if a and x), QQ.zero) for row in mat) for v in result):
            return result
        npts *= 2
    return None


# ---------------------------------------------------------------------------
# determinants


def bareiss_determinant(matrix) -> Fraction:
    """Fraction-free determinant (exact for integer or rational entries)."""
    m = [[Fraction(x) for x in r] for r in matrix]
    n = len(m)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    d = lcm(*(x.denominator for r in m for x in r))
    a = [[int(x * d) for x in r] for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((t for t in range(k + 1, n) if a[t][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], d**n)


def solve_fraction(matrix, rhs):
    """Unique solution of a square nonsingular system over Q."""
    n = len(matrix)
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(matrix, rhs)]
    rows, piv = rref(aug, zero=Fraction(0), is_zero=lambda x: x == 0)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [rows[k][n] for k in range(n)]
