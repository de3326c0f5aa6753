"""Exact arithmetic in O/p^W for unramified O, its cyclotomic extension by
p-th roots of unity, and linear algebra over Z/p^W.

Elements of O are tuples of ``f`` integers: coefficients of 1, u, ..., u^{f-1}
modulo a monic lift g(u) of an irreducible polynomial over F_p.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

# Conway polynomials, coefficients listed from the constant term upwards.
CONWAY = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp(x: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero."""
    if x == 0:
        return cap if cap is not None else 10**9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _poly_mulmod_p(a, b, g, p):
    """Multiply polynomials over F_p modulo monic g."""
    f = len(g) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    for k in range(len(res) - 1, f - 1, -1):
        c = res[k]
        if c:
            for j in range(f + 1):
                res[k - f + j] = (res[k - f + j] - c * g[j]) % p
    return (res + [0] * f)[:f]


def _is_irreducible_mod_p(g, p):
    # Rabin-style test by brute force: no factor of degree <= f/2.
    f = len(g) - 1
    if f == 1:
        return True
    from itertools import product
    for d in range(1, f // 2 + 1):
        for tail in product(range(p), repeat=d):
            h = list(tail) + [1]
            # polynomial remainder of g by h over F_p
            r = list(g)
            for k in range(len(r) - 1, d - 1, -1):
                c = r[k] % p
                if c:
                    for j in range(d + 1):
                        r[k - d + j] = (r[k - d + j] - c * h[j]) % p
            if all(x % p == 0 for x in r[:d]):
                return False
    return True


def default_modulus(p: int, f: int) -> tuple[int, ...]:
    """Conway polynomial when tabulated, otherwise the lexicographically
    smallest monic irreducible polynomial of degree f."""
    if (p, f) in CONWAY:
        return CONWAY[(p, f)]
    from itertools import product
    for tail in product(range(p), repeat=f):
        g = tuple(reversed(tail)) + (1,)
        if g[0] % p and _is_irreducible_mod_p(list(g), p):
            return g
    raise ValueError(f"no irreducible polynomial found for p={p}, f={f}")


@dataclass(frozen=True)
class ArithmeticContext:
    p: int
    f: int = 1
    e: int = 1
    N: int = 8
    M: int = 16
    L_neg: int = 16
    guard: int = 4
    modulus: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.f < 1 or self.N < 1 or self.M < 1 or self.e < 0:
            raise ValueError("f, N, M must be >= 1 and e >= 0")
        if self.guard < 0 or self.L_neg < 0:
            raise ValueError("guard and L_neg must be >= 0")
        if not self.modulus:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.f))
        g = tuple(self.modulus)
        if len(g) != self.f + 1 or g[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if not _is_irreducible_mod_p([c % self.p for c in g], self.p):
            raise ValueError("modulus is not irreducible mod p")

    @property
    def K(self) -> int:
        """Storage precision N + guard."""
        return self.N + self.guard

    @property
    def q(self) -> int:
        return self.p ** self.f

    def ring(self, W: int | None = None) -> "UnramifiedRing":
        return UnramifiedRing.get(self.p, self.modulus, W if W is not None else self.K)


class UnramifiedRing:
    """O/p^W, elements are tuples of f residues."""

    _cache: dict = {}

    @classmethod
    def get(cls, p: int, modulus: Sequence[int], W: int) -> "UnramifiedRing":
        key = (p, tuple(modulus), W)
        r = cls._cache.get(key)
        if r is None:
            r = cls(p, tuple(modulus), W)
            cls._cache[key] = r
        return r

    def __init__(self, p: int, modulus: tuple[int, ...], W: int):
        if W < 1:
            raise ValueError("precision must be positive")
        self.p = p
        self.g = modulus
        self.f = len(modulus) - 1
        self.W = W
        self.mod = p ** W
        self.q = p ** self.f
        # rows: u^k reduced mod g for k < 2f-1
        self.red = self._reduction_rows(2 * self.f - 1)
        self._frob = None

    def _reduction_rows(self, n):
        f, mod = self.f, self.mod
        rows = []
        cur = [1] + [0] * (f - 1)
        for _ in range(n):
            rows.append(tuple(cur))
            # multiply by u
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(c - top * self.g[j]) % mod for j, c in enumerate(cur)]
        return rows

    # -- basic ops ---------------------------------------------------------
    def zero(self):
        return (0,) * self.f

    def one(self):
        return (1,) + (0,) * (self.f - 1)

    def const(self, c: int):
        return (c % self.mod,) + (0,) * (self.f - 1)

    def add(self, a, b):
        m = self.mod
        return tuple((x + y) % m for x, y in zip(a, b))

    def sub(self, a, b):
        m = self.mod
        return tuple((x - y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.mod
        return tuple((-x) % m for x in a)

    def scale(self, a, c: int):
        m = self.mod
        return tuple((x * c) % m for x in a)

    def mul(self, a, b):
        f, m = self.f, self.mod
        if f == 1:
            return ((a[0] * b[0]) % m,)
        raw = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    raw[i + j] += x * y
        return self.reduce_raw(raw)

    def reduce_raw(self, raw):
        f, m = self.f, self.mod
        out = [0] * f
        for k, c in enumerate(raw):
            if c:
                row = self.red[k]
                for j in range(f):
                    out[j] += c * row[j]
        return tuple(x % m for x in out)

    def power(self, a, n: int):
        res = self.one()
        base = a
        while n:
            if n & 1:
                res = self.mul(res, base)
            base = self.mul(base, base)
            n >>= 1
        return res

    def is_unit(self, a) -> bool:
        return any(x % self.p for x in a)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError("not a unit in O/p^W")
        # a^{q-2} inverts mod p, Newton lifts it
        z = self.power(a, self.q - 2)
        two = self.const(2)
        prec = 1
        while prec < self.W:
            z = self.mul(z, self.sub(two, self.mul(a, z)))
            prec *= 2
        return z

    def reduce_to(self, a, W2: int):
        m = self.p ** W2
        return tuple(x % m for x in a)

    def residue(self, a):
        return tuple(x % self.p for x in a)

    def valuation(self, a) -> int:
        return min(vp(x, self.p, self.W) for x in a)

    # -- Frobenius ----------------------------------------------------------
    def frobenius_image_of_u(self):
        """Root of g congruent to u^p mod p, Hensel lifted to precision W."""
        if self.f == 1:
            return (((-self.g[0]) % self.mod),)
        u = (0, 1) + (0,) * (self.f - 2)
        x = self.power(u, self.p)
        dg = [(k * c) for k, c in enumerate(self.g)][1:]
        for _ in range(self.W.bit_length() + 2):
            gx = self._eval(self.g, x)
            if not any(gx):
                break
            x = self.sub(x, self.mul(gx, self.inv(self._eval(dg, x))))
        return x

    def _eval(self, poly, x):
        acc = self.zero()
        for c in reversed(poly):
            acc = self.add(self.mul(acc, x), self.const(c))
        return acc

    def frob_matrix(self):
        if self._frob is None:
            psi = self.frobenius_image_of_u()
            cols = []
            cur = self.one()
            for _ in range(self.f):
                cols.append(cur)
                cur = self.mul(cur, psi)
            self._frob = cols  # cols[j] = frob(u^j)
        return self._frob

    def frobenius(self, a):
        if self.f == 1:
            return a
        cols = self.frob_matrix()
        m = self.mod
        out = [0] * self.f
        for j, x in enumerate(a):
            if x:
                col = cols[j]
                for i in range(self.f):
                    out[i] += x * col[i]
        return tuple(v % m for v in out)

    def trace(self, a) -> int:
        """tr_{O/Z_p}: the constant coefficient of the sum of conjugates."""
        acc = a
        cur = a
        for _ in range(self.f - 1):
            cur = self.frobenius(cur)
            acc = self.add(acc, cur)
        if any(acc[1:]):
            raise ArithmeticError("trace is not in Z_p; modulus inconsistent")
        return acc[0]

    def teichmuller(self, r):
        """Teichmuller lift of a residue r (tuple mod p, or an int when f=1)."""
        if isinstance(r, int):
            r = (r,) + (0,) * (self.f - 1)
        r = tuple(x % self.p for x in r)
        if not any(r):
            raise ValueError("teichmuller(0) is undefined")
        x = r
        for _ in range(self.W + 1):
            nx = self.power(x, self.q)
            if nx == x:
                return x
            x = nx
        return x


# ---------------------------------------------------------------------------
# User-facing element wrappers


class UnramifiedElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: UnramifiedRing, coeffs):
        if isinstance(coeffs, int):
            coeffs = ring.const(coeffs)
        coeffs = tuple(int(x) % ring.mod for x in coeffs)
        if len(coeffs) != ring.f:
            raise ValueError("wrong number of coefficients")
        self.ring = ring
        self.c = coeffs

    def _wrap(self, c):
        return UnramifiedElement(self.ring, c)

    def _coerce(self, o):
        if isinstance(o, UnramifiedElement):
            return o.c
        return self.ring.const(o)

    def __add__(self, o):
        return self._wrap(self.ring.add(self.c, self._coerce(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return self._wrap(self.ring.sub(self.c, self._coerce(o)))

    def __rsub__(self, o):
        return self._wrap(self.ring.sub(self._coerce(o), self.c))

    def __neg__(self):
        return self._wrap(self.ring.neg(self.c))

    def __mul__(self, o):
        return self._wrap(self.ring.mul(self.c, self._coerce(o)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self._wrap(self.ring.power(self.ring.inv(self.c), -n))
        return self._wrap(self.ring.power(self.c, n))

    def __eq__(self, o):
        if isinstance(o, (int, UnramifiedElement)):
            return self.c == self._coerce(o)
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"UnramifiedElement({list(self.c)} mod {self.ring.p}^{self.ring.W})"

    def inverse(self):
        return self._wrap(self.ring.inv(self.c))


def frobenius(x: UnramifiedElement) -> UnramifiedElement:
    return UnramifiedElement(x.ring, x.ring.frobenius(x.c))


def teichmuller(ring: UnramifiedRing, r) -> UnramifiedElement:
    return UnramifiedElement(ring, ring.teichmuller(r))


def trace_to_base(x: UnramifiedElement) -> int:
    return x.ring.trace(x.c)


class CyclotomicRing:
    """O[z]/Phi_p(z); elements are tuples of p-1 elements of O (tuples)."""

    def __init__(self, base: UnramifiedRing):
        self.base = base
        self.p = base.p
        self.d = base.p - 1

    def zero(self):
        return tuple(self.base.zero() for _ in range(self.d))

    def one(self):
        return (self.base.one(),) + tuple(self.base.zero() for _ in range(self.d - 1))

    def z_power(self, k: int):
        """z^k in the basis 1, z, ..., z^{p-2}."""
        k %= self.p
        B = self.base
        if k < self.d:
            out = [B.zero()] * self.d
            out[k] = B.one()
            return tuple(out)
        # z^{p-1} = -(1 + z + ... + z^{p-2})
        return tuple(B.neg(B.one()) for _ in range(self.d))

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        B = self.base
        raw = [B.zero()] * (2 * self.d - 1)
        for i, x in enumerate(a):
            if any(x):
                for j, y in enumerate(b):
                    if any(y):
                        raw[i + j] = B.add(raw[i + j], B.mul(x, y))
        # reduce z^k for k >= p-1 using z^p = 1 and z^{p-1} = -sum
        out = list(raw[: self.d])
        for k in range(self.d, len(raw)):
            c = raw[k]
            if not any(c):
                continue
            zk = self.z_power(k)
            for j in range(self.d):
                out[j] = B.add(out[j], B.mul(c, zk[j]))
        return tuple(out)

    def embed(self, a):
        return (a,) + tuple(self.base.zero() for _ in range(self.d - 1))

    def is_base(self, a) -> bool:
        return all(not any(x) for x in a[1:])


class CyclotomicElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: CyclotomicRing, coeffs):
        self.ring = ring
        self.c = tuple(coeffs)

    def __add__(self, o):
        return CyclotomicElement(self.ring, self.ring.add(self.c, o.c))

    def __mul__(self, o):
        return CyclotomicElement(self.ring, self.ring.mul(self.c, o.c))

    def __eq__(self, o):
        return isinstance(o, CyclotomicElement) and self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def in_base(self) -> bool:
        return self.ring.is_base(self.c)


# ---------------------------------------------------------------------------
# Linear algebra over Z/p^k


class ModMatrix:
    """Dense matrix over Z/p^k."""

    def __init__(self, rows: Sequence[Sequence[int]], p: int, k: int, ncols: int | None = None):
        self.p = p
        self.k = k
        self.mod = p ** k
        self.rows = [[int(x) % self.mod for x in r] for r in rows]
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @property
    def nrows(self):
        return len(self.rows)

    def key(self):
        return (self.p, self.k, self.ncols, tuple(tuple(r) for r in self.rows))

    def apply(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.ncols:
            raise ValueError("dimension mismatch")
        m = self.mod
        return [sum(a * b for a, b in zip(r, x)) % m for r in self.rows]


def howell_form(rows: list[list[int]], p: int, k: int, ncols: int, track: int = 0):
    """Howell form of the row span of ``rows`` over Z/p^k.

    Only the first ``ncols`` columns are used for pivoting; a further
    ``track`` columns are carried along (used to record combinations).
    Returns the list of (pivot column, pivot valuation, row).
    """
    mod = p ** k
    A = [list(r) for r in rows if any(r)]
    out = []
    r = 0
    for c in range(ncols):
        best, bv = -1, k
        for i in range(r, len(A)):
            x = A[i][c]
            if x:
                v = vp(x, p)
                if v < bv:
                    best, bv = i, v
                    if v == 0:
                        break
        if best < 0:
            continue
        A[r], A[best] = A[best], A[r]
        piv = A[r][c]
        unit = piv // p ** bv
        uinv = pow(unit, -1, mod)
        row = [(x * uinv) % mod for x in A[r]]
        A[r] = row
        pv = p ** bv
        for i in range(len(A)):
            if i == r:
                continue
            x = A[i][c]
            if not x:
                continue
            if i > r:
                qf = x // pv
            else:
                qf = x // pv
            if qf:
                Ai = A[i]
                A[i] = [(a - qf * b) % mod for a, b in zip(Ai, row)]
        if bv > 0:
            extra = [(x * p ** (k - bv)) % mod for x in row]
            if any(extra[:ncols]):
                A.append(extra)
        out.append((c, bv, row))
        r += 1
    return out


class HowellSolver:
    """Column-span membership for a fixed matrix A over Z/p^k."""

    def __init__(self, A: ModMatrix):
        self.A = A
        p, k = A.p, A.k
        n, m = A.nrows, A.ncols
        # rows of A^T, augmented with identity to remember combinations
        rows = []
        for j in range(m):
            col = [A.rows[i][j] for i in range(n)]
            rows.append(col + [1 if t == j else 0 for t in range(m)])
        self.form = howell_form(rows, p, k, n, track=m)

    def solve(self, b: Sequence[int]):
        A = self.A
        if len(b) != A.nrows:
            raise ValueError("dimension mismatch")
        p, mod, n, m = A.p, A.mod, A.nrows, A.ncols
        rem = [int(x) % mod for x in b]
        sol = [0] * m
        for c, v, row in self.form:
            x = rem[c]
            if not x:
                continue
            pv = p ** v
            if x % pv:
                return None, False
            qf = x // pv
            for t in range(n):
                if row[t]:
                    rem[t] = (rem[t] - qf * row[t]) % mod
            for t in range(m):
                if row[n + t]:
                    sol[t] = (sol[t] + qf * row[n + t]) % mod
        if any(rem):
            return None, False
        return sol, True


@lru_cache(maxsize=512)
def _solver_for(key) -> HowellSolver:
    p, k, ncols, rows = key
    return HowellSolver(ModMatrix([list(r) for r in rows], p, k, ncols))


def howell_solve(A: ModMatrix, b: Sequence[int]):
    """Return (x, member) with A x = b over Z/p^k when b is in the column span."""
    if len(b) != A.nrows:
        raise ValueError("dimension mismatch")
    return _solver_for(A.key()).solve(b)


# ---------------------------------------------------------------------------
# Determinants over commutative rings given by an operations object


class IntModOps:
    """Ring operations on plain integers modulo m = p^k."""

    def __init__(self, p: int, k: int):
        self.p = p
        self.mod = p ** k

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.mod

    def sub(self, a, b):
        return (a - b) % self.mod

    def mul(self, a, b):
        return (a * b) % self.mod

    def neg(self, a):
        return (-a) % self.mod

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        return pow(a, -1, self.mod)


def det_division_free(A: Sequence[Sequence], ops) -> object:
    """Berkowitz determinant; only ring operations are used."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("matrix is not square")
    if n == 0:
        return ops.one()
    C = [ops.one(), ops.neg(A[0][0])]
    for r in range(1, n):
        Mr = [row[:r] for row in A[:r]]
        R = A[r][:r]
        col = [A[i][r] for i in range(r)]
        a = A[r][r]
        T = [ops.one(), ops.neg(a)]
        v = col
        for _ in range(r):
            s = ops.zero()
            for x, y in zip(R, v):
                s = ops.add(s, ops.mul(x, y))
            T.append(ops.neg(s))
            nv = []
            for row in Mr:
                acc = ops.zero()
                for x, y in zip(row, v):
                    acc = ops.add(acc, ops.mul(x, y))
                nv.append(acc)
            v = nv
        newC = []
        for i in range(r + 2):
            acc = ops.zero()
            for j in range(max(0, i - r - 1), min(i, r) + 1):
                acc = ops.add(acc, ops.mul(T[i - j], C[j]))
            newC.append(acc)
        C = newC
    d = C[n]
    return d if n % 2 == 0 else ops.neg(d)


def det_elimination(A: Sequence[Sequence], ops) -> object:
    """Determinant by Gaussian elimination with unit pivots (local rings)."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("matrix is not square")
    M = [list(r) for r in A]
    det = ops.one()
    for c in range(n):
        piv = None
        key = getattr(ops, "pivot_key", None)
        if key is None:
            for i in range(c, n):
                if ops.is_unit(M[i][c]):
                    piv = i
                    break
        else:
            # smallest key first: keeps inverses small in the completed ring
            best = None
            for i in range(c, n):
                k = key(M[i][c])
                if k is not None and (best is None or k < best):
                    best, piv = k, i
                    if k <= 0:
                        break
        if piv is None:
            return _det_nonunit_column(M, c, ops, det)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = ops.neg(det)
        pinv = ops.inv(M[c][c])
        det = ops.mul(det, M[c][c])
        for i in range(c + 1, n):
            if _is_zero(M[i][c], ops):
                continue
            fct = ops.mul(M[i][c], pinv)
            M[i] = [ops.sub(x, ops.mul(fct, y)) for x, y in zip(M[i], M[c])]
    return det


def _is_zero(x, ops):
    z = getattr(ops, "is_zero", None)
    if z is not None:
        return z(x)
    return x == ops.zero()


def _det_nonunit_column(M, c, ops, det):
    # A column without unit entries below the diagonal: in a local ring the
    # determinant then lies in the maximal ideal; fall back to Berkowitz.
    sub = [row[c:] for row in M[c:]]
    return ops.mul(det, det_division_free(sub, ops))
