"""Truncated arithmetic in R = O[[T]] and in its p-adically completed
localization, modeled as Laurent series over a finite degree window.

Coefficient arrays are flat lists of integers, ``F`` entries per T-degree.
Products use Kronecker substitution: the array is packed into one Python
integer with a fixed slot width, multiplied, and unpacked.

Precision in the completed ring.  Put c = p - 1 (1 when p = 2) and give
p^j T^n the weight c*j + n.  Every value carries ``E``: the difference
between the stored Laurent polynomial and the true element has weight >= E
(modulo p^W).  The coefficient of T^n is then known to
min(W - dexp, ceil((E - n) / c)) digits.  Integral rings do not need this:
truncation mod T^M is an ideal there and E stays infinite.
"""
from __future__ import annotations

from math import comb
from typing import Sequence

import numpy as np
from gmpy2 import mpz

from .padic_core import ArithmeticContext, UnramifiedRing, vp

INF = 10**9


class PrecisionError(ArithmeticError):
    """Raised when effective precision or window capacity is exhausted."""


def weight_const(p: int) -> int:
    return max(p - 1, 1)


class CoeffAlgebra:
    """O/p^W, optionally adjoined with a primitive p-th root of unity z.

    Flat layout: index l*f + j holds the coefficient of z^l u^j.
    """

    _cache: dict = {}

    @classmethod
    def get(cls, ctx: ArithmeticContext, W: int, cyclotomic: bool = False):
        key = (ctx.p, ctx.modulus, W, cyclotomic)
        a = cls._cache.get(key)
        if a is None:
            a = cls(ctx, W, cyclotomic)
            cls._cache[key] = a
        return a

    def __init__(self, ctx: ArithmeticContext, W: int, cyclotomic: bool):
        self.ctx = ctx
        self.p = ctx.p
        self.W = W
        self.mod = ctx.p ** W
        self.base = UnramifiedRing.get(ctx.p, ctx.modulus, W)
        self.f = self.base.f
        self.cyc = cyclotomic
        self.dz = (ctx.p - 1) if cyclotomic else 1
        self.F = self.f * self.dz
        self.ru = 2 * self.f - 1
        self.rz = 2 * self.dz - 1
        self.RS = self.ru * self.rz
        self.trivial = self.F == 1
        # reduction of raw index (lz, ju) to flat entries
        red = []
        zred = self._z_rows()
        for lz in range(self.rz):
            for ju in range(self.ru):
                terms = []
                urow = self.base.red[ju]
                zrow = zred[lz]
                for l in range(self.dz):
                    if zrow[l]:
                        for j in range(self.f):
                            if urow[j]:
                                terms.append((l * self.f + j, (zrow[l] * urow[j]) % self.mod))
                red.append(terms)
        self.red = red

    def _z_rows(self):
        d = self.dz
        rows = []
        for k in range(2 * d - 1):
            if not self.cyc:
                rows.append([1])
                continue
            kk = k % self.p
            if kk < d:
                r = [0] * d
                r[kk] = 1
            else:
                r = [-1] * d
            rows.append(r)
        return rows

    def raw_index(self, flat: int) -> int:
        l, j = divmod(flat, self.f)
        return l * self.ru + j

    def one(self):
        return (1,) + (0,) * (self.F - 1)

    def mul(self, a, b):
        if self.trivial:
            return ((a[0] * b[0]) % self.mod,)
        raw = [0] * self.RS
        ri = self.raw_index
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[ri(i) + ri(j)] += x * y
        return self.reduce_raw(raw)

    def reduce_raw(self, raw):
        out = [0] * self.F
        for r, c in enumerate(raw):
            if c:
                for idx, k in self.red[r]:
                    out[idx] += c * k
        m = self.mod
        return tuple(x % m for x in out)

    def inv(self, a):
        """Inverse of an O-valued (z-free) unit."""
        if any(a[self.f:]):
            raise ArithmeticError("inverse only implemented on the base ring")
        b = self.base.inv(tuple(a[: self.f]))
        return tuple(b) + (0,) * (self.F - self.f)

    def frobenius(self, a):
        if self.cyc:
            raise ArithmeticError("Frobenius not defined on the cyclotomic layer")
        return self.base.frobenius(a)

    def valuation(self, a) -> int:
        v = INF
        for x in a:
            if x:
                v = min(v, vp(x, self.p))
        return v


class CoeffSpace:
    """Coefficient arrays on the T-degree window [lo, hi)."""

    _cache: dict = {}

    @classmethod
    def get(cls, alg: CoeffAlgebra, lo: int, hi: int, completed: bool):
        key = (id(alg), lo, hi, completed)
        s = cls._cache.get(key)
        if s is None:
            s = cls(alg, lo, hi, completed)
            cls._cache[key] = s
        return s

    def __init__(self, alg: CoeffAlgebra, lo: int, hi: int, completed: bool):
        if hi <= lo or lo > 0:
            raise ValueError("bad window")
        self.alg = alg
        self.p = alg.p
        self.c = weight_const(alg.p)
        self.lo = lo
        self.hi = hi
        self.D = hi - lo
        self.F = alg.F
        self.size = self.D * self.F
        self.completed = completed
        self.mod = alg.mod
        self.W = alg.W
        self._bytes = {}
        self._fast_setup()
        self._phi = None

    # -- constructors ------------------------------------------------------
    def zero(self):
        return [0] * self.size

    def const(self, c) -> list:
        """Constant c (int or flat coefficient tuple)."""
        a = self.zero()
        if isinstance(c, int):
            c = (c % self.mod,) + (0,) * (self.F - 1)
        if self.lo <= 0 < self.hi:
            k = -self.lo * self.F
            a[k:k + self.F] = [x % self.mod for x in c]
        return a

    def monomial(self, n: int, c=1) -> list:
        a = self.zero()
        if isinstance(c, int):
            c = (c % self.mod,) + (0,) * (self.F - 1)
        if self.lo <= n < self.hi:
            k = (n - self.lo) * self.F
            a[k:k + self.F] = [x % self.mod for x in c]
        return a

    def coeff(self, a, n: int):
        if not (self.lo <= n < self.hi):
            return (0,) * self.F
        k = (n - self.lo) * self.F
        return tuple(a[k:k + self.F])

    # -- linear ops --------------------------------------------------------
    def add(self, a, b):
        m = self.mod
        return [(x + y) % m for x, y in zip(a, b)]

    def sub(self, a, b):
        m = self.mod
        return [(x - y) % m for x, y in zip(a, b)]

    def neg(self, a):
        m = self.mod
        return [(-x) % m for x in a]

    def scale(self, a, k: int):
        m = self.mod
        return [(x * k) % m for x in a]

    def is_zero(self, a) -> bool:
        return not any(a)

    def shift_one_plus_T(self, a):
        """Multiply by (1+T); returns (array, dropped-weight)."""
        F = self.F
        m = self.mod
        out = list(a)
        for i in range(F, self.size):
            if a[i - F]:
                out[i] = (out[i] + a[i - F]) % m
        top = a[self.size - F:]
        dropped = INF
        if self.completed and any(top):
            dropped = self._weight_block(top, self.hi)
        return out, dropped

    def _weight_block(self, block, deg):
        v = self.alg.valuation(block)
        if v >= INF:
            return INF
        return self.c * v + deg

    def weight(self, a) -> int:
        """Weighted valuation min(c*v_p + degree) over nonzero coefficients."""
        F = self.F
        best = INF
        c = self.c
        p = self.p
        lo = self.lo
        for n in range(self.D):
            deg = lo + n
            if deg >= best:
                break
            for x in a[n * F:(n + 1) * F]:
                if x:
                    w = deg if x % p else c * vp(x, p) + deg
                    if w < best:
                        best = w
        return best

    def valuation_T(self, a) -> int:
        for n in range(self.D):
            if any(a[n * self.F:(n + 1) * self.F]):
                return self.lo + n
        return INF

    def p_valuation(self, a) -> int:
        v = INF
        for x in a:
            if x:
                v = min(v, vp(x, self.p))
        return v

    # -- packing -----------------------------------------------------------
    def slot_bytes(self, nterms: int) -> int:
        B = self._bytes.get(nterms)
        if B is None:
            bits = 2 * (self.mod - 1).bit_length() + (nterms * self.D * self.F * 2).bit_length() + 2
            B = (bits + 7) // 8
            if B <= 8 and self._redm is not None:
                B = 8
            self._bytes[nterms] = B
        return B

    def _fast_setup(self):
        # 64-bit slots decode through numpy when the reduction cannot overflow
        alg = self.alg
        RS = 1 if alg.trivial else alg.RS
        m = self.mod
        if m.bit_length() * 2 + RS.bit_length() + 1 >= 63:
            self._redm = None
            return
        redm = np.zeros((RS, self.F), dtype=np.int64)
        if alg.trivial:
            redm[0, 0] = 1
        else:
            for r in range(RS):
                for idx, k in alg.red[r]:
                    redm[r, idx] = (redm[r, idx] + k) % m
        self._redm = redm
        cols = np.zeros(self.F, dtype=np.int64)
        for k in range(self.F):
            cols[k] = 0 if alg.trivial else alg.raw_index(k)
        self._rawcols = cols

    def pack(self, a, B: int) -> int:
        alg = self.alg
        F = self.F
        if B == 8 and self._redm is not None:
            RS = self._redm.shape[0]
            slots = np.zeros((self.D, RS), dtype="<u8")
            slots[:, self._rawcols] = np.array(a, dtype=np.uint64).reshape(self.D, F)
            return mpz.from_bytes(slots.tobytes(), "little")
        if alg.trivial:
            if not any(a):
                return 0
            return mpz.from_bytes(b"".join(x.to_bytes(B, "little") for x in a), "little")
        RS = alg.RS
        slots = [0] * (self.D * RS)
        for k in range(F):
            slots[alg.raw_index(k)::RS] = a[k::F]
        return mpz.from_bytes(b"".join(x.to_bytes(B, "little") for x in slots), "little")

    def unpack(self, val: int, B: int, shift_lo: int, floor: int = INF):
        """Unpack a raw product whose slot 0 has degree shift_lo.

        Returns (array on the window, weight of dropped nonzero terms).
        """
        alg = self.alg
        F, RS, D = self.F, alg.RS, self.D
        nraw = (2 * D + 1) * RS
        if val == 0:
            return self.zero(), INF
        m = self.mod
        s0 = self.lo - shift_lo
        if not self.completed and s0 >= 0:
            # integral: only the window slots matter, drop everything else up front
            val = (val >> (8 * B * RS * s0)) & ((1 << (8 * B * RS * D)) - 1)
            shift_lo += s0
            nraw = D * RS
        if B == 8 and self._redm is not None:
            return self._unpack_fast(val, nraw, s0, shift_lo, floor)
        bs = val.to_bytes(nraw * B + 8, "little")
        out = [0] * self.size
        dropped = INF
        c = self.c
        # raw T-slot s has degree shift_lo + s; keep lo <= deg < hi
        s0 = self.lo - shift_lo
        total_slots = len(bs) // (B * RS)
        if alg.trivial:
            fb = int.from_bytes
            for s in range(min(total_slots, nraw)):
                x = fb(bs[s * B:(s + 1) * B], "little")
                if not x:
                    continue
                x %= m
                if not x:
                    continue
                n = s - s0
                if 0 <= n < D:
                    out[n] = x
                elif self.completed:
                    w = c * vp(x, self.p) + shift_lo + s
                    if w < dropped:
                        dropped = w
            return out, dropped
        fb = int.from_bytes
        ns = min(total_slots, nraw // RS)
        ints = [fb(bs[i * B:(i + 1) * B], "little") for i in range(ns * RS)]
        flat = [[0] * ns for _ in range(F)]
        for r in range(RS):
            col = ints[r::RS]
            if not any(col):
                continue
            for idx, k in alg.red[r]:
                tgt = flat[idx]
                flat[idx] = [t + k * v for t, v in zip(tgt, col)]
        flat = [[v % m for v in row] for row in flat]
        for s in range(ns):
            n = s - s0
            if 0 <= n < D:
                for k in range(F):
                    out[n * F + k] = flat[k][s]
            elif self.completed:
                blk = [flat[k][s] for k in range(F)]
                if any(blk):
                    w = self._weight_block(blk, shift_lo + s)
                    if w < dropped:
                        dropped = w
        return out, dropped

    def _unpack_fast(self, val, nraw, s0, shift_lo, floor=INF):
        redm = self._redm
        RS, F, D, m = redm.shape[0], self.F, self.D, self.mod
        ns = nraw // RS
        nbytes = (val.bit_length() + 7) // 8
        ns = min(ns, (nbytes + 8 * RS - 1) // (8 * RS))
        bs = val.to_bytes(ns * RS * 8, "little")
        raw = np.frombuffer(bs, dtype="<u8").reshape(ns, RS) % np.uint64(m)
        flat = (raw.astype(np.int64) @ redm) % m
        out = self.zero()
        a, b = max(s0, 0), min(s0 + D, ns)
        if a < b:
            out[(a - s0) * F:(b - s0) * F] = flat[a:b].ravel().tolist()
        dropped = INF
        if self.completed:
            keep = np.zeros(ns, dtype=bool)
            keep[:a] = True
            # rows above the window weigh at least their degree; skip those past floor
            keep[b:max(b, min(ns, floor - shift_lo))] = True
            rows = np.nonzero(keep & flat.any(axis=1))[0]
            if rows.size:
                dropped = self._np_weight(flat[rows], rows + shift_lo)
        return out, dropped

    def _np_weight(self, rows, degs):
        """min(c*v_p + degree) over the nonzero entries of an int64 block."""
        p = self.p
        x = rows.copy()
        live = x != 0
        v = np.zeros(x.shape, dtype=np.int64)
        for _ in range(self.W):
            m = live & (x % p == 0)
            if not m.any():
                break
            v[m] += 1
            x[m] //= p
        v[~live] = INF
        return int((self.c * v.min(axis=1) + degs).min())

    def mul(self, a, b, floor: int = INF):
        """Product of two arrays: (array, dropped weight).

        Dropped terms above the window of degree >= floor are not weighed.
        """
        if not any(a) or not any(b):
            return self.zero(), INF
        B = self.slot_bytes(1)
        return self.unpack(self.pack(a, B) * self.pack(b, B), B, 2 * self.lo, floor)

    def mul_scalar_coeff(self, a, cf):
        """Multiply every T-coefficient by a flat algebra element."""
        alg = self.alg
        F = self.F
        out = []
        for n in range(self.D):
            blk = a[n * F:(n + 1) * F]
            out.extend(alg.mul(blk, cf) if any(blk) else (0,) * F)
        return out

    def frob_coeffs(self, a):
        if self.alg.f == 1:
            return list(a)
        F = self.F
        out = []
        for n in range(self.D):
            out.extend(self.alg.frobenius(tuple(a[n * F:(n + 1) * F])))
        return out

    # -- phi ------------------------------------------------------------
    def phi_tables(self):
        """phi(T)^n as integer arrays for every n in the window."""
        if self._phi is not None:
            return self._phi
        p, m = self.p, self.mod
        lo, hi, D = self.lo, self.hi, self.D
        # integer Laurent polynomials as dict degree -> int
        phiT = {i: comb(p, i) for i in range(1, p + 1)}
        tables = {}
        drops = {}

        def trunc(poly):
            arr = [0] * D
            dw = INF
            for d, x in poly.items():
                x %= m
                if not x:
                    continue
                if lo <= d < hi:
                    arr[d - lo] = x
                elif self.completed:
                    dw = min(dw, self.c * vp(x, p) + d)
            return arr, dw

        def pmul(a, b, cap_hi):
            out = {}
            for i, x in a.items():
                for j, y in b.items():
                    d = i + j
                    if d < cap_hi:
                        out[d] = (out.get(d, 0) + x * y) % m
            return out

        cur = {0: 1}
        for n in range(0, hi):
            tables[n], drops[n] = trunc(cur)
            cur = pmul(cur, phiT, hi + 1)
        if lo < 0:
            # phi(T)^{-1} = T^{-p} (1 + p s)^{-1},  s = sum C(p,i)/p T^{i-p}
            s = {i - p: comb(p, i) // p for i in range(1, p)}
            inv = {0: 1}
            term = {0: 1}
            ps = {d: (-p * x) for d, x in s.items()}
            for _ in range(self.W + 1):
                term = pmul(term, ps, INF)
                term = {d: x % m for d, x in term.items() if x % m}
                if not term:
                    break
                for d, x in term.items():
                    inv[d] = (inv.get(d, 0) + x) % m
            inv = {d - p: x for d, x in inv.items()}
            cur = {0: 1}
            for n in range(1, -lo + 1):
                cur = pmul(cur, inv, INF)
                cur = {d: x for d, x in cur.items() if x and d >= lo - self.c * self.W - 2 * p}
                tables[-n], drops[-n] = trunc(cur)
        self._phi = (tables, drops)
        return self._phi

    def phi(self, a):
        """phi on an array: Frobenius on coefficients and T -> (1+T)^p - 1.

        Returns (array, dropped weight)."""
        tables, drops = self.phi_tables()
        F = self.F
        a = self.frob_coeffs(a)
        m = self.mod
        B = ((2 * (m - 1).bit_length() + self.D.bit_length() + 2) + 7) // 8
        packed = {}
        acc = [0] * F
        dropped = INF
        for n in range(self.D):
            blk = a[n * F:(n + 1) * F]
            if not any(blk):
                continue
            deg = self.lo + n
            if drops[deg] < INF:
                dropped = min(dropped, drops[deg] + self.c * self.alg.valuation(blk))
            P = packed.get(deg)
            if P is None:
                P = int.from_bytes(b"".join(x.to_bytes(B, "little") for x in tables[deg]), "little")
                packed[deg] = P
            for k, x in enumerate(blk):
                if x:
                    acc[k] += x * P
        out = [0] * self.size
        for k in range(F):
            if not acc[k]:
                continue
            bs = acc[k].to_bytes(self.D * B + 8, "little")
            for n in range(self.D):
                x = int.from_bytes(bs[n * B:(n + 1) * B], "little") % m
                if x:
                    out[n * F + k] = x
        return out, dropped

    def phi_error(self, E: int) -> int:
        """Propagate an error weight bound through phi."""
        if E >= INF:
            return INF
        slack = E - self.c * (self.W - 1)
        return E + (self.p - 1) * min(0, slack)

    def digits_at(self, E: int, n: int, cap: int) -> int:
        if E >= INF:
            return cap
        return max(0, min(cap, -((n - E) // self.c)))


# ---------------------------------------------------------------------------


def space_for(ctx: ArithmeticContext, W: int, completed: bool, cyclotomic: bool = False) -> CoeffSpace:
    """The standard window for a context at p-adic precision W."""
    alg = CoeffAlgebra.get(ctx, W, cyclotomic)
    if not completed:
        return CoeffSpace.get(alg, 0, ctx.M, False)
    c = weight_const(ctx.p)
    lo = -(ctx.p * ctx.L_neg + c * (W + 1))
    hi = ctx.M + c * (W + 2) + 2 * ctx.p + 8
    return CoeffSpace.get(alg, lo, hi, True)


class _SeriesBase:
    """Element of R (or of the completed ring): num / p^dexp."""

    __slots__ = ("space", "a", "dexp", "E")
    completed = False

    def __init__(self, space: CoeffSpace, arr, dexp: int = 0, E: int = INF):
        self.space = space
        self.a = list(arr)
        self.dexp = dexp
        self.E = E if space.completed else INF
        self._canon()

    def _canon(self):
        if self.dexp > 0:
            p = self.space.p
            while self.dexp > 0 and all(x % p == 0 for x in self.a):
                if not any(self.a):
                    self.dexp = 0
                    break
                self.a = [x // p for x in self.a]
                self.dexp -= 1
            if self.dexp >= self.space.W:
                raise PrecisionError("effective precision exhausted")

    def _new(self, arr, dexp=0, E=INF):
        return type(self)(self.space, arr, dexp, E)

    @property
    def precision(self) -> int:
        """Effective p-adic precision W - dexp."""
        return self.space.W - self.dexp

    def _align(self, o):
        if not isinstance(o, _SeriesBase):
            o = self._new(self.space.const(o))
        if o.space is not self.space:
            raise ValueError("elements live in different spaces")
        d = max(self.dexp, o.dexp)
        p = self.space.p
        a = self.a if self.dexp == d else self.space.scale(self.a, p ** (d - self.dexp))
        b = o.a if o.dexp == d else self.space.scale(o.a, p ** (d - o.dexp))
        return a, b, d, o

    def __add__(self, o):
        a, b, d, o = self._align(o)
        return self._new(self.space.add(a, b), d, min(self.E, o.E))

    __radd__ = __add__

    def __sub__(self, o):
        a, b, d, o = self._align(o)
        return self._new(self.space.sub(a, b), d, min(self.E, o.E))

    def __rsub__(self, o):
        return (-self) + o

    def __neg__(self):
        return self._new(self.space.neg(self.a), self.dexp, self.E)

    def weight(self) -> int:
        w = self.space.weight(self.a)
        return w - self.space.c * self.dexp if w < INF else INF

    def __mul__(self, o):
        if isinstance(o, int):
            return self._new(self.space.scale(self.a, o), self.dexp, self.E)
        if o.space is not self.space:
            raise ValueError("elements live in different spaces")
        sp = self.space
        d = self.dexp + o.dexp
        E = INF
        if sp.completed:
            if self.E < INF:
                E = _err_mul(self.E, o.weight())
            if o.E < INF:
                E = min(E, _err_mul(o.E, self.weight()))
        arr, dropped = sp.mul(self.a, o.a, E + sp.c * d if E < INF else INF)
        if dropped < INF:
            E = min(E, dropped - sp.c * d)
        return self._new(arr, d, E)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        res = self._new(self.space.const(1))
        base = self
        while n:
            if n & 1:
                res = res * base
            base = base * base
            n >>= 1
        return res

    def is_zero(self) -> bool:
        return not any(self.a)

    def equals(self, o, digits: int | None = None) -> bool:
        """Equality at ``digits`` p-adic digits on reliably known degrees."""
        diff = self - o
        if digits is None:
            digits = diff.precision
        if digits > diff.precision:
            raise PrecisionError("requested digits exceed effective precision")
        sp = self.space
        thr = sp.p ** (digits + diff.dexp)
        F = sp.F
        for n in range(sp.D):
            deg = sp.lo + n
            if sp.completed and sp.digits_at(diff.E, deg, digits) < digits:
                continue
            for x in diff.a[n * F:(n + 1) * F]:
                if x % thr:
                    return False
        return True

    def coefficient(self, n: int):
        return self.space.coeff(self.a, n)

    def __repr__(self):
        sp = self.space
        terms = []
        for n in range(sp.D):
            blk = self.a[n * sp.F:(n + 1) * sp.F]
            if any(blk):
                cf = blk[0] if sp.F == 1 else tuple(blk)
                terms.append(f"{cf}*T^{sp.lo + n}")
        body = " + ".join(terms) or "0"
        d = f" / p^{self.dexp}" if self.dexp else ""
        return f"{type(self).__name__}({body}{d})"


def _err_mul(E: int, w: int) -> int:
    if E >= INF or w >= INF:
        return INF
    return E + w


class PowerSeriesElement(_SeriesBase):
    """Element of O[[T]] / (p^W, T^M), possibly divided by p^dexp."""

    __slots__ = ()

    @classmethod
    def from_coeffs(cls, ctx: ArithmeticContext, coeffs: Sequence, W: int | None = None):
        sp = space_for(ctx, W or ctx.K, False)
        arr = sp.zero()
        for n, c in enumerate(coeffs):
            if n >= sp.hi:
                break
            blk = [c] + [0] * (sp.F - 1) if isinstance(c, int) else list(c)
            arr[n * sp.F:(n + 1) * sp.F] = [x % sp.mod for x in blk]
        return cls(sp, arr)

    @classmethod
    def T(cls, ctx: ArithmeticContext, W: int | None = None):
        sp = space_for(ctx, W or ctx.K, False)
        return cls(sp, sp.monomial(1))


class LaurentElement(_SeriesBase):
    """Element of the p-adically completed localization, on a Laurent window."""

    __slots__ = ()
    completed = True

    @classmethod
    def from_terms(cls, ctx: ArithmeticContext, terms: dict, W: int | None = None):
        sp = space_for(ctx, W or ctx.K, True)
        arr = sp.zero()
        for n, c in terms.items():
            if not (sp.lo <= n < sp.hi):
                raise PrecisionError("term outside the Laurent window")
            blk = [c] + [0] * (sp.F - 1) if isinstance(c, int) else list(c)
            k = (n - sp.lo) * sp.F
            arr[k:k + sp.F] = [x % sp.mod for x in blk]
        return cls(sp, arr)

    @classmethod
    def T(cls, ctx: ArithmeticContext, W: int | None = None):
        sp = space_for(ctx, W or ctx.K, True)
        return cls(sp, sp.monomial(1))


def phi_series(x: _SeriesBase) -> _SeriesBase:
    """Frobenius on coefficients together with T -> (1+T)^p - 1."""
    sp = x.space
    arr, dropped = sp.phi(x.a)
    cd = sp.c * x.dexp
    E_num = min(sp.phi_error(x.E + cd if x.E < INF else INF), dropped)
    E = E_num - cd if E_num < INF else INF
    return type(x)(sp, arr, x.dexp, E)


def residue_mod_p(x: _SeriesBase):
    return [a % x.space.p for a in x.a]


def invert_series(x: PowerSeriesElement) -> PowerSeriesElement:
    """Inverse of a power series with unit constant term (Newton)."""
    if x.dexp:
        raise ValueError("invert_series needs denom_exp = 0")
    sp = x.space
    a0 = tuple(x.a[:sp.F])
    if not any(v % sp.p for v in a0[:sp.alg.f]):
        raise ZeroDivisionError("constant coefficient is not a unit")
    z = PowerSeriesElement(sp, sp.const(sp.alg.inv(a0)))
    z = _newton(PowerSeriesElement(sp, x.a), z)
    if not (1 - x * z).is_zero():
        raise PrecisionError("Newton iteration did not converge")
    return z


def invert_laurent(x: LaurentElement) -> LaurentElement:
    """Inverse in the completed ring; x must be nonzero mod p."""
    if x.dexp:
        raise ValueError("invert_laurent needs denom_exp = 0")
    sp = x.space
    p, F = sp.p, sp.F
    red = [v % p for v in x.a]
    v = sp.valuation_T(red)
    if v >= INF:
        raise ZeroDivisionError("not a unit: element is divisible by p")
    k = (v - sp.lo) * F
    linv = sp.alg.inv(tuple(x.a[k:k + F]))
    if not (sp.lo <= -v < sp.hi):
        raise PrecisionError("valuation outside the Laurent window")
    z = LaurentElement(sp, sp.monomial(-v, linv))
    return _posterior(x, _newton(LaurentElement(sp, x.a), z))


def _newton(x, z):
    """Refine z toward x^{-1}: z <- z + z (1 - x z)."""
    sp = x.space
    prev = None
    for _ in range(2 * (sp.W + sp.D).bit_length() + 8):
        r = 1 - x * z
        if r.is_zero() or (prev is not None and r.a == prev):
            break
        prev = r.a
        z = type(z)(sp, (z + z * r).a)
    return z


def _posterior(x, z):
    """Attach an error bound to a computed inverse z of x.

    With r = 1 - x z, the true inverse is z (1 - r)^{-1}, so the error has
    weight >= w(z) + w(r), w(r) taken on the uncertain product.
    """
    sp = x.space
    if not sp.completed:
        return z
    zz = type(z)(sp, z.a, 0, INF)
    prod = x * zz
    r = prod - 1
    wr = min(r.weight(), prod.E)
    E = _err_mul(wr, zz.weight())
    return type(z)(sp, z.a, 0, E)


def divide_by_p(x: _SeriesBase, k: int) -> _SeriesBase:
    if k < 0:
        raise ValueError("k must be non-negative")
    if x.dexp + k >= x.space.W and not x.is_zero():
        # canonicalization may still rescue it
        v = x.space.p_valuation(x.a)
        if x.dexp + k - v >= x.space.W or v >= INF:
            raise PrecisionError("effective precision would drop to zero")
    E = x.E - x.space.c * k if x.E < INF else INF
    return type(x)(x.space, x.a, x.dexp + k, E)
