"""The twisted group ring R[G]^tau over R = O[[T]] (or its completion) and
the class module R[Conj(G)]^tau.

An element stores one coefficient array per element of its support
subgroup.  Products multiply Kronecker-packed coefficient integers; the
cocycle tau(g, h) = (1+T)^carry with carry in {0, 1} becomes a one-slot
shift of the packed product.
"""
from __future__ import annotations

from math import comb

from .group_structures import GroupG
from .iwasawa_coeff import (INF, LaurentElement, PowerSeriesElement, PrecisionError,
                            _err_mul, invert_laurent, space_for)
from .padic_core import ArithmeticContext, HowellSolver, ModMatrix


class TwistedRing:
    """R[P]^tau for a subgroup P of G (P = G by default) at p-adic precision W."""

    _cache: dict = {}

    @classmethod
    def get(cls, G: GroupG, ctx: ArithmeticContext, W: int | None = None, completed: bool = False,
            support: int | None = None, cyclotomic: bool = False) -> "TwistedRing":
        W = W or ctx.K
        if support is None or (support >= 0 and G.subgroups[support].order == G.order):
            support = -1
        key = (id(G), ctx, W, completed, support, cyclotomic)
        r = cls._cache.get(key)
        if r is None:
            r = cls(G, ctx, W, completed, support, cyclotomic)
            cls._cache[key] = r
        return r

    def __init__(self, G, ctx, W, completed, support, cyclotomic):
        if ctx.p != G.p:
            raise ValueError("context and group use different primes")
        self.G = G
        self.ctx = ctx
        self.W = W
        self.completed = completed
        self.cyclotomic = cyclotomic
        self.support = support
        # support = -1 means all of G (G itself need not be cyclic)
        self.elements = tuple(range(G.order)) if support < 0 else G.subgroups[support].elements
        self.pos = {g: i for i, g in enumerate(self.elements)}
        self.n = len(self.elements)
        self.sp = space_for(ctx, W, completed, cyclotomic)
        els, pos = self.elements, self.pos
        self.table = [[(pos[G.mul[g][h]], G.carry[g][h]) for h in els] for g in els]
        self.series_cls = LaurentElement if completed else PowerSeriesElement
        self._comm = {}

    @property
    def is_full(self) -> bool:
        return self.n == self.G.order

    @property
    def is_cyclic(self) -> bool:
        return self.support >= 0 or self.G.subgroup_of(range(self.G.order)) is not None

    def sibling(self, W=None, completed=None, support=None, cyclotomic=None) -> "TwistedRing":
        return TwistedRing.get(self.G, self.ctx, W or self.W,
                               self.completed if completed is None else completed,
                               self.support if support is None else support,
                               self.cyclotomic if cyclotomic is None else cyclotomic)

    # -- constructors ------------------------------------------------------
    def zero(self) -> "TwistedRingElement":
        return TwistedRingElement(self, [self.sp.zero() for _ in range(self.n)])

    def one(self) -> "TwistedRingElement":
        return self.basis(0)

    def basis(self, g: int, c=1) -> "TwistedRingElement":
        """c * gbar, with c an int, a flat coefficient tuple or a series."""
        if g not in self.pos:
            raise ValueError(f"group element {g} is outside the support")
        coefs = [self.sp.zero() for _ in range(self.n)]
        dexp, E = 0, INF
        if hasattr(c, "space"):
            if c.space is not self.sp:
                raise ValueError("series lives in a different space")
            coefs[self.pos[g]] = list(c.a)
            dexp, E = c.dexp, c.E
        else:
            coefs[self.pos[g]] = self.sp.const(c)
        return TwistedRingElement(self, coefs, dexp, E)

    def scalar(self, c) -> "TwistedRingElement":
        return self.basis(0, c)

    def from_dict(self, d: dict) -> "TwistedRingElement":
        """{group element: coefficient sequence (integral) or {degree: coeff}}."""
        coefs = [self.sp.zero() for _ in range(self.n)]
        sp = self.sp
        for g, cf in d.items():
            arr = sp.zero()
            items = cf.items() if isinstance(cf, dict) else enumerate(cf)
            for deg, c in items:
                if sp.lo <= deg < sp.hi:
                    blk = [c] + [0] * (sp.F - 1) if isinstance(c, int) else list(c)
                    k = (deg - sp.lo) * sp.F
                    arr[k:k + sp.F] = [v % sp.mod for v in blk]
            coefs[self.pos[g]] = arr
        return TwistedRingElement(self, coefs)

    # -- products ------------------------------------------------------------
    def _packed(self, X, B):
        sp = self.sp
        return [sp.pack(x, B) if any(x) else 0 for x in X]

    def _mul(self, X, Y, PX=None, PY=None, floor=INF):
        sp = self.sp
        alg = sp.alg
        B = sp.slot_bytes(self.n)
        shift = 8 * B * alg.RS
        if PX is None:
            PX = self._packed(X, B)
        if PY is None:
            PY = self._packed(Y, B)
        acc = [0] * self.n
        tab = self.table
        for i, px in enumerate(PX):
            if not px:
                continue
            row = tab[i]
            for j, py in enumerate(PY):
                if py:
                    k, c = row[j]
                    pr = px * py
                    if c:
                        pr += pr << shift
                    acc[k] += pr
        out = []
        dropped = INF
        for v in acc:
            arr, d = sp.unpack(v, B, 2 * sp.lo, floor)
            out.append(arr)
            dropped = min(dropped, d)
        return out, dropped

    def section_gamma(self):
        """Positions of the Gamma-section elements (0, a) within the support."""
        G = self.G
        return [self.pos[G.index(0, a)] for a in range(G.pe) if G.index(0, a) in self.pos]


class _Elt:
    """Shared storage: coefficient arrays, p-denominator and error weight."""

    __slots__ = ("coefs", "dexp", "E")

    @property
    def sp(self):
        raise NotImplementedError

    def _canon(self):
        sp = self.sp
        if self.dexp > 0:
            p = sp.p
            while self.dexp > 0 and all(x % p == 0 for a in self.coefs for x in a):
                if not any(any(a) for a in self.coefs):
                    self.dexp = 0
                    break
                self.coefs = [[x // p for x in a] for a in self.coefs]
                self.dexp -= 1
            if self.dexp >= sp.W:
                raise PrecisionError("effective precision exhausted")
        if not sp.completed:
            self.E = INF

    @property
    def precision(self) -> int:
        return self.sp.W - self.dexp

    def is_zero(self) -> bool:
        return not any(any(a) for a in self.coefs)

    def weight(self) -> int:
        sp = self.sp
        w = min((sp.weight(a) for a in self.coefs), default=INF)
        return w - sp.c * self.dexp if w < INF else INF

    def p_valuation(self) -> int:
        v = min((self.sp.p_valuation(a) for a in self.coefs), default=INF)
        return v - self.dexp if v < INF else INF

    def _aligned(self, o):
        sp = self.sp
        d = max(self.dexp, o.dexp)
        p = sp.p
        a = self.coefs if self.dexp == d else [sp.scale(x, p ** (d - self.dexp)) for x in self.coefs]
        b = o.coefs if o.dexp == d else [sp.scale(x, p ** (d - o.dexp)) for x in o.coefs]
        return a, b, d

    def _check(self, o):
        if type(o) is not type(self) or o._home is not self._home:
            raise ValueError("operands live in different rings or modules")

    def __add__(self, o):
        self._check(o)
        a, b, d = self._aligned(o)
        sp = self.sp
        return self._make([sp.add(x, y) for x, y in zip(a, b)], d, min(self.E, o.E))

    def __sub__(self, o):
        self._check(o)
        a, b, d = self._aligned(o)
        sp = self.sp
        return self._make([sp.sub(x, y) for x, y in zip(a, b)], d, min(self.E, o.E))

    def __neg__(self):
        return self._make([self.sp.neg(x) for x in self.coefs], self.dexp, self.E)

    def scale(self, k: int):
        return self._make([self.sp.scale(x, k) for x in self.coefs], self.dexp, self.E)

    def times_series(self, s):
        """Multiply every coefficient by a central series s."""
        sp = self.sp
        if s.space is not sp:
            raise ValueError("series lives in a different space")
        out = []
        dropped = INF
        for a in self.coefs:
            arr, d = sp.mul(a, s.a)
            out.append(arr)
            dropped = min(dropped, d)
        E = min(_err_mul(self.E, s.weight()), _err_mul(s.E, self.weight()),
                dropped - sp.c * (self.dexp + s.dexp) if dropped < INF else INF)
        return self._make(out, self.dexp + s.dexp, E)

    def divide_by_p(self, k: int = 1):
        if k < 0:
            raise ValueError("k must be non-negative")
        E = self.E - self.sp.c * k if self.E < INF else INF
        return self._make(self.coefs, self.dexp + k, E)

    def with_E(self, E: int):
        return self._make(self.coefs, self.dexp, E)

    def clean(self):
        """Zero the digits below the error weight (completed rings only)."""
        sp = self.sp
        if not sp.completed or self.E >= INF:
            return self
        F, p = sp.F, sp.p
        c, E, d = sp.c, self.E, self.dexp
        # numerator digits known at degree n: ceil((E - n) / c) + dexp, clamped to [0, W]
        mods = [p ** max(0, min(sp.W, -((sp.lo + n - E) // c) + d)) for n in range(sp.D)]
        out = []
        for a in self.coefs:
            b = list(a)
            if any(b):
                for n, m in enumerate(mods):
                    k = n * F
                    b[k:k + F] = [x % m for x in b[k:k + F]]
            out.append(b)
        return self._make(out, self.dexp, self.E)

    def mod_p_zero(self) -> bool:
        """True when the numerator vanishes mod p (and dexp = 0)."""
        p = self.sp.p
        return self.dexp == 0 and all(x % p == 0 for a in self.coefs for x in a)

    def reliable_digits(self, deg: int, cap: int) -> int:
        return self.sp.digits_at(self.E, deg, cap) if self.sp.completed else cap

    def first_difference(self, o, digits: int | None = None):
        """None when equal at ``digits`` digits, else (slot, degree, delta)."""
        diff = self - o
        if digits is None:
            digits = diff.precision
        if digits > diff.precision:
            raise PrecisionError(f"asked for {digits} digits, only {diff.precision} available")
        sp = self.sp
        thr = sp.p ** (digits + diff.dexp)
        F = sp.F
        p = sp.p
        for n in range(sp.D):
            deg = sp.lo + n
            t = thr
            if sp.completed:
                # compare each degree at the digits that are actually known there
                k = sp.digits_at(diff.E, deg, digits)
                if k == 0:
                    continue
                t = p ** (k + diff.dexp)
            for slot, a in enumerate(diff.coefs):
                blk = a[n * F:(n + 1) * F]
                if any(x % t for x in blk):
                    return slot, deg, [x % t for x in blk]
        return None

    def equals(self, o, digits: int | None = None) -> bool:
        return self.first_difference(o, digits) is None

    def coefficient_series(self, slot: int):
        sp = self.sp
        cls = LaurentElement if sp.completed else PowerSeriesElement
        return cls(sp, self.coefs[slot], self.dexp, self.E)


class TwistedRingElement(_Elt):
    __slots__ = ("ring", "_pk", "_w")

    def __init__(self, ring: TwistedRing, coefs, dexp: int = 0, E: int = INF):
        self.ring = ring
        self.coefs = [list(a) for a in coefs]
        self.dexp = dexp
        self.E = E
        self._canon()

    @property
    def sp(self):
        return self.ring.sp

    @property
    def _home(self):
        return self.ring

    def _make(self, coefs, dexp, E):
        return TwistedRingElement(self.ring, coefs, dexp, E)

    def weight(self) -> int:
        w = getattr(self, "_w", None)
        if w is None or w[0] is not self.coefs or w[1] != self.dexp:
            w = (self.coefs, self.dexp, _Elt.weight(self))
            self._w = w
        return w[2]

    def _pack(self):
        # coefficient lists are never mutated in place, so the packing is cached
        pk = getattr(self, "_pk", None)
        if pk is None or pk[0] is not self.coefs:
            R = self.ring
            pk = (self.coefs, R._packed(self.coefs, R.sp.slot_bytes(R.n)))
            self._pk = pk
        return pk[1]

    def coeff(self, g: int):
        i = self.ring.pos.get(g)
        return self.sp.zero() if i is None else self.coefs[i]

    def series(self, g: int):
        i = self.ring.pos[g]
        return self.coefficient_series(i)

    def __mul__(self, o):
        if isinstance(o, int):
            return self.scale(o)
        if isinstance(o, (PowerSeriesElement, LaurentElement)):
            return self.times_series(o)
        if not isinstance(o, TwistedRingElement):
            return NotImplemented
        x, y = self, o
        if x.ring is not y.ring:
            x, y = _common(x, y)
        R = x.ring
        if not R.completed:
            coefs, _ = R._mul(x.coefs, y.coefs, x._pack(), y._pack())
            return TwistedRingElement(R, coefs, x.dexp + y.dexp)
        c = R.sp.c
        d = x.dexp + y.dexp
        E = _err_mul(x.E, y.weight()) if x.E < INF else INF
        if y.E < INF:
            E = min(E, _err_mul(y.E, x.weight()))
        coefs, dropped = R._mul(x.coefs, y.coefs, x._pack(), y._pack(),
                                E + c * d if E < INF else INF)
        if dropped < INF:
            E = min(E, dropped - c * d)
        return TwistedRingElement(R, coefs, d, E)

    def __rmul__(self, o):
        if isinstance(o, int):
            return self.scale(o)
        if isinstance(o, (PowerSeriesElement, LaurentElement)):
            return self.times_series(o)
        return NotImplemented

    def __add__(self, o):
        if isinstance(o, TwistedRingElement) and o.ring is not self.ring:
            a, b = _common(self, o)
            return a + b
        return _Elt.__add__(self, o)

    def __sub__(self, o):
        if isinstance(o, TwistedRingElement) and o.ring is not self.ring:
            a, b = _common(self, o)
            return a - b
        return _Elt.__sub__(self, o)

    def __pow__(self, n: int):
        if n < 0:
            return ring_invert(self) ** (-n)
        res = self.ring.one()
        base = self
        while n:
            if n & 1:
                res = res * base
            n >>= 1
            if n:
                base = base * base
        return res

    def residue(self):
        return residue(self)

    def is_unit(self) -> bool:
        return is_unit(self)

    def inverse(self):
        return ring_invert(self)

    def to_ring(self, R: TwistedRing) -> "TwistedRingElement":
        """Move to another ring: change of precision, window, or support."""
        return move(self, R)

    def support_elements(self):
        return [g for g, a in zip(self.ring.elements, self.coefs) if any(a)]

    def __repr__(self):
        parts = []
        for g, a in zip(self.ring.elements, self.coefs):
            if any(a):
                parts.append(f"g{g}:{self.coefficient_series(self.ring.pos[g])!r}")
        return "TwistedRingElement(" + ", ".join(parts) + ")"


class ConjModule:
    """R[Conj(G)]^tau at precision W: one coefficient per conjugacy class."""

    _cache: dict = {}

    @classmethod
    def get(cls, G: GroupG, ctx: ArithmeticContext, W: int | None = None, completed: bool = False):
        W = W or ctx.K
        key = (id(G), ctx, W, completed)
        m = cls._cache.get(key)
        if m is None:
            m = cls(G, ctx, W, completed)
            cls._cache[key] = m
        return m

    def __init__(self, G, ctx, W, completed):
        self.G = G
        self.ctx = ctx
        self.W = W
        self.completed = completed
        self.sp = space_for(ctx, W, completed)
        self.reps = tuple(G.class_reps)
        self.n = len(self.reps)
        rep_pos = {r: i for i, r in enumerate(self.reps)}
        self.index_of = [rep_pos[G.class_reps[G.class_of[g]]] for g in range(G.order)]
        # class index of g^p and its cocycle exponent (constant on classes)
        self.power_map = [G.twisted_power(r, G.p) for r in self.reps]

    def zero(self) -> "ConjModuleElement":
        return ConjModuleElement(self, [self.sp.zero() for _ in range(self.n)])

    def basis(self, g: int, c=1) -> "ConjModuleElement":
        coefs = [self.sp.zero() for _ in range(self.n)]
        coefs[self.index_of[g]] = self.sp.const(c)
        return ConjModuleElement(self, coefs)

    def sibling(self, W=None, completed=None) -> "ConjModule":
        return ConjModule.get(self.G, self.ctx, W or self.W, self.completed if completed is None else completed)

    def ring(self) -> TwistedRing:
        return TwistedRing.get(self.G, self.ctx, self.W, self.completed)


class ConjModuleElement(_Elt):
    __slots__ = ("module",)

    def __init__(self, module: ConjModule, coefs, dexp: int = 0, E: int = INF):
        self.module = module
        self.coefs = [list(a) for a in coefs]
        self.dexp = dexp
        self.E = E
        self._canon()

    @property
    def sp(self):
        return self.module.sp

    @property
    def _home(self):
        return self.module

    def _make(self, coefs, dexp, E):
        return ConjModuleElement(self.module, coefs, dexp, E)

    def coeff(self, g: int):
        return self.coefs[self.module.index_of[g]]

    def __mul__(self, o):
        if isinstance(o, int):
            return self.scale(o)
        if isinstance(o, (PowerSeriesElement, LaurentElement)):
            return self.times_series(o)
        return NotImplemented

    __rmul__ = __mul__

    def to_module(self, M: ConjModule) -> "ConjModuleElement":
        coefs, dropped = _rewindow(self.coefs, self.sp, M.sp)
        E = _moved_E(self, M.sp, dropped)
        return ConjModuleElement(M, coefs, self.dexp, E)

    def __repr__(self):
        parts = [f"[g{r}]:{self.coefficient_series(i)!r}" for i, r in enumerate(self.module.reps) if any(self.coefs[i])]
        return "ConjModuleElement(" + ", ".join(parts) + ")"


# ---------------------------------------------------------------------------
# moving between rings


def _rewindow(coefs, sa, sb):
    """Re-express arrays from space sa on space sb (degree window and modulus)."""
    if sa is sb:
        return [list(a) for a in coefs], INF
    if sa.F != sb.F:
        raise ValueError("coefficient algebras differ")
    F = sa.F
    m = sb.mod
    out = []
    dropped = INF
    for a in coefs:
        arr = sb.zero()
        for n in range(sa.D):
            blk = a[n * F:(n + 1) * F]
            if not any(blk):
                continue
            deg = sa.lo + n
            if sb.lo <= deg < sb.hi:
                k = (deg - sb.lo) * F
                arr[k:k + F] = [x % m for x in blk]
            elif sb.completed:
                dropped = min(dropped, sb._weight_block([x % m for x in blk], deg))
        out.append(arr)
    return out, dropped


def _moved_E(x, sb, dropped):
    sa = x.sp
    c = sb.c
    E = x.E
    if sb.completed and not sa.completed:
        # integral data is known modulo T^M
        E = x.sp.hi - c * x.dexp
    elif sb.completed and sb.W > sa.W and E < INF:
        # digits beyond the old modulus are unknown
        E = min(E, c * sa.W + min(x.weight(), 0))
    if dropped < INF:
        E = min(E, dropped - c * x.dexp)
    return E


def move(x: TwistedRingElement, R: TwistedRing) -> TwistedRingElement:
    if x.ring is R:
        return x
    if R.G is not x.ring.G:
        raise ValueError("different groups")
    if R.completed is False and x.ring.completed:
        raise ValueError("cannot move a completed element to the integral ring")
    coefs, dropped = _rewindow(x.coefs, x.sp, R.sp)
    out = [R.sp.zero() for _ in range(R.n)]
    for g, a in zip(x.ring.elements, coefs):
        if any(a):
            if g not in R.pos:
                raise ValueError(f"element {g} is not in the target support")
            out[R.pos[g]] = a
    if x.dexp >= R.W:
        raise PrecisionError("effective precision exhausted")
    return TwistedRingElement(R, out, x.dexp, _moved_E(x, R.sp, dropped))


def _common(x, y):
    a, b = x.ring, y.ring
    if a.G is not b.G or a.W != b.W or a.completed != b.completed or a.cyclotomic != b.cyclotomic:
        raise ValueError("mixed ring tags or precisions")
    if set(x.support_elements()) <= set(b.elements):
        return move(x, b), y
    if set(y.support_elements()) <= set(a.elements):
        return x, move(y, a)
    full = a.sibling(support=-1)
    return move(x, full), move(y, full)


# ---------------------------------------------------------------------------
# the operations


def cocycle_tau(G: GroupG, g1: int, g2: int) -> int:
    """Exponent c with tau(g1, g2) = (1+T)^c."""
    return G.carry[g1][g2]


def ring_mul(x: TwistedRingElement, y: TwistedRingElement) -> TwistedRingElement:
    if x.ring.completed != y.ring.completed:
        raise ValueError("mixed ring tags")
    return x * y


def residue(x: TwistedRingElement):
    """Image in F_q under T -> 0, g -> 1, reduction mod p."""
    if x.dexp:
        raise ValueError("residue needs denom_exp = 0")
    sp = x.sp
    if not (sp.lo <= 0 < sp.hi):
        return (0,) * sp.alg.f
    k = -sp.lo * sp.F
    f = sp.alg.f
    acc = [0] * f
    for a in x.coefs:
        for j in range(f):
            acc[j] += a[k + j]
    return tuple(v % sp.p for v in acc)


def gamma_projection(x: TwistedRingElement):
    """H-augmentation: list of p^e coefficient arrays, indexed by a."""
    G = x.ring.G
    sp = x.sp
    out = [sp.zero() for _ in range(G.pe)]
    for g, a in zip(x.ring.elements, x.coefs):
        if any(a):
            k = G.a_of(g)
            out[k] = sp.add(out[k], a)
    return out


def is_unit(x: TwistedRingElement) -> bool:
    if x.dexp:
        return False
    if not x.ring.completed:
        return any(residue(x))
    p = x.sp.p
    return any(v % p for a in gamma_projection(x) for v in a)


def residue_order(x: TwistedRingElement) -> int:
    """Order in T' = gbar - 1 of the Gamma-residue of x (INF for non-units).

    Mod p we have T = T'^{p^e}, so the lowest T-degree present decides it.
    """
    if x.dexp:
        return INF
    G = x.ring.G
    sp = x.sp
    p, F, pe = sp.p, sp.F, G.pe
    lows = {}
    for a, arr in enumerate(gamma_projection(x)):
        for n in range(sp.D):
            blk = [v % p for v in arr[n * F:(n + 1) * F]]
            if any(blk):
                lows[a] = (n, blk)
                break
    if not lows:
        return INF
    v = min(n for n, _ in lows.values())
    lead = [(a, blk) for a, (n, blk) in lows.items() if n == v]
    for j in range(pe):
        tot = [sum(comb(a, j) * b[k] for a, b in lead) % p for k in range(F)]
        if any(tot):
            return pe * (sp.lo + v) + j
    return INF


def _plain(x: TwistedRingElement) -> TwistedRingElement:
    return TwistedRingElement(x.ring, x.coefs, x.dexp, INF)


def _newton(x, z, cap):
    R = x.ring
    one = R.one()
    prev = None
    for _ in range(cap):
        r = one - x * z
        if r.is_zero() or (prev is not None and r.coefs == prev):
            break
        prev = r.coefs
        z = _plain(z + z * r)
    return z


def ring_invert(x: TwistedRingElement) -> TwistedRingElement:
    """Two-sided inverse of a unit (Newton iteration from a residue seed)."""
    if x.dexp:
        raise ValueError("ring_invert needs denom_exp = 0")
    if not is_unit(x):
        raise ZeroDivisionError("not a unit")
    R = x.ring
    sp = R.sp
    cap = 2 * (R.W + sp.D + R.n).bit_length() + 12
    if not R.completed:
        base = sp.alg.base
        zeta = base.teichmuller(residue(x))
        seed = R.scalar(tuple(base.inv(zeta)) + (0,) * (sp.F - sp.alg.f))
        z = _newton(_plain(x), seed, cap)
        if not (R.one() - x * z).is_zero():
            raise PrecisionError("Newton iteration did not converge")
        return z
    if R.is_cyclic:
        z = _solve_invert(_plain(x))
    else:
        z = _newton(_plain(x), _gamma_inverse(x), cap)
    return _posterior(x, z)


def _posterior(x, z):
    R = x.ring
    prod = x * z
    r = prod - R.one()
    wr = min(r.weight(), prod.E)
    return z.with_E(_err_mul(wr, z.weight()))


def _gamma_inverse(x: TwistedRingElement) -> TwistedRingElement:
    """Inverse of the Gamma-projection of x, placed on the section (0, a)."""
    R = x.ring
    G = R.G
    S = R.sibling(support=G.subgroup_generated(G.index(0, 1)).id)
    y = gamma_projection(x)
    coefs = [R.sp.zero() for _ in range(S.n)]
    for a, arr in enumerate(y):
        coefs[S.pos[G.index(0, a)]] = arr
    return move(_solve_invert(TwistedRingElement(S, coefs)), R)


def _solve_invert(x: TwistedRingElement) -> TwistedRingElement:
    """Inverse in a commutative completed ring R[P]^tau by a linear solve over R."""
    R = x.ring
    sp = R.sp
    L = LaurentElement
    cs = [L(sp, a) for a in x.coefs]
    one_T = L(sp, sp.monomial(0)) + L(sp, sp.monomial(1))
    zero = L(sp, sp.zero())
    # column j: x * jbar, row k = position of g*j
    M = [[zero] * R.n for _ in range(R.n)]
    for i in range(R.n):
        if cs[i].is_zero():
            continue
        for j in range(R.n):
            k, c = R.table[i][j]
            M[k][j] = M[k][j] + (cs[i] * one_T if c else cs[i])
    rhs = [zero] * R.n
    rhs[R.pos[0]] = L(sp, sp.monomial(0))
    sol = _solve_laurent(M, rhs)
    return TwistedRingElement(R, [v.a for v in sol])


def _solve_laurent(M, rhs):
    """Gauss-Jordan over the completed ring, pivots nonzero mod p."""
    n = len(M)
    A = [list(r) + [b] for r, b in zip(M, rhs)]
    p = A[0][0].space.p
    for c in range(n):
        piv = None
        for i in range(c, n):
            if any(v % p for v in A[i][c].a):
                piv = i
                break
        if piv is None:
            raise ZeroDivisionError("matrix is not invertible")
        A[c], A[piv] = A[piv], A[c]
        inv = invert_laurent(type(A[c][c])(A[c][c].space, A[c][c].a))
        A[c] = [v * inv for v in A[c]]
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [u - f * v for u, v in zip(A[i], A[c])]
    return [A[i][n] for i in range(n)]


# -- class module -------------------------------------------------------------


def to_conj(x: TwistedRingElement, module: ConjModule | None = None) -> ConjModuleElement:
    """Sum coefficients over conjugacy classes."""
    R = x.ring
    M = module or ConjModule.get(R.G, R.ctx, R.W, R.completed)
    sp = R.sp
    if M.sp is not sp:
        raise ValueError("module precision differs from the ring")
    coefs = [sp.zero() for _ in range(M.n)]
    for g, a in zip(R.elements, x.coefs):
        if any(a):
            i = M.index_of[g]
            coefs[i] = sp.add(coefs[i], a)
    return ConjModuleElement(M, coefs, x.dexp, x.E)


def from_conj(a: ConjModuleElement, R: TwistedRing | None = None) -> TwistedRingElement:
    """The section sum c_[g] [g] -> sum c_[g] rep(g)bar."""
    M = a.module
    R = R or M.ring()
    coefs = [R.sp.zero() for _ in range(R.n)]
    for i, r in enumerate(M.reps):
        coefs[R.pos[r]] = a.coefs[i]
    return TwistedRingElement(R, coefs, a.dexp, a.E)


def twisted_power_class(G: GroupG, g: int, k: int):
    """(c, g^k) with gbar^k = (1+T)^c (g^k)bar."""
    if k < 1:
        raise ValueError("k must be positive")
    return G.twisted_power(g, k)


def phi_arrays(sp, arr, dexp, E, carry: int):
    """phi on one coefficient array followed by (1+T)^carry.

    Returns (array, E)."""
    out, dropped = sp.phi(arr)
    c = sp.c
    cd = c * dexp
    E_num = min(sp.phi_error(E + cd if E < INF else INF), dropped)
    for _ in range(carry):
        out, d2 = sp.shift_one_plus_T(out)
        E_num = min(E_num, d2)
    return out, (E_num - cd if E_num < INF else INF)


def phi_conj(a: ConjModuleElement) -> ConjModuleElement:
    """[gbar] -> [gbar^p] with phi on the coefficients."""
    M = a.module
    sp = M.sp
    coefs = [sp.zero() for _ in range(M.n)]
    cd = sp.c * a.dexp
    E = sp.phi_error(a.E + cd) - cd if a.E < INF else INF
    for i, arr in enumerate(a.coefs):
        if not any(arr):
            continue
        c, gp = M.power_map[i]
        out, Ei = phi_arrays(sp, arr, a.dexp, a.E, c)
        E = min(E, Ei)
        j = M.index_of[gp]
        coefs[j] = sp.add(coefs[j], out)
    return ConjModuleElement(M, coefs, a.dexp, E)


def conjugate(x: TwistedRingElement, g: int) -> TwistedRingElement:
    """gbar x gbar^{-1}; conjugation permutes the basis without scalars."""
    R = x.ring
    G = R.G
    if R.support < 0:
        target = R
    else:
        target = R.sibling(support=G.sub_conj[g][R.support])
    coefs = [target.sp.zero() for _ in range(target.n)]
    for k, a in zip(R.elements, x.coefs):
        if any(a):
            coefs[target.pos[G.conj(g, k)]] = a
    return TwistedRingElement(target, coefs, x.dexp, x.E)


# -- commutator submodules -------------------------------------------------------

IDEALS = ("full", "J", "pJ")


def _commutator_solver(R: TwistedRing, ideal: str, k: int) -> HowellSolver:
    key = (ideal, k)
    s = R._comm.get(key)
    if s is None:
        G = R.G
        els = R.elements
        pos = R.pos
        scale = R.sp.p if ideal == "pJ" else 1
        cols = []
        seen = set()
        for kk in els:
            for g in els:
                j = G.conj(G.inv[g], kk)
                if j == kk:
                    continue
                key2 = (min(kk, j), max(kk, j))
                if key2 in seen:
                    continue
                seen.add(key2)
                col = [0] * R.n
                col[pos[kk]] += scale
                col[pos[j]] -= scale
                cols.append(col)
        if not cols:
            cols = [[0] * R.n]
        rows = [[cols[c][i] for c in range(len(cols))] for i in range(R.n)]
        s = HowellSolver(ModMatrix(rows, R.sp.p, k))
        R._comm[key] = s
    return s


def commutator_membership(x: TwistedRingElement, ideal: str = "full", digits: int | None = None) -> bool:
    """Is x in [A, I] for I = A, J_R or p J_R, tested at ``digits`` digits?

    Uses the spanning set {kbar - (g^{-1} k g)bar} of [A, A] = [A, J_R]; the
    module is block diagonal across (T-degree, O-coordinate) slots.
    """
    if ideal not in IDEALS:
        raise ValueError(f"unsupported ideal {ideal!r}; expected one of {IDEALS}")
    R = x.ring
    sp = R.sp
    if digits is None:
        digits = x.precision
    k = digits + x.dexp
    if k > sp.W:
        raise PrecisionError("requested digits exceed effective precision")
    solver = _commutator_solver(R, ideal, k)
    mod = sp.p ** k
    for n in range(sp.D):
        deg = sp.lo + n
        if sp.completed and sp.digits_at(x.E, deg, digits) < digits:
            continue
        for j in range(sp.F):
            b = [a[n * sp.F + j] % mod for a in x.coefs]
            if any(b):
                _, ok = solver.solve(b)
                if not ok:
                    return False
    return True


def commutator_membership_naive(x: TwistedRingElement, ideal: str = "full") -> bool:
    """Oracle: span of all r v - v r over R-basis elements r = c T^i gbar.

    Only usable on tiny rings; it enumerates products explicitly.
    """
    R = x.ring
    sp = R.sp
    gens = []
    basis = []
    for g in R.elements:
        for deg in range(max(sp.lo, 0), sp.hi):
            for j in range(sp.F):
                cf = [0] * sp.F
                cf[j] = 1
                coefs = [sp.zero() for _ in range(R.n)]
                k = (deg - sp.lo) * sp.F
                coefs[R.pos[g]][k:k + sp.F] = cf
                basis.append(TwistedRingElement(R, coefs))
    gel = [R.basis(g) for g in R.elements]
    for r in basis:
        for v in gel:
            d = r * v - v * r
            if ideal == "pJ":
                d = d.scale(sp.p)
            gens.append(d)
    cols = [[c for a in d.coefs for c in a] for d in gens]
    nrows = R.n * sp.size
    A = ModMatrix([[col[i] for col in cols] for i in range(nrows)], sp.p, sp.W)
    _, ok = HowellSolver(A).solve([c for a in x.coefs for c in a])
    return ok
