"""The multiplicative side: logarithms, the integral logarithm L on the
integral and completed rings, norm maps, alpha, u and the Phi^G conditions
M1-M3, the map script-L, and the relation with beta.

Logarithms of 1 + x, x in the radical, first raise to a p-power until the
element is 1 + p w, then sum log(1 + p w) with exact rational coefficients
p^n / n.  Both steps run at an elevated p-adic precision so that the final
division by p^k still leaves the requested number of digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpz

from .additive_maps import (AdditiveTuple, _full_id, _pid, beta, coset_matrix,
                            trace_ideal_membership, trace_to_subgroup, ver_transfer)
from .group_structures import GroupG
from .iwasawa_coeff import INF, PrecisionError
from .padic_core import det_division_free, det_elimination, vp
from .twisted_algebra import (ConjModule, ConjModuleElement, TwistedRing, TwistedRingElement, residue_order,
                              conjugate, gamma_projection, is_unit, move, phi_arrays, phi_conj,
                              residue, ring_invert, to_conj)


class IntegralityError(ArithmeticError):
    """A value that must be p-integral carries a p-denominator."""


class CyclotomicLeak(ArithmeticError):
    """A product that must have coefficients in O kept a z-component."""


# ---------------------------------------------------------------------------
# precision helpers


def _at(x: TwistedRingElement, W: int) -> TwistedRingElement:
    return move(x, x.ring.sibling(W=W))


def _radical_power_count(u: TwistedRingElement, cap: int = 64) -> int:
    """Least k with u^{p^k} = 1 mod p on reliably known degrees."""
    R = u.ring
    p = R.sp.p
    y = u
    for k in range(cap):
        d = y - R.one()
        if _mod_p_zero(d):
            return k
        y = y ** p
    raise PrecisionError("element is not 1 modulo the radical")


def _mod_p_zero(d: TwistedRingElement) -> bool:
    sp = d.sp
    p = sp.p
    if d.dexp:
        return False
    F = sp.F
    for n in range(sp.D):
        if sp.completed and sp.digits_at(d.E, sp.lo + n, 1) < 1:
            continue
        for a in d.coefs:
            if any(v % p for v in a[n * F:(n + 1) * F]):
                return False
    return True


def _log_series_p(w: TwistedRingElement) -> TwistedRingElement:
    """log(1 + p w) = sum (-1)^{n+1} (p^n / n) w^n, exact coefficients."""
    R = w.ring
    p = R.sp.p
    mod = R.sp.mod
    W = R.W
    acc = R.zero()
    term = R.one()
    for n in range(1, W + 2 * W.bit_length() + 2):
        term = term * w
        if term.is_zero() and term.E >= INF:
            break
        v = vp(n, p)
        if n - v >= W:
            continue
        c = p ** (n - v) * pow(n // p ** v, -1, mod)
        acc = acc + term.scale(c if n % 2 else -c)
    return acc


def log_one_plus(x: TwistedRingElement, extra: int = 0) -> TwistedRingElement:
    """log(1 + x) for x in the radical, returned at x's precision with a denominator.

    ``extra`` asks for that many additional digits of internal precision.
    """
    if x.dexp:
        raise ValueError("log_one_plus needs denom_exp = 0")
    R = x.ring
    u = R.one() + x
    if R.completed:
        if not _mod_p_zero(gamma_projection_elt(x)):
            raise ValueError("argument is not in the H-augmentation radical")
    elif any(residue(x)):
        raise ValueError("argument is not in the radical J_R")
    k = _radical_power_count(_at(u, 2) if not R.completed else u)
    W2 = R.W + k + 1 + extra
    y = _at(u, W2) ** (R.sp.p ** k)
    d = (y - y.ring.one()).clean()
    w = d.divide_by_p(1)
    if w.dexp:
        raise PrecisionError("p-power did not reach 1 + p w")
    out = _log_series_p(w).divide_by_p(k)
    return out


def gamma_projection_elt(x: TwistedRingElement) -> TwistedRingElement:
    """The Gamma-projection of x, as an element on the section (0, a)."""
    R = x.ring
    G = R.G
    S = R.sibling(support=G.subgroup_generated(G.index(0, 1)).id)
    proj = gamma_projection(x)
    coefs = [R.sp.zero() for _ in range(S.n)]
    for a, arr in enumerate(proj):
        coefs[S.pos[G.index(0, a)]] = arr
    return TwistedRingElement(S, coefs, x.dexp, x.E)


def exp_ideal(x: TwistedRingElement) -> TwistedRingElement:
    """exp(x) for x = p y in p J_R: sum (p^n / n!) y^n with exact coefficients.

    For odd p the coefficients vanish mod p^W after about W (p-1)/(p-2)
    terms; for p = 2 the sum runs until y^n vanishes, which the nilpotence
    of J_R modulo (p^W, T^M) guarantees.
    """
    if x.dexp:
        raise ValueError("exp_ideal needs denom_exp = 0")
    R = x.ring
    p = R.sp.p
    if R.completed:
        raise ValueError("exp_ideal is implemented on the integral ring")
    if not x.mod_p_zero():
        raise ValueError("argument is not in p J_R")
    y = x.divide_by_p(1)
    if any(residue(y)):
        raise ValueError("argument is not in p J_R")
    mod = R.sp.mod
    W = R.W
    cap = W * R.n * R.sp.D * p + 8
    acc = R.one()
    term = R.one()
    fact = 1
    for n in range(1, cap):
        term = term * y
        if term.is_zero():
            return acc
        fact *= n
        v = vp(fact, p)
        if n - v >= W:
            if p > 2 and n * (p - 2) >= W * (p - 1):
                return acc
            continue
        c = p ** (n - v) * pow(fact // p ** v, -1, mod)
        acc = acc + term.scale(c)
    raise PrecisionError("exp series did not terminate")


def _at_lower(x: TwistedRingElement, R: TwistedRing) -> TwistedRingElement:
    if x.dexp:
        raise IntegralityError("value is not p-integral")
    return move(x, R)


def log_unit(x: TwistedRingElement, extra: int = 0) -> TwistedRingElement:
    """(1/(q-1)) log(x^{q-1}) on the integral ring."""
    if not is_unit(x):
        raise ZeroDivisionError("not a unit")
    R = x.ring
    q = R.ctx.q
    y = x ** (q - 1)
    out = log_one_plus(y - R.one(), extra)
    return out.scale(pow(q - 1, -1, out.sp.mod))


def _L_from_log(lg: TwistedRingElement) -> ConjModuleElement:
    a = to_conj(lg)
    return a - phi_conj(a).divide_by_p(1)


def integral_log_L(x: TwistedRingElement, strict: bool = True) -> ConjModuleElement:
    """L(x) = log x - (phi/p) log x in R[Conj(G)]^tau at x's precision.

    With ``strict`` a remaining p-denominator raises IntegralityError.
    """
    R = x.ring
    L = _L_from_log(log_unit(x, extra=1))
    return _finish(L, ConjModule.get(R.G, R.ctx, R.W, R.completed), strict)


def _finish(L: ConjModuleElement, M: ConjModule, strict: bool) -> ConjModuleElement:
    L = L.clean()
    if L.dexp:
        if strict:
            raise IntegralityError(f"L(x) has denominator p^{L.dexp}")
        return L
    return L.to_module(M)


# ---------------------------------------------------------------------------
# the completed ring


@dataclass
class HatSplitting:
    u: TwistedRingElement
    y: TwistedRingElement


def split_unit_hat(x: TwistedRingElement) -> HatSplitting:
    """x = u y with y on the Gamma-section and u in 1 + ker(H-augmentation)."""
    R = x.ring
    if not R.completed:
        raise ValueError("split_unit_hat works on the completed ring")
    if not is_unit(x):
        raise ZeroDivisionError("image in the Gamma-ring is not a unit")
    yS = gamma_projection_elt(x)
    y = move(yS, R)
    u = x * ring_invert(y)
    return HatSplitting(u, y)


def _gamma_phi(y: TwistedRingElement) -> TwistedRingElement:
    """phi on the commutative Gamma-section ring: gbar -> gbar^p with phi on R."""
    S = y.ring
    G = S.G
    sp = S.sp
    coefs = [sp.zero() for _ in range(S.n)]
    cd = sp.c * y.dexp
    E = sp.phi_error(y.E + cd) - cd if y.E < INF else INF
    for g, a in zip(S.elements, y.coefs):
        if any(a):
            c, gp = G.twisted_power(g, G.p)
            out, Ei = phi_arrays(sp, a, y.dexp, y.E, c)
            E = min(E, Ei)
            k = S.pos[gp]
            coefs[k] = sp.add(coefs[k], out)
    return TwistedRingElement(S, coefs, y.dexp, E)


def log_gamma_quotient(y: TwistedRingElement) -> TwistedRingElement:
    """(1/p) log(y^p / phi(y)) for a unit y of the Gamma-section ring."""
    S = y.ring
    W2 = S.W + 2
    y2 = _at(y, W2)
    q = y2 ** S.sp.p * ring_invert(_gamma_phi(y2))
    d = (q - q.ring.one()).clean()
    w = d.divide_by_p(1)
    if w.dexp:
        raise PrecisionError("y^p / phi(y) is not 1 mod p")
    return _log_series_p(w).divide_by_p(1)


def integral_log_hat(x: TwistedRingElement, strict: bool = True) -> ConjModuleElement:
    """L on the completed ring: L(u) + (1/p) log(y^p / phi(y))."""
    R = x.ring
    sp_ = split_unit_hat(x)
    lu = log_one_plus(sp_.u - R.one(), extra=1)
    Lu = _L_from_log(lu)
    ly = log_gamma_quotient(move(sp_.y, R.sibling(support=R.G.subgroup_generated(R.G.index(0, 1)).id)))
    ly = move(ly, R.sibling(W=ly.ring.W))
    Ly = to_conj(ly)
    W = min(Lu.module.W, Ly.module.W)
    M = ConjModule.get(R.G, R.ctx, W, True)
    total = _lower_module(Lu, M) + _lower_module(Ly, M)
    return _finish(total, ConjModule.get(R.G, R.ctx, R.W, True), strict)


def _lower_module(a: ConjModuleElement, M: ConjModule) -> ConjModuleElement:
    return a.to_module(M)


# ---------------------------------------------------------------------------
# norms


class _RingOps:
    """Ring operations on elements of a commutative R[P]^tau, for determinants."""

    def __init__(self, R: TwistedRing):
        self.R = R

    def zero(self):
        return self.R.zero()

    def one(self):
        return self.R.one()

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_unit(self, a):
        return is_unit(a)

    def inv(self, a):
        return ring_invert(a)

    def is_zero(self, a):
        return a.is_zero()

    def pivot_key(self, a):
        if not self.R.completed:
            return 0 if is_unit(a) else None
        k = residue_order(a)
        return None if k >= INF else k


class _PackedRows:
    """Row arithmetic for matrices over a commutative R[P]^tau.

    A whole matrix row is packed into one integer per group element, so a
    ring element times a row costs |P|^2 big products and |P| decodes.
    """

    def __init__(self, S: TwistedRing):
        sp = S.sp
        self.S, self.sp = S, sp
        self.B = sp.slot_bytes(S.n)
        self.RS = sp._redm.shape[0]
        self.stride = 2 * sp.D + 2
        self.shift = 8 * self.B * self.RS

    @staticmethod
    def usable(S: TwistedRing) -> bool:
        sp = S.sp
        return sp._redm is not None and sp.slot_bytes(S.n) == 8

    def block(self, A):
        S, sp = self.S, self.sp
        n = len(A)
        M = np.zeros((n, n, S.n, sp.D, sp.F), dtype=np.int64)
        for i, row in enumerate(A):
            for j, e in enumerate(row):
                M[i, j] = np.array(e.coefs, dtype=np.int64).reshape(S.n, sp.D, sp.F)
        return M

    def element(self, blk, E):
        S = self.S
        return TwistedRingElement(S, blk.reshape(S.n, -1).tolist(), 0, E)

    def pack_scalar(self, blk):
        sp = self.sp
        return [sp.pack(c.ravel().tolist(), self.B) if c.any() else 0 for c in blk]

    def pack_row(self, row):
        sp = self.sp
        out = []
        for h in range(self.S.n):
            comp = row[:, h]
            if not comp.any():
                out.append(0)
                continue
            slots = np.zeros((row.shape[0], self.stride, self.RS), dtype="<u8")
            slots[:, :sp.D, sp._rawcols] = comp
            out.append(mpz.from_bytes(slots.tobytes(), "little"))
        return out

    def times_row(self, sP, rP, ncols, floor=INF):
        """(scalar * row) on the window, and the least weight of dropped terms."""
        S, sp = self.S, self.sp
        acc = [0] * S.n
        for g, pg in enumerate(sP):
            if not pg:
                continue
            trow = S.table[g]
            for h, ph in enumerate(rP):
                if ph:
                    k, c = trow[h]
                    pr = pg * ph
                    if c:
                        pr += pr << self.shift
                    acc[k] += pr
        D, F, m = sp.D, sp.F, sp.mod
        out = np.zeros((ncols, S.n, D, F), dtype=np.int64)
        dropped = INF
        s0 = -sp.lo
        nbytes = ncols * self.stride * self.RS * 8
        for k, v in enumerate(acc):
            if not v:
                continue
            raw = np.frombuffer(v.to_bytes(nbytes, "little"), dtype="<u8")
            raw = raw.reshape(ncols, self.stride, self.RS) % np.uint64(m)
            flat = (raw.astype(np.int64) @ sp._redm) % m
            out[:, k] = flat[:, s0:s0 + D]
            if sp.completed:
                # below the window always counts; above it only degrees < floor
                top = s0 + D + max(0, min(self.stride, floor - 2 * sp.lo) - s0 - D)
                flat[:, s0:s0 + D] = 0
                flat[:, top:] = 0
                hit = np.nonzero(flat.any(axis=2))
                if hit[0].size:
                    w = sp._np_weight(flat[hit], hit[1] + 2 * sp.lo)
                    dropped = min(dropped, w)
        return out, dropped

    def min_weight(self, blk):
        sp = self.sp
        rows = blk.reshape(-1, sp.D, sp.F)
        hit = np.nonzero(rows.any(axis=2))
        if not hit[0].size:
            return INF
        return sp._np_weight(rows[hit], hit[1] + sp.lo)


def _det_packed(A, ops: _RingOps) -> TwistedRingElement:
    """Fraction-free elimination: row_i <- piv*row_i - a*row_c, one inversion at the end."""
    S = ops.R
    pk = _PackedRows(S)
    n = len(A)
    E = min(e.E for row in A for e in row)
    M = pk.block(A)
    m = S.sp.mod
    sign = 1
    num = S.one()
    den = S.one()
    for c in range(n):
        best = piv = None
        for i in range(c, n):
            k = ops.pivot_key(pk.element(M[i, c], E))
            if k is not None and (best is None or k < best):
                best, piv = k, i
                if k <= 0:
                    break
        if piv is None:
            rest = [[pk.element(M[i, j], E) for j in range(c, n)] for i in range(c, n)]
            num = num * det_division_free(rest, ops)
            break
        if piv != c:
            M[[c, piv]] = M[[piv, c]]
            sign = -sign
        pe = pk.element(M[c, c], E)
        num = num * pe
        if c == n - 1:
            break
        if E < INF:
            w = pk.min_weight(M[c:, c:])
            if w < INF:
                E = min(E, E + w)
        ncols = n - c - 1
        pP = pk.pack_scalar(M[c, c])
        rc = pk.pack_row(M[c, c + 1:])
        count = 0
        for i in range(c + 1, n):
            a = M[i, c]
            if not a.any():
                continue
            t1, d1 = pk.times_row(pP, pk.pack_row(M[i, c + 1:]), ncols, E)
            t2, d2 = pk.times_row(pk.pack_scalar(a), rc, ncols, E)
            M[i, c + 1:] = (t1 - t2) % m
            M[i, c] = 0
            E = min(E, d1, d2)
            count += 1
        if count:
            den = den * pe ** count
    out = num * ring_invert(den)
    return -out if sign < 0 else out


def norm_theta(x: TwistedRingElement, P, method: str = "elimination") -> TwistedRingElement:
    """theta^G_P(x) (or nr^{P1}_P when x lives on P1): det of right multiplication."""
    R = x.ring
    G = R.G
    pid = _pid(G, P)
    within = None if R.support < 0 else G.subgroups[R.support].elements
    if R.support < 0 and pid == _full_id_or_none(G):
        return x
    if R.support == pid:
        return x
    A = coset_matrix(x, pid, within)
    ops = _RingOps(R.sibling(support=pid))
    if method == "berkowitz":
        return det_division_free(A, ops)
    if method == "elimination" and _PackedRows.usable(ops.R) and all(e.dexp == 0 for r in A for e in r):
        return _det_packed(A, ops)
    return det_elimination(A, ops)  # "pivot", or when packing is unavailable


def _full_id_or_none(G):
    P = G.subgroup_of(range(G.order))
    return None if P is None else P.id


def nr(x: TwistedRingElement, P) -> TwistedRingElement:
    return norm_theta(x, P)


@dataclass
class MultiplicativeTuple:
    """One unit of R[P]^tau per cyclic subgroup P, keyed by subgroup id."""

    G: GroupG
    parts: dict = field(default_factory=dict)

    def __getitem__(self, pid):
        return self.parts[pid]


def theta(x: TwistedRingElement) -> MultiplicativeTuple:
    G = x.ring.G
    return MultiplicativeTuple(G, {P.id: norm_theta(x, P) for P in G.subgroups})


# ---------------------------------------------------------------------------
# alpha, u, Phi^G


def _z_power_flat(alg, m: int):
    """z^m in the flat cyclotomic coefficient layout."""
    p, f, dz = alg.p, alg.f, alg.dz
    m %= p
    out = [0] * alg.F
    if m < dz:
        out[m * f] = 1
    else:
        for l in range(dz):
            out[l * f] = alg.mod - 1
    return tuple(out)


def _to_cyclotomic(x: TwistedRingElement) -> TwistedRingElement:
    R = x.ring
    C = R.sibling(cyclotomic=True)
    sa, sb = R.sp, C.sp
    if (sa.lo, sa.hi) != (sb.lo, sb.hi):
        raise ValueError("windows differ")
    f, Fb = sa.F, sb.F
    coefs = []
    for a in x.coefs:
        arr = [0] * sb.size
        for n in range(sa.D):
            arr[n * Fb:n * Fb + f] = a[n * f:(n + 1) * f]
        coefs.append(arr)
    return TwistedRingElement(C, coefs, x.dexp, x.E)


def _from_cyclotomic(x: TwistedRingElement) -> TwistedRingElement:
    C = x.ring
    R = C.sibling(cyclotomic=False)
    sa, sb = C.sp, R.sp
    f, Fa = sb.F, sa.F
    coefs = []
    for a in x.coefs:
        arr = [0] * sb.size
        for n in range(sa.D):
            blk = a[n * Fa:(n + 1) * Fa]
            if any(blk[f:]):
                if sa.completed and sa.digits_at(x.E, sa.lo + n, 1) < 1:
                    continue
                raise CyclotomicLeak("product of character twists kept a z-component")
            arr[n * f:(n + 1) * f] = blk[:f]
        coefs.append(arr)
    return TwistedRingElement(R, coefs, x.dexp, x.E)


def character_twist(x: TwistedRingElement, k: int, gen: int | None = None) -> TwistedRingElement:
    """omega^k(x): the coefficient of (gen^j)bar is multiplied by z^{jk}.

    x must live on a cyclotomic ring supported on a cyclic P != 1.
    """
    C = x.ring
    G = C.G
    pid = C.support if C.support >= 0 else _full_id(G)
    P = G.subgroups[pid]
    gen = P.generator if gen is None else gen
    log = {}
    cur = 0
    for j in range(P.order):
        log[cur] = j
        cur = G.mul[cur][gen]
    sp = C.sp
    coefs = []
    for g, a in zip(C.elements, x.coefs):
        m = (log[g] * k) % G.p
        coefs.append(a if m == 0 or not any(a) else sp.mul_scalar_coeff(a, _z_power_flat(sp.alg, m)))
    return TwistedRingElement(C, coefs, x.dexp, x.E)


def alpha(x: TwistedRingElement, P=None, gen: int | None = None) -> TwistedRingElement:
    """alpha_P(x) = x^p / prod_k omega^k(x); alpha_1(x) = x^p / phi(x)."""
    R = x.ring
    G = R.G
    pid = R.support if P is None else _pid(G, P)
    p = G.p
    order = G.subgroups[pid].order if pid >= 0 else G.order
    if order == 1:
        return x ** p * ring_invert(_phi_one(x))
    xc = _to_cyclotomic(x)
    N = xc
    for k in range(1, p):
        N = N * character_twist(xc, k, gen)
    N = _from_cyclotomic(N)
    return x ** p * ring_invert(N)


def _phi_one(x: TwistedRingElement) -> TwistedRingElement:
    R = x.ring
    sp = R.sp
    arr, E = phi_arrays(sp, x.coefs[0], x.dexp, x.E, 0)
    return TwistedRingElement(R, [arr], x.dexp, E)


def alpha_tuple(t: MultiplicativeTuple) -> MultiplicativeTuple:
    return MultiplicativeTuple(t.G, {pid: alpha(v, pid) for pid, v in t.parts.items()})


def u_map(t: MultiplicativeTuple, P) -> TwistedRingElement:
    """prod of ver^{P'}_P(x_{P'}) over P'^p = P, P' != P; empty product 1."""
    G = t.G
    pid = _pid(G, P)
    R0 = next(iter(t.parts.values())).ring
    out = R0.sibling(support=pid).one()
    for src, dst in G.p_power_pairs:
        if dst == pid:
            out = out * ver_transfer(t.parts[src], pid)
    return out


def phi_check(t: MultiplicativeTuple, digits: int | None = None) -> dict:
    """M1 (norm compatibility), M2 (conjugation), M3 (alpha congruence mod p T_P)."""
    G = t.G
    wit = []
    m1 = True
    for pid, p1 in G.inclusions:
        lhs = norm_theta(t.parts[p1], pid)
        rhs = t.parts[pid]
        d = lhs.first_difference(move(rhs, lhs.ring), _dig(lhs, rhs, digits))
        if d is not None:
            m1 = False
            wit.append({"check": "M1", "P": pid, "P1": p1, "slot": d[0], "degree": d[1]})
    m2 = True
    for g in G.generators():
        for P in G.subgroups:
            y = conjugate(t.parts[P.id], g)
            tgt = move(t.parts[G.sub_conj[g][P.id]], y.ring)
            d = y.first_difference(tgt, _dig(y, tgt, digits))
            if d is not None:
                m2 = False
                wit.append({"check": "M2", "P": P.id, "g": g, "slot": d[0], "degree": d[1]})
    m3 = True
    al = alpha_tuple(t)
    for P in G.subgroups:
        diff = al.parts[P.id] - move(u_map(al, P.id), al.parts[P.id].ring)
        if not trace_ideal_membership(diff, P.id, 1, _dig(diff, diff, digits)):
            m3 = False
            wit.append({"check": "M3", "P": P.id})
    return {"M1": m1, "M2": m2, "M3": m3, "witnesses": wit}


def _dig(a, b, digits):
    d = min(a.precision, b.precision)
    return d if digits is None else min(d, digits)


def script_L(t: MultiplicativeTuple, strict: bool = True) -> AdditiveTuple:
    """L_P = (1/p) log(alpha_P(x_P) / u_P(alpha(x)))."""
    G = t.G
    al = alpha_tuple(t)
    parts = {}
    for P in G.subgroups:
        a = al.parts[P.id]
        q = a * ring_invert(move(u_map(al, P.id), a.ring))
        R = q.ring
        q2 = _at(q, R.W + 2)
        w = (q2 - q2.ring.one()).clean().divide_by_p(1)
        if w.dexp:
            raise ValueError(f"M3 fails at subgroup {P.id}: quotient is not 1 mod p")
        val = _log_series_p(w).divide_by_p(1).clean()
        if val.dexp and strict:
            raise IntegralityError(f"script-L component {P.id} is not integral")
        parts[P.id] = val if val.dexp else move(val, R)
    return AdditiveTuple(G, parts)


def relation_check(x: TwistedRingElement, digits: int | None = None) -> dict:
    """Compare beta_P(L(x)) with script-L(theta(x))_P for every P."""
    R = x.ring
    G = R.G
    if digits is None:
        digits = R.ctx.N - vp(G.order, G.p) - 1
    if R.completed:
        Lx = integral_log_hat(x)
    else:
        Lx = integral_log_L(x)
    lhs = beta(Lx)
    rhs = script_L(theta(x))
    mism = []
    for P in G.subgroups:
        a = lhs.parts[P.id]
        b = move(rhs.parts[P.id], a.ring)
        d = a.first_difference(b, digits)
        if d is not None:
            mism.append({"P": P.id, "slot": d[0], "degree": d[1]})
    return {"ok": not mism, "digits": digits, "mismatches": mism}


def log_theta_trace_check(x: TwistedRingElement, P, digits: int | None = None) -> bool:
    """log(theta_P(x)) = t^G_P(log x) on classes (integral ring)."""
    lt = log_unit(norm_theta(x, P))
    rhs = trace_to_subgroup(to_conj(log_unit(x)), P)
    rhs = move(rhs, rhs.ring.sibling(W=lt.ring.W)) if rhs.ring.W != lt.ring.W else rhs
    return lt.equals(rhs, digits)
