"""Additive maps between R[Conj(G)]^tau and tuples indexed by the cyclic
subgroups of G: t^G_P, eta_P, beta, delta, trace ideals, tr^{P1}_P, the
psi^G conditions A1-A3, ver and v, and the level-0 cokernel map omega.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .group_structures import GroupG
from .iwasawa_coeff import INF, LaurentElement, PowerSeriesElement, invert_laurent, invert_series
from .padic_core import ArithmeticContext, HowellSolver, ModMatrix, vp
from .twisted_algebra import (ConjModule, ConjModuleElement, TwistedRing, TwistedRingElement,
                              conjugate, move, phi_arrays)


def ring_for(G: GroupG, ctx: ArithmeticContext, pid: int, W: int | None = None,
             completed: bool = False, cyclotomic: bool = False) -> TwistedRing:
    return TwistedRing.get(G, ctx, W, completed, support=pid, cyclotomic=cyclotomic)


def _pid(G: GroupG, P) -> int:
    pid = P if isinstance(P, int) else P.id
    if not 0 <= pid < len(G.subgroups):
        raise ValueError(f"{pid} is not a cyclic subgroup id")
    return pid


def _on_P(x: TwistedRingElement, pid: int) -> TwistedRingElement:
    """Re-home x on the ring for the cyclic subgroup pid (same precision)."""
    R = x.ring
    return move(x, R.sibling(support=pid))


@dataclass
class AdditiveTuple:
    """One element of R[P]^tau for every P in C(G), keyed by subgroup id."""

    G: GroupG
    parts: dict = field(default_factory=dict)

    def __getitem__(self, pid):
        return self.parts[pid]

    def __add__(self, o):
        return AdditiveTuple(self.G, {k: self.parts[k] + o.parts[k] for k in self.parts})

    def __sub__(self, o):
        return AdditiveTuple(self.G, {k: self.parts[k] - o.parts[k] for k in self.parts})

    def scale(self, k: int):
        return AdditiveTuple(self.G, {i: v.scale(k) for i, v in self.parts.items()})

    def first_difference(self, o, digits=None):
        for pid in self.parts:
            d = self.parts[pid].first_difference(o.parts[pid], digits)
            if d is not None:
                return pid, d
        return None

    def equals(self, o, digits=None) -> bool:
        return self.first_difference(o, digits) is None

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.parts.values())


@dataclass(frozen=True)
class OmegaValue:
    """Element of <(-1)^{p-1}> x G^ab: a sign bit and an exponent vector."""

    sign_exp: int
    abelian_part: tuple

    @property
    def is_identity(self) -> bool:
        return self.sign_exp == 0 and not any(self.abelian_part)


# ---------------------------------------------------------------------------
# t^G_P, eta, beta, delta


def trace_to_subgroup(a: ConjModuleElement, P, reps=None) -> TwistedRingElement:
    """t^G_P: [g] -> sum over x in C(G,P) with x^{-1} g x in P of (x^{-1} g x)bar."""
    M = a.module
    G = M.G
    pid = _pid(G, P)
    R = ring_for(G, M.ctx, pid, M.W, M.completed)
    if reps is None:
        reps = G.left_coset_reps(pid)
    sp = R.sp
    coefs = [sp.zero() for _ in range(R.n)]
    for i, r in enumerate(M.reps):
        c = a.coefs[i]
        if not any(c):
            continue
        for x in reps:
            y = G.mul[G.mul[G.inv[x]][r]][x]
            k = R.pos.get(y)
            if k is not None:
                coefs[k] = sp.add(coefs[k], c)
    return TwistedRingElement(R, coefs, a.dexp, a.E)


def eta_restrict(x: TwistedRingElement, P=None) -> TwistedRingElement:
    """Keep only the coefficients on generators of P."""
    R = x.ring
    G = R.G
    pid = R.support if P is None else _pid(G, P)
    Pg = G.subgroups[pid] if pid >= 0 else None
    order = Pg.order if Pg else G.order
    coefs = [a if G.elem_order(g) == order else R.sp.zero() for g, a in zip(R.elements, x.coefs)]
    return TwistedRingElement(R, coefs, x.dexp, x.E)


def beta_P(a: ConjModuleElement, P) -> TwistedRingElement:
    return eta_restrict(trace_to_subgroup(a, P), P)


def beta(a: ConjModuleElement) -> AdditiveTuple:
    G = a.module.G
    return AdditiveTuple(G, {P.id: beta_P(a, P) for P in G.subgroups})


def delta(t: AdditiveTuple, module: ConjModule | None = None) -> ConjModuleElement:
    """sum_P (1/[G:P]) [a_P]."""
    G = t.G
    any_part = next(iter(t.parts.values()))
    R0 = any_part.ring
    M = module or ConjModule.get(G, R0.ctx, R0.W, R0.completed)
    sp = M.sp
    p = G.p
    idx = {P.id: vp(G.order // P.order, p) for P in G.subgroups}
    dtot = max(idx[pid] + t.parts[pid].dexp for pid in t.parts)
    coefs = [sp.zero() for _ in range(M.n)]
    E = INF
    for pid, x in t.parts.items():
        s = p ** (dtot - idx[pid] - x.dexp)
        for g, c in zip(x.ring.elements, x.coefs):
            if any(c):
                i = M.index_of[g]
                coefs[i] = sp.add(coefs[i], sp.scale(c, s))
        if x.E < INF:
            E = min(E, x.E - sp.c * idx[pid])
    return ConjModuleElement(M, coefs, dtot, E)


# ---------------------------------------------------------------------------
# trace ideals


def _weyl_matrix(G: GroupG, pid: int):
    """A[h][k] = #{w in W_G P reps : w k w^{-1} = h} on the elements of P."""
    els = G.subgroups[pid].elements
    pos = {g: i for i, g in enumerate(els)}
    A = [[0] * len(els) for _ in els]
    for w in G.weyl_reps(pid):
        for k in els:
            A[pos[G.conj(w, k)]][pos[k]] += 1
    return A


def weyl_trace(x: TwistedRingElement, P=None) -> TwistedRingElement:
    """tr(x) = sum_{w in W_G P} wbar x wbar^{-1}."""
    R = x.ring
    G = R.G
    pid = R.support if P is None else _pid(G, P)
    out = R.zero()
    out = TwistedRingElement(R, out.coefs, x.dexp, x.E)
    for w in G.weyl_reps(pid if pid >= 0 else _full_id(G)):
        out = out + move(conjugate(x, w), R)
    return out


def _full_id(G):
    P = G.subgroup_of(range(G.order))
    return P.id


_TI_CACHE: dict = {}


def trace_ideal_membership(x: TwistedRingElement, P=None, k: int = 0, digits: int | None = None) -> bool:
    """Is x in p^k T_{P,R}?  Solved slot by slot with a Howell form."""
    R = x.ring
    G = R.G
    pid = R.support if P is None else _pid(G, P)
    if pid < 0:
        pid = _full_id(G)
    sp = R.sp
    if digits is None:
        digits = x.precision
    K = digits + x.dexp
    key = (id(G), pid, K, k + x.dexp, sp.p)
    solver = _TI_CACHE.get(key)
    if solver is None:
        s = sp.p ** (k + x.dexp)
        A = [[s * v for v in row] for row in _weyl_matrix(G, pid)]
        solver = HowellSolver(ModMatrix(A, sp.p, K))
        _TI_CACHE[key] = solver
    mod = sp.p ** K
    els = G.subgroups[pid].elements
    slots = [R.pos[g] for g in els]
    for n in range(sp.D):
        deg = sp.lo + n
        if sp.completed and sp.digits_at(x.E, deg, digits) < digits:
            continue
        for j in range(sp.F):
            b = [x.coefs[s][n * sp.F + j] % mod for s in slots]
            if any(b):
                _, ok = solver.solve(b)
                if not ok:
                    return False
    return True


# ---------------------------------------------------------------------------
# tr^{P1}_P and the psi conditions


def one_plus_T_power(sp, e: int):
    """(1+T)^e as a series in the space sp (negative e allowed)."""
    cls = LaurentElement if sp.completed else PowerSeriesElement
    base = cls(sp, sp.monomial(0)) + cls(sp, sp.monomial(1))
    if e < 0:
        base = invert_laurent(base) if sp.completed else invert_series(base)
        e = -e
    return base ** e


def coset_matrix(x: TwistedRingElement, pid: int, within=None):
    """Matrix of right multiplication by x on the R[P]^tau-basis of right coset reps.

    Entry [i][j] is an element of R[P]^tau (at x's precision).  Uses
    cbar_i gbar = tau(c_i, g) tau(q, c_j)^{-1} qbar cbar_j with c_i g = q c_j.
    """
    R = x.ring
    G = R.G
    P = G.subgroups[pid]
    RP = R.sibling(support=pid)
    reps = G.right_coset_reps(pid, within)
    where = {}
    for j, c in enumerate(reps):
        for q in P.elements:
            where[G.mul[q][c]] = (q, j)
    n = len(reps)
    sp = R.sp
    cls = LaurentElement if sp.completed else PowerSeriesElement
    M = [[RP.zero() for _ in range(n)] for _ in range(n)]
    powers = {}
    for i, ci in enumerate(reps):
        for g, a in zip(R.elements, x.coefs):
            if not any(a):
                continue
            q, j = where[G.mul[ci][g]]
            e = G.carry[ci][g] - G.carry[q][reps[j]]
            term = RP.basis(q, cls(sp, a, x.dexp, x.E))
            if e:
                if e not in powers:
                    powers[e] = one_plus_T_power(sp, e)
                term = term * powers[e]
            M[i][j] = M[i][j] + term
    return M


def subgroup_trace(x: TwistedRingElement, P) -> TwistedRingElement:
    """tr^{P1}_P(x) for x supported on P1 > P: the trace of the coset matrix."""
    R = x.ring
    G = R.G
    pid = _pid(G, P)
    P1 = R.support if R.support >= 0 else _full_id(G)
    if pid == P1 or (pid, P1) not in set(G.inclusions):
        raise ValueError("not a proper subgroup pair")
    M = coset_matrix(x, pid, within=G.subgroups[P1].elements)
    out = M[0][0]
    for i in range(1, len(M)):
        out = out + M[i][i]
    return out


def psi_check(t: AdditiveTuple, digits: int | None = None) -> dict:
    """Check A1 (traces vanish), A2 (conjugation invariance), A3 (trace ideal)."""
    G = t.G
    wit = []
    a1 = True
    for pid, p1 in G.inclusions:
        tr = subgroup_trace(t.parts[p1], pid)
        if not tr.equals(tr.ring.zero(), _dig(tr, digits)):
            a1 = False
            wit.append({"check": "A1", "P": pid, "P1": p1})
    a2 = True
    for g in G.generators():
        for P in G.subgroups:
            y = conjugate(t.parts[P.id], g)
            tgt = t.parts[G.sub_conj[g][P.id]]
            d = y.first_difference(move(tgt, y.ring), _dig(y, digits))
            if d is not None:
                a2 = False
                wit.append({"check": "A2", "P": P.id, "g": g, "slot": d[0], "degree": d[1]})
    a3 = True
    for P in G.subgroups:
        x = t.parts[P.id]
        if not trace_ideal_membership(x, P.id, 0, _dig(x, digits)):
            a3 = False
            wit.append({"check": "A3", "P": P.id})
    return {"A1": a1, "A2": a2, "A3": a3, "witnesses": wit}


def _dig(x, digits):
    return x.precision if digits is None else min(digits, x.precision)


def random_psi_member(G: GroupG, ctx: ArithmeticContext, draw, W: int | None = None) -> AdditiveTuple:
    """A psi^G element: eta(tr_W(b)) on orbit representatives, then conjugated.

    ``draw(ring)`` must return a random element of the given ring.
    """
    parts = {}
    for orbit in G.conj_orbits:
        pid = orbit[0]
        R = ring_for(G, ctx, pid, W)
        a = eta_restrict(weyl_trace(draw(R), pid), pid)
        parts[pid] = a
        for other in orbit[1:]:
            g = next(x for x in range(G.order) if G.sub_conj[x][pid] == other)
            parts[other] = move(conjugate(a, g), ring_for(G, ctx, other, W))
    return AdditiveTuple(G, {P.id: parts[P.id] for P in G.subgroups})


def non_trace_term(G: GroupG, ctx: ArithmeticContext, pid: int, W: int | None = None):
    """A basis element gbar of R[P]^tau outside T_P, or None if T_P is everything."""
    R = ring_for(G, ctx, pid, W)
    for g in R.elements:
        e = R.basis(g)
        if not trace_ideal_membership(e, pid, 0):
            return e
    return None


# ---------------------------------------------------------------------------
# ver, v and omega


def ver_transfer(x: TwistedRingElement, P) -> TwistedRingElement:
    """ver^{P'}_P: phi on coefficients and gbar -> gbar^p = (1+T)^c (g^p)bar."""
    R = x.ring
    G = R.G
    pid = _pid(G, P)
    src = R.support if R.support >= 0 else _full_id(G)
    if (src, pid) not in G.p_power_pairs:
        raise ValueError(f"({src}, {pid}) is not a p-power pair")
    T = R.sibling(support=pid)
    sp = R.sp
    coefs = [sp.zero() for _ in range(T.n)]
    cd = sp.c * x.dexp
    E = sp.phi_error(x.E + cd) - cd if x.E < INF else INF
    for g, a in zip(R.elements, x.coefs):
        if any(a):
            c, gp = G.twisted_power(g, G.p)
            out, Ei = phi_arrays(sp, a, x.dexp, x.E, c)
            E = min(E, Ei)
            k = T.pos[gp]
            coefs[k] = sp.add(coefs[k], out)
    return TwistedRingElement(T, coefs, x.dexp, E)


def v_map(t: AdditiveTuple, P) -> TwistedRingElement:
    """p * sum of ver^{P'}_P(a_{P'}) over P' with P'^p = P, P' != P."""
    G = t.G
    pid = _pid(G, P)
    R0 = next(iter(t.parts.values())).ring
    out = R0.sibling(support=pid).zero()
    for src, dst in G.p_power_pairs:
        if dst == pid:
            out = out + ver_transfer(t.parts[src], pid)
    return out.scale(G.p)


def omega_cokernel(a: ConjModuleElement) -> OmegaValue:
    """prod_g ((-1)^{p-1} g)^{tr(a_g)} after T -> 0."""
    if a.dexp:
        raise ValueError("omega needs denom_exp = 0")
    M = a.module
    G = M.G
    sp = M.sp
    base = sp.alg.base
    f = sp.alg.f
    orders = G.ab_orders
    vec = [0] * len(orders)
    sign = 0
    k0 = -sp.lo * sp.F
    for i, r in enumerate(M.reps):
        c0 = tuple(a.coefs[i][k0:k0 + f])
        if not any(c0):
            continue
        tr = base.trace(c0)
        if G.p == 2:
            sign += tr
        for j, e in enumerate(G.ab_vector(r)):
            vec[j] += tr * e
    return OmegaValue(sign % 2 if G.p == 2 else 0, tuple(v % o for v, o in zip(vec, orders)))
