"""Seeded sampling, verification suites and JSON reports."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

from .additive_maps import (AdditiveTuple, beta, delta, non_trace_term, omega_cokernel, psi_check,
                            random_psi_member, trace_to_subgroup)
from .group_structures import GroupG, build_group
from .iwasawa_coeff import PrecisionError
from .k1_maps import (CyclotomicLeak, IntegralityError, MultiplicativeTuple, _gamma_phi, alpha_tuple,
                      exp_ideal, gamma_projection_elt, integral_log_hat, integral_log_L, log_one_plus,
                      phi_check, relation_check, script_L, split_unit_hat, theta, u_map)
from .padic_core import ArithmeticContext, IntModOps, det_division_free, det_elimination
from .twisted_algebra import (ConjModule, ConjModuleElement, TwistedRing, TwistedRingElement,
                              commutator_membership, is_unit, move, residue, ring_mul,
                              twisted_power_class)

SUITES = ("additive-iso", "log-exp", "integral-log", "relation", "theta-congruences",
          "hat-ring", "omega-exactness", "oracle-crosschecks")


class ConfigError(ValueError):
    """Invalid run configuration or suite name."""


@dataclass
class RunConfig:
    group: str | dict
    p: int | None = None
    e: int | None = None
    f: int = 1
    N: int = 8
    M: int = 16
    L_neg: int = 16
    guard: int = 4
    suites: list = field(default_factory=lambda: list(SUITES))
    trials: int = 100
    seed: int = 42
    # trials that also run completed-ring theta and L-hat; None means all of them
    hat_trials: int | None = None

    def __post_init__(self):
        self._G = None

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.hat_trials is not None and self.hat_trials < 0:
            raise ConfigError("hat_trials must be >= 0")
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
        G = self.build()
        # file groups carry their own p and e
        for k in ("p", "e"):
            given = getattr(self, k)
            if given is not None and given != getattr(G, k):
                raise ConfigError(f"{k}={given} does not match the group ({k}={getattr(G, k)})")
            setattr(self, k, getattr(G, k))
        try:
            self.context()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def context(self) -> ArithmeticContext:
        return ArithmeticContext(p=self.p, f=self.f, e=self.e, N=self.N, M=self.M,
                                 L_neg=self.L_neg, guard=self.guard)

    def build(self) -> GroupG:
        if self._G is None:
            try:
                self._G = build_group(self.group, self.p, self.e or 1, self.f)
            except (ValueError, KeyError, OSError) as exc:
                raise ConfigError(str(exc)) from exc
        return self._G

    def as_dict(self) -> dict:
        group = self.group if isinstance(self.group, str) else self.build().name
        return {"group": group, "p": self.p, "e": self.e, "f": self.f, "N": self.N, "M": self.M,
                "L_neg": self.L_neg, "guard": self.guard, "seed": self.seed,
                "hat_trials": self.hat_trials}


@dataclass
class CheckReport:
    suite: str
    config: dict
    trials: int
    passes: int = 0
    failures: list = field(default_factory=list)
    precision_effective: int | None = None
    ms: int = 0
    internal_error: bool = False

    @property
    def failed_trials(self) -> int:
        return len({f["trial"] for f in self.failures})

    @property
    def ok(self) -> bool:
        return self.passes == self.trials and not self.internal_error

    def as_dict(self) -> dict:
        return {"suite": self.suite, "config": self.config, "trials": self.trials, "passes": self.passes,
                "failures": self.failures, "precision_effective": self.precision_effective, "ms": self.ms}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def write(self, path):
        Path(path).write_text(self.to_json() + "\n")


# ---------------------------------------------------------------------------
# sampling


def trial_rng(seed: int, suite: str, trial: int) -> random.Random:
    """Independent stream per (seed, suite, trial), so trial order never matters."""
    return random.Random(f"{seed}/{suite}/{trial}")


def _random_coefs(rng, R, bound, degrees):
    sp = R.sp
    out = []
    for _ in range(R.n):
        arr = sp.zero()
        for n in degrees:
            k = (n - sp.lo) * sp.F
            arr[k:k + sp.F] = [rng.randrange(bound) for _ in range(sp.F)]
        out.append(arr)
    return out


def sample_J(rng, R: TwistedRing, scale: int = 1) -> TwistedRingElement:
    """scale * (random element of J_R); coefficients uniform mod p^N in degrees < M."""
    sp = R.sp
    ctx = R.ctx
    coefs = _random_coefs(rng, R, sp.p ** min(ctx.N, sp.W), range(ctx.M))
    r = residue(TwistedRingElement(R, coefs))
    k = -sp.lo * sp.F
    one = R.pos[0]
    for j in range(sp.alg.f):
        coefs[one][k + j] = (coefs[one][k + j] - r[j]) % sp.mod
    return TwistedRingElement(R, coefs).scale(scale)


def sample_teichmuller(rng, R: TwistedRing):
    base = R.sp.alg.base
    while True:
        r = tuple(rng.randrange(R.sp.p) for _ in range(base.f))
        if any(r):
            return base.teichmuller(r)


def sample_unit(rng, R: TwistedRing) -> TwistedRingElement:
    """Teichmuller scalar times (1 + random element of J_R).

    On the completed ring the integral sample gets a genuinely Laurent tail
    sum_{j=1,2} sum_{0<n<=c*j} p^j r T^{-n} on every group element; the tail
    keeps the error weight non-negative.
    """
    if R.completed:
        x = move(sample_unit(rng, R.sibling(completed=False)), R)
        sp = R.sp
        tail = {}
        for g in R.elements:
            tail[g] = {-n: tuple(sp.p ** j * rng.randrange(sp.mod) % sp.mod for _ in range(sp.F))
                       for j in (1, 2) for n in range(sp.c * (j - 1) + 1, sp.c * j + 1)}
        return x + R.from_dict(tail)
    t = sample_teichmuller(rng, R)
    return R.scalar(t) * (R.one() + sample_J(rng, R))


def sample_laurent_unit(rng, R: TwistedRing, top: int = 4) -> TwistedRingElement:
    """Unit of the completed ring with uniform coefficients in degrees [-L_neg, top)."""
    while True:
        x = TwistedRingElement(R, _random_coefs(rng, R, R.sp.mod, range(-R.ctx.L_neg, top)))
        if is_unit(x):
            return x


def sample_module(rng, M: ConjModule) -> ConjModuleElement:
    sp = M.sp
    return ConjModuleElement(M, [[rng.randrange(sp.mod) for _ in range(sp.size)] for _ in range(M.n)])


def _ring_drawer(rng):
    def draw(R):
        sp = R.sp
        return TwistedRingElement(R, [[rng.randrange(sp.mod) for _ in range(sp.size)] for _ in range(R.n)])
    return draw


# ---------------------------------------------------------------------------
# trial bookkeeping


class _Trial:
    def __init__(self, index: int, N: int = 8, heavy: bool = True):
        self.index = index
        self.N = N
        self.heavy = heavy
        self.fails = []
        self.digits = None

    def used(self, d):
        if d is not None:
            self.digits = d if self.digits is None else min(self.digits, d)

    def check(self, name: str, ok: bool, witness=None):
        if not ok:
            self.fails.append({"trial": self.index, "check": name, "witness": _jsonable(witness)})


def _jsonable(w):
    if w is None or isinstance(w, (bool, int, float, str)):
        return w
    if isinstance(w, dict):
        return {str(k): _jsonable(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [_jsonable(v) for v in w]
    return str(w)


def _diff(x, d):
    """Witness for a first_difference result: group element or class rep, degree, delta."""
    if d is None:
        return None
    slot, deg, delta = d
    home = x.ring.elements if hasattr(x, "ring") else x.module.reps
    return {"element": home[slot], "degree": deg, "delta": [int(v) for v in delta]}


def _compare(tr, name, x, y):
    # guard digits absorb division by subgroup indices; compare at N
    digits = min(tr.N, (x - y).precision)
    d = x.first_difference(y, digits)
    tr.used(digits)
    tr.check(name, d is None, _diff(x, d))


def _report(tr, rep, keys, tag=""):
    for k in keys:
        tr.check(tag + k, rep[k], [w for w in rep["witnesses"] if w["check"] == k])


# ---------------------------------------------------------------------------
# suites


def _suite_additive(G, ctx, rng, tr):
    a = sample_module(rng, ConjModule.get(G, ctx))
    b = beta(a)
    _compare(tr, "delta_beta", delta(b), a)
    _report(tr, psi_check(b), ("A1", "A2", "A3"))
    m = random_psi_member(G, ctx, _ring_drawer(rng))
    d = beta(delta(m)).first_difference(m, tr.N)
    tr.check("beta_delta", d is None, None if d is None else {"P": d[0], **_diff(m.parts[d[0]], d[1])})
    # adding a term outside the trace ideal must be caught
    pids = [P.id for P in G.subgroups]
    rng.shuffle(pids)
    for pid in pids:
        e = non_trace_term(G, ctx, pid)
        if e is None:
            continue
        parts = dict(b.parts)
        parts[pid] = parts[pid] + move(e, parts[pid].ring)
        r = psi_check(AdditiveTuple(G, parts))
        tr.check("mutation_caught", not (r["A1"] and r["A2"] and r["A3"]), {"P": pid})
        break


def _suite_log_exp(G, ctx, rng, tr):
    R = TwistedRing.get(G, ctx)
    one = R.one()
    x = sample_J(rng, R, ctx.p)
    y = sample_J(rng, R, ctx.p)
    lx = log_one_plus(x)
    if lx.dexp:
        tr.check("log_integral", False, {"denom_exp": lx.dexp})
        return
    _compare(tr, "exp_log", exp_ideal(move(lx, R)), one + x)
    d = log_one_plus((one + x) * (one + y) - one) - lx - log_one_plus(y)
    if d.dexp:
        tr.check("log_additive", False, {"denom_exp": d.dexp})
    else:
        tr.check("log_additive", commutator_membership(move(d, R), "pJ"))


def _suite_integral_log(G, ctx, rng, tr):
    R = TwistedRing.get(G, ctx)
    L = integral_log_L(sample_unit(rng, R))
    tr.check("L_integral", L.dexp == 0, {"denom_exp": L.dexp})
    tr.used(L.precision)
    om = omega_cokernel(L)
    tr.check("omega_identity", om.is_identity, {"sign_exp": om.sign_exp, "abelian": list(om.abelian_part)})
    if G.is_abelian():
        g = rng.randrange(G.order)
        Lg = integral_log_L(R.basis(g, sample_teichmuller(rng, R)))
        tr.check("L_kills_torsion_units", Lg.is_zero(), {"element": g})


def _suite_relation(G, ctx, rng, tr):
    rep = relation_check(sample_unit(rng, TwistedRing.get(G, ctx)))
    tr.used(rep["digits"])
    tr.check("relation", rep["ok"], rep["mismatches"])


def _suite_theta(G, ctx, rng, tr):
    R = TwistedRing.get(G, ctx)
    t = theta(sample_unit(rng, R))
    _report(tr, phi_check(t), ("M1", "M2", "M3"), "integral_")
    # the same tuple read in the completed ring
    th = MultiplicativeTuple(G, {k: move(v, v.ring.sibling(completed=True)) for k, v in t.parts.items()})
    _report(tr, phi_check(th), ("M1", "M2", "M3"), "image_")
    if G.nH == 1 and G.order == G.p:
        # trivial H, G = Z/p: at P = {1} the congruence holds modulo p T_{1} = p^2 R
        p1 = G.subgroup_of([0]).id
        al = alpha_tuple(t)
        d = al.parts[p1] - move(u_map(al, p1), al.parts[p1].ring)
        ok = d.dexp == 0 and all(v % ctx.p ** 2 == 0 for a in d.coefs for v in a)
        tr.check("M3_mod_p2_at_1", ok)
    if tr.heavy:
        t2 = theta(sample_unit(rng, TwistedRing.get(G, ctx, completed=True)))
        tr.used(min(v.precision for v in t2.parts.values()))
        _report(tr, phi_check(t2), ("M1", "M2", "M3"), "completed_")


def _suite_hat(G, ctx, rng, tr):
    Rh = TwistedRing.get(G, ctx, completed=True)
    S = Rh.sibling(support=G.subgroup_generated(G.index(0, 1)).id)
    y = sample_laurent_unit(rng, S)
    tr.check("y_p_congruence", (y ** ctx.p - _gamma_phi(y)).clean().mod_p_zero())
    x = sample_laurent_unit(rng, Rh)
    s = split_unit_hat(x)
    _compare(tr, "split_reconstructs", s.u * s.y, x)
    aug = gamma_projection_elt(s.u - Rh.one())
    tr.check("u_augmentation", aug.equals(aug.ring.zero()))
    if not tr.heavy:
        return
    Lb = integral_log_hat(sample_unit(rng, Rh), strict=False)
    tr.check("hat_integral", Lb.dexp == 0, {"denom_exp": Lb.dexp})
    xi = sample_unit(rng, TwistedRing.get(G, ctx))
    a = integral_log_hat(move(xi, Rh))
    _compare(tr, "hat_agrees_with_L", a, integral_log_L(xi).to_module(a.module))


def _suite_omega(G, ctx, rng, tr):
    R = TwistedRing.get(G, ctx)
    x = sample_unit(rng, R)
    y = sample_unit(rng, R)
    Lx = integral_log_L(x)
    _compare(tr, "L_homomorphism", integral_log_L(x * y), Lx + integral_log_L(y))
    om = omega_cokernel(Lx)
    tr.check("omega_identity", om.is_identity, {"sign_exp": om.sign_exp, "abelian": list(om.abelian_part)})
    # script-L lands in psi^G
    _report(tr, psi_check(script_L(theta(x))), ("A1", "A2", "A3"), "scriptL_")


def _suite_oracles(G, ctx, rng, tr):
    p, k = ctx.p, ctx.K
    for j in range(2):
        n = 1 + (2 * tr.index + j) % 8
        while True:
            A = [[rng.randrange(p ** k) for _ in range(n)] for _ in range(n)]
            if det_division_free(A, IntModOps(p, 1)) % p:
                break
        ops = IntModOps(p, k)
        d1, d2 = det_division_free(A, ops), det_elimination(A, ops)
        tr.check("berkowitz_vs_elimination", d1 == d2, {"n": n, "berkowitz": d1, "elimination": d2})
    a = sample_module(rng, ConjModule.get(G, ctx))
    for P in G.subgroups:
        reps = [rng.choice(c) for c in _left_cosets(G, P)]
        rng.shuffle(reps)
        d = trace_to_subgroup(a, P.id, reps).first_difference(trace_to_subgroup(a, P.id))
        tr.check("trace_rep_invariance", d is None, {"P": P.id, "reps": reps})
    R = TwistedRing.get(G, ctx)
    g = rng.randrange(G.order)
    kk = rng.randrange(1, p * p + 1)
    c, gk = twisted_power_class(G, g, kk)
    acc = R.basis(g)
    for _ in range(kk - 1):
        acc = ring_mul(acc, R.basis(g))
    want = R.from_dict({gk: {j: comb(c, j) for j in range(c + 1)}})
    tr.check("twisted_power", acc.equals(want), {"element": g, "k": kk})


def _left_cosets(G, P):
    seen, out = set(), []
    for g in range(G.order):
        if g not in seen:
            coset = sorted({G.mul[g][h] for h in P.elements})
            seen.update(coset)
            out.append(coset)
    return out


_RUNNERS = {
    "additive-iso": _suite_additive,
    "log-exp": _suite_log_exp,
    "integral-log": _suite_integral_log,
    "relation": _suite_relation,
    "theta-congruences": _suite_theta,
    "hat-ring": _suite_hat,
    "omega-exactness": _suite_omega,
    "oracle-crosschecks": _suite_oracles,
}


def run_trial(name: str, G: GroupG, ctx: ArithmeticContext, seed: int, index: int,
              hat_trials: int | None = None) -> _Trial:
    tr = _Trial(index, ctx.N, hat_trials is None or index < hat_trials)
    _RUNNERS[name](G, ctx, rng=trial_rng(seed, name, index), tr=tr)
    return tr


def run_suite(name: str, config: RunConfig, timing: bool = False) -> CheckReport:
    """Run ``config.trials`` trials of one suite.

    Integrality and precision errors count as failed checks.  A cyclotomic
    leak or any unexpected exception also flags ``internal_error``.
    ``ms`` stays 0 unless ``timing`` is set, so reports are reproducible.
    """
    if name not in _RUNNERS:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    config.validate()
    G = config.build()
    ctx = config.context()
    rep = CheckReport(name, config.as_dict(), config.trials)
    t0 = time.perf_counter()
    prec = None
    for i in range(config.trials):
        try:
            tr = run_trial(name, G, ctx, config.seed, i, config.hat_trials)
        except (IntegralityError, PrecisionError, ZeroDivisionError) as exc:
            tr = _Trial(i)
            tr.check(type(exc).__name__, False, str(exc))
        except CyclotomicLeak as exc:
            tr = _Trial(i)
            tr.check("cyclotomic_leak", False, str(exc))
            rep.internal_error = True
        except Exception as exc:  # noqa: BLE001 - surfaced in the report and exit code
            tr = _Trial(i)
            tr.check("internal", False, f"{type(exc).__name__}: {exc}")
            rep.internal_error = True
        if tr.fails:
            rep.failures.extend(tr.fails)
        else:
            rep.passes += 1
        if tr.digits is not None:
            prec = tr.digits if prec is None else min(prec, tr.digits)
    rep.precision_effective = ctx.K if prec is None else prec
    if timing:
        rep.ms = int((time.perf_counter() - t0) * 1000)
    return rep


def exit_code(reports) -> int:
    if any(r.internal_error for r in reports):
        return 3
    return 0 if all(r.ok for r in reports) else 1
