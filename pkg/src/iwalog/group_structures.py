"""Finite quotients G = H x| Z/p^e: tables, classes, cyclic subgroups,
normalizers, Weyl groups, abelianization, and a small catalog."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .padic_core import is_prime


class GroupValidationError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroupTable:
    order: int
    table: tuple
    gamma_action: tuple

    def validate(self, p: int, e: int):
        n = self.order
        t = self.table
        if n < 1:
            raise GroupValidationError("order: H must be non-empty")
        k = n
        while k % p == 0:
            k //= p
        if k != 1:
            raise GroupValidationError(f"p-group: |H| = {n} is not a power of {p}")
        if len(t) != n or any(len(r) != n for r in t):
            raise GroupValidationError("table: not an n x n table")
        for i in range(n):
            for j in range(n):
                if not (0 <= t[i][j] < n):
                    raise GroupValidationError(f"closure: table[{i}][{j}] out of range")
        for i in range(n):
            if t[0][i] != i or t[i][0] != i:
                raise GroupValidationError(f"identity: 0 is not a two-sided identity at index {i}")
        for i in range(n):
            if 0 not in t[i]:
                raise GroupValidationError(f"inverses: element {i} has no right inverse")
            j = t[i].index(0)
            if t[j][i] != 0:
                raise GroupValidationError(f"inverses: element {i} has no two-sided inverse")
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise GroupValidationError(f"associativity: fails at ({a},{b},{c})")
        s = self.gamma_action
        if sorted(s) != list(range(n)):
            raise GroupValidationError("automorphism: gamma_action is not a permutation")
        for a in range(n):
            for b in range(n):
                if s[t[a][b]] != t[s[a]][s[b]]:
                    raise GroupValidationError(f"automorphism: sigma fails on ({a},{b})")
        cur = list(range(n))
        for _ in range(p ** e):
            cur = [s[x] for x in cur]
        if cur != list(range(n)):
            raise GroupValidationError(f"order: sigma^(p^e) is not the identity (p^e = {p ** e})")


@dataclass
class Subgroup:
    id: int
    elements: tuple
    generator: int
    order: int

    def __contains__(self, g):
        return g in self._set

    def __post_init__(self):
        self._set = frozenset(self.elements)


class GroupG:
    """G = H x| Z/p^e with element index h + |H| * a."""

    def __init__(self, p: int, e: int, H: FiniteGroupTable, name: str = "custom", f: int = 1):
        H.validate(p, e)
        self.p = p
        self.e = e
        self.f = f
        self.name = name
        self.H = H
        self.nH = H.order
        self.pe = p ** e
        self.order = self.nH * self.pe
        self._build_tables()
        self._build_classes()
        self._build_subgroups()
        self._build_abelianization()

    # -- elements ----------------------------------------------------------
    def elem(self, idx: int):
        return idx % self.nH, idx // self.nH

    def index(self, h: int, a: int) -> int:
        return h + self.nH * (a % self.pe)

    def _build_tables(self):
        nH, pe, t = self.nH, self.pe, self.H.table
        sig = [list(range(nH))]
        for _ in range(1, pe):
            sig.append([self.H.gamma_action[x] for x in sig[-1]])
        self.sigma_pow = sig
        n = self.order
        mul = [[0] * n for _ in range(n)]
        carry = [[0] * n for _ in range(n)]
        for i in range(n):
            h1, a1 = self.elem(i)
            for j in range(n):
                h2, a2 = self.elem(j)
                mul[i][j] = self.index(t[h1][sig[a1][h2]], a1 + a2)
                carry[i][j] = (a1 + a2) // pe
        self.mul = mul
        self.carry = carry
        self.inv = [mul[i].index(0) for i in range(n)]
        self.identity = 0

    def a_of(self, g: int) -> int:
        return g // self.nH

    def conj(self, x: int, g: int) -> int:
        """x g x^{-1}."""
        return self.mul[self.mul[x][g]][self.inv[x]]

    def power(self, g: int, k: int) -> int:
        r = 0
        for _ in range(k):
            r = self.mul[r][g]
        return r

    def elem_order(self, g: int) -> int:
        k, r = 1, g
        while r != 0:
            r = self.mul[r][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        m = self.mul
        n = self.order
        return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))

    def gamma_elements(self):
        """The section of Z/p^e inside G (h = identity)."""
        return [self.index(0, a) for a in range(self.pe)]

    def generators(self):
        """A small deterministic generating set."""
        gens = []
        span = {0}
        for g in range(self.order):
            if g not in span:
                gens.append(g)
                span = self.closure(gens)
        return gens

    def closure(self, gens) -> set:
        S = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x][g]
                    if y not in S:
                        S.add(y)
                        nxt.append(y)
            frontier = nxt
        return S

    # -- classes -------------------------------------------------------------
    def _build_classes(self):
        n = self.order
        seen = [-1] * n
        classes = []
        for g in range(n):
            if seen[g] >= 0:
                continue
            orb = sorted({self.conj(x, g) for x in range(n)})
            for h in orb:
                seen[h] = len(classes)
            classes.append(tuple(orb))
        self.classes = classes
        self.class_of = seen
        self.class_reps = [c[0] for c in classes]

    # -- subgroups ---------------------------------------------------------
    def _build_subgroups(self):
        n = self.order
        subs = []
        key = {}
        for g in range(n):
            els = [0]
            r = g
            while r != 0:
                els.append(r)
                r = self.mul[r][g]
            k = frozenset(els)
            if k in key:
                continue
            key[k] = len(subs)
            subs.append(Subgroup(len(subs), tuple(sorted(k)), g, len(k)))
        self.subgroups = subs
        self._sub_key = key
        # conjugation action on subgroups
        self.sub_conj = [[key[frozenset(self.conj(x, h) for h in P.elements)] for P in subs] for x in range(n)]
        self.normalizer = []
        for P in subs:
            self.normalizer.append(tuple(x for x in range(n) if self.sub_conj[x][P.id] == P.id))
        self.inclusions = [(P.id, Q.id) for P in subs for Q in subs
                           if P.id != Q.id and set(P.elements) <= set(Q.elements)]
        pairs = []
        for Q in subs:
            gp = self.power(Q.generator, self.p)
            P = self.subgroup_generated(gp)
            if P.id != Q.id:
                pairs.append((Q.id, P.id))
        self.p_power_pairs = pairs
        self.conj_orbits = []
        seen = set()
        for P in subs:
            if P.id in seen:
                continue
            orb = sorted({self.sub_conj[x][P.id] for x in range(n)})
            seen.update(orb)
            self.conj_orbits.append(tuple(orb))
        self._left = {}
        self._weyl = {}

    def subgroup_generated(self, g: int) -> Subgroup:
        els = {0}
        r = g
        while r != 0:
            els.add(r)
            r = self.mul[r][g]
        return self.subgroups[self._sub_key[frozenset(els)]]

    def subgroup_of(self, elements) -> Subgroup | None:
        i = self._sub_key.get(frozenset(elements))
        return None if i is None else self.subgroups[i]

    def left_coset_reps(self, P, within=None) -> list[int]:
        """Representatives x of the left cosets xP (inside ``within`` if given)."""
        pid = P.id if isinstance(P, Subgroup) else P
        key = (pid, None if within is None else tuple(within))
        r = self._left.get(key)
        if r is None:
            Pel = self.subgroups[pid].elements
            pool = range(self.order) if within is None else sorted(within)
            covered = set()
            r = []
            for x in pool:
                if x in covered:
                    continue
                r.append(x)
                covered.update(self.mul[x][q] for q in Pel)
            self._left[key] = r
        return list(r)

    def right_coset_reps(self, P, within=None) -> list[int]:
        """Representatives c of the right cosets Pc."""
        return [self.inv[x] for x in self.left_coset_reps(P, within)]

    def weyl_reps(self, P) -> list[int]:
        pid = P.id if isinstance(P, Subgroup) else P
        if pid not in self._weyl:
            self._weyl[pid] = self.left_coset_reps(pid, within=self.normalizer[pid])
        return list(self._weyl[pid])

    def is_generator_of(self, g: int, P: Subgroup) -> bool:
        return g in P and self.elem_order(g) == P.order

    # -- abelianization ---------------------------------------------------
    def _build_abelianization(self):
        n = self.order
        comms = {self.mul[self.mul[a][b]][self.mul[self.inv[a]][self.inv[b]]] for a in range(n) for b in range(n)}
        Cm = self.closure(list(comms))
        self.commutator_subgroup = tuple(sorted(Cm))
        coset = [-1] * n
        reps = []
        for g in range(n):
            if coset[g] < 0:
                for c in Cm:
                    coset[self.mul[g][c]] = len(reps)
                reps.append(g)
        self._ab_coset = coset
        m = len(reps)
        qmul = [[coset[self.mul[reps[i]][reps[j]]] for j in range(m)] for i in range(m)]

        def qpow(x, k):
            r = 0
            for _ in range(k):
                r = qmul[r][x]
            return r

        def qorder(x):
            k, r = 1, x
            while r != 0:
                r = qmul[r][x]
                k += 1
            return k

        def span(gs):
            S = {0}
            fr = [0]
            while fr:
                nx = []
                for x in fr:
                    for g in gs:
                        y = qmul[x][g]
                        if y not in S:
                            S.add(y)
                            nx.append(y)
                fr = nx
            return S

        gens, orders = [], []
        S = {0}
        while len(S) < m:
            # element of maximal order modulo the current span
            best, bo = None, 0
            for x in range(m):
                if x in S:
                    continue
                k, r = 1, x
                while r not in S:
                    r = qmul[r][x]
                    k += 1
                if k > bo:
                    best, bo = x, k
            target = qpow(best, bo)
            # correct by s' in S with s'^bo = target so the new generator has order bo
            fix = None
            for s in sorted(S):
                if qpow(s, bo) == target:
                    fix = s
                    break
            if fix is None:
                raise RuntimeError("abelian decomposition failed")
            sinv = [y for y in range(m) if qmul[fix][y] == 0][0]
            g = qmul[best][sinv]
            gens.append(g)
            orders.append(qorder(g))
            S = span(gens)
        vec = {}
        for exps in product(*[range(o) for o in orders]):
            x = 0
            for g, k in zip(gens, exps):
                x = qmul[x][qpow(g, k)]
            vec[x] = exps
        if len(vec) != m:
            raise RuntimeError("abelianization basis is not free")
        self.ab_orders = tuple(orders)
        self.ab_generators = tuple(reps[g] for g in gens)
        self._ab_vec = [vec[coset[g]] for g in range(n)]

    @property
    def ab_order(self) -> int:
        r = 1
        for o in self.ab_orders:
            r *= o
        return r

    def ab_vector(self, g: int) -> tuple:
        return self._ab_vec[g]

    def ab_exponent(self) -> int:
        return max(self.ab_orders, default=1)

    # -- transfer ----------------------------------------------------------
    def twisted_power(self, g: int, k: int):
        """(c, g^k) with gbar^k = (1+T)^c * bar(g^k)."""
        c = 0
        cur = 0
        for _ in range(k):
            c += self.carry[cur][g]
            cur = self.mul[cur][g]
        return c, cur

    def transfer_exponent(self, g: int, Pprime: int, P: int):
        """p-power map U_{P'} -> U_P as (carry exponent, element)."""
        if (Pprime, P) not in self.p_power_pairs:
            raise ValueError("not a p-power pair")
        if g not in self.subgroups[Pprime]:
            raise ValueError("element not in P'")
        return self.twisted_power(g, self.p)

    def describe(self) -> dict:
        return {
            "name": self.name, "p": self.p, "e": self.e, "order": self.order,
            "H_order": self.nH, "abelian": self.is_abelian(),
            "classes": len(self.classes), "cyclic_subgroups": len(self.subgroups),
            "abelianization": list(self.ab_orders),
        }


# ---------------------------------------------------------------------------
# Catalog


def _cyclic(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def _elementary(p):
    idx = lambda x, y: x + p * y
    t = [[0] * (p * p) for _ in range(p * p)]
    for x1, y1, x2, y2 in product(range(p), repeat=4):
        t[idx(x1, y1)][idx(x2, y2)] = idx((x1 + x2) % p, (y1 + y2) % p)
    return t


def _heisenberg_table(p):
    # (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')
    els = list(product(range(p), repeat=3))
    els.sort(key=lambda v: (v[2], v[1], v[0]))
    pos = {v: i for i, v in enumerate(els)}
    t = [[0] * len(els) for _ in els]
    for a in els:
        for b in els:
            c = ((a[0] + b[0]) % p, (a[1] + b[1]) % p, (a[2] + b[2] + a[0] * b[1]) % p)
            t[pos[a]][pos[b]] = pos[c]
    return t


def _quaternion_table():
    # elements 1, i, j, k, -1, -i, -j, -k encoded as (sign, unit)
    units = ["1", "i", "j", "k"]
    mult = {("1", u): (1, u) for u in units}
    mult.update({(u, "1"): (1, u) for u in units})
    mult.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                 ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    els = [(1, u) for u in units] + [(-1, u) for u in units]
    pos = {v: i for i, v in enumerate(els)}
    t = [[0] * 8 for _ in range(8)]
    for a in els:
        for b in els:
            s, u = mult[(a[1], b[1])]
            t[pos[a]][pos[b]] = pos[(a[0] * b[0] * s, u)]
    return t


def catalog_table(name: str, p: int) -> FiniteGroupTable:
    if name == "trivial_H":
        return FiniteGroupTable(1, ((0,),), (0,))
    if name == "cyclic_p":
        t = _cyclic(p)
        return FiniteGroupTable(p, tuple(map(tuple, t)), tuple(range(p)))
    if name == "cyclic_p2":
        t = _cyclic(p * p)
        return FiniteGroupTable(p * p, tuple(map(tuple, t)), tuple(range(p * p)))
    if name == "elementary_p2":
        t = _elementary(p)
        return FiniteGroupTable(p * p, tuple(map(tuple, t)), tuple(range(p * p)))
    if name == "heisenberg":
        t = _elementary(p)
        # sigma(x, y) = (x + y, y), an automorphism of order p
        sig = tuple(((x + y) % p) + p * y for y in range(p) for x in range(p))
        return FiniteGroupTable(p * p, tuple(map(tuple, t)), sig)
    if name == "heisenberg_H":
        t = _heisenberg_table(p)
        return FiniteGroupTable(p ** 3, tuple(map(tuple, t)), tuple(range(p ** 3)))
    if name == "dihedral8":
        if p != 2:
            raise GroupValidationError("dihedral8 needs p = 2")
        t = _cyclic(4)
        return FiniteGroupTable(4, tuple(map(tuple, t)), (0, 3, 2, 1))
    if name == "quaternion8":
        if p != 2:
            raise GroupValidationError("quaternion8 needs p = 2")
        t = _quaternion_table()
        return FiniteGroupTable(8, tuple(map(tuple, t)), tuple(range(8)))
    raise KeyError(f"unknown catalog group {name!r}")


CATALOG = {
    "trivial_H": "H = 1, G = Z/p^e",
    "cyclic_p": "H = Z/p, trivial action",
    "cyclic_p2": "H = Z/p^2, trivial action",
    "elementary_p2": "H = (Z/p)^2, trivial action",
    "heisenberg": "H = (Z/p)^2, sigma(x,y) = (x+y,y); G is the Heisenberg group of order p^3 when e = 1",
    "heisenberg_H": "H = Heisenberg group of order p^3, trivial action",
    "dihedral8": "p = 2: H = Z/4, sigma = inversion; G = D8 when e = 1",
    "quaternion8": "p = 2: H = Q8, trivial action",
}

# Groups exercised by the acceptance suites.
ACCEPTANCE_CATALOG = {
    2: ["trivial_H", "cyclic_p", "cyclic_p2", "elementary_p2", "heisenberg", "dihedral8", "quaternion8"],
    3: ["trivial_H", "cyclic_p", "cyclic_p2", "elementary_p2", "heisenberg"],
}


def build_group(spec, p: int | None = None, e: int = 1, f: int = 1) -> GroupG:
    """Build from a catalog id, a JSON path, or a dict in the file format."""
    if isinstance(spec, GroupG):
        return spec
    if isinstance(spec, str) and spec in CATALOG:
        if p is None:
            raise GroupValidationError("catalog groups need p")
        if not is_prime(p):
            raise GroupValidationError(f"p={p} is not prime")
        return GroupG(p, e, catalog_table(spec, p), name=spec, f=f)
    if isinstance(spec, (str, Path)):
        path = Path(spec)
        if not path.exists():
            raise GroupValidationError(f"unknown group {spec!r}: not a catalog id or file")
        try:
            spec = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise GroupValidationError(f"invalid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise GroupValidationError("group spec must be a mapping")
    for k in ("p", "e", "H_order", "H_table", "gamma_action"):
        if k not in spec:
            raise GroupValidationError(f"missing field {k!r}")
    gp = int(spec["p"])
    if not is_prime(gp):
        raise GroupValidationError(f"p={gp} is not prime")
    tbl = FiniteGroupTable(int(spec["H_order"]), tuple(tuple(int(x) for x in r) for r in spec["H_table"]),
                           tuple(int(x) for x in spec["gamma_action"]))
    return GroupG(gp, int(spec["e"]), tbl, name=spec.get("name", "custom"), f=int(spec.get("f", 1)))


def group_to_json(G: GroupG) -> dict:
    return {"p": G.p, "e": G.e, "f": G.f, "H_order": G.nH,
            "H_table": [list(r) for r in G.H.table], "gamma_action": list(G.H.gamma_action)}


def conjugacy_classes(G: GroupG):
    return list(zip(G.class_reps, G.classes))


def transfer_exponent(G: GroupG, g: int, Pprime: int, P: int):
    return G.transfer_exponent(g, Pprime, P)
