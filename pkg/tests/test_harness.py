import json
import random
import time

import pytest

from iwalog import harness
from iwalog.cli import main
from iwalog.group_structures import ACCEPTANCE_CATALOG, build_group, group_to_json
from iwalog.harness import (SUITES, ConfigError, RunConfig, exit_code, run_suite, sample_J, sample_unit,
                            trial_rng)
from iwalog.k1_maps import CyclotomicLeak
from iwalog.padic_core import ArithmeticContext
from iwalog.twisted_algebra import TwistedRing, is_unit, residue

# chi-square critical value, 8 degrees of freedom, upper tail 0.001
CHI2_8_999 = 26.124


def _ring(name="heisenberg", p=3, **kw):
    G = build_group(name, p, 1, kw.pop("f", 1))
    ctx = ArithmeticContext(p=p, f=G.f, e=1, **{"N": 8, "M": 16, "guard": 4, **kw})
    return TwistedRing.get(G, ctx)


def test_sample_unit_is_deterministic_and_a_unit():
    R = _ring()
    a = sample_unit(random.Random("s/1"), R)
    b = sample_unit(random.Random("s/1"), R)
    assert a.equals(b) and a.coefs == b.coefs
    for i in range(20):
        x = sample_unit(random.Random(i), R)
        assert is_unit(x)
        assert any(residue(x))


def test_trial_streams_are_separate():
    a = trial_rng(42, "relation", 0).random()
    assert a == trial_rng(42, "relation", 0).random()
    assert a != trial_rng(42, "relation", 1).random()
    assert a != trial_rng(42, "log-exp", 0).random()


def test_sample_J_has_zero_residue():
    R = _ring("dihedral8", 2)
    rng = random.Random(5)
    for _ in range(20):
        assert not any(residue(sample_J(rng, R)))


def test_sample_unit_coefficients_uniform():
    # a degree-1 coefficient mod 9 is uniform: chi-square over 10^4 draws
    R = _ring("trivial_H", 3)
    rng = random.Random(1)
    counts = [0] * 9
    draws = 10_000
    for _ in range(draws):
        x = sample_unit(rng, R)
        counts[x.coefs[0][1 * R.sp.F] % 9] += 1
    expect = draws / 9
    chi2 = sum((c - expect) ** 2 / expect for c in counts)
    assert chi2 < CHI2_8_999, counts


def test_additive_suite_passes_on_trivial_H():
    rep = run_suite("additive-iso", RunConfig("trivial_H", 3, trials=10))
    assert rep.ok and rep.passes == rep.trials == 10
    assert rep.precision_effective >= 3


def test_reports_are_byte_identical():
    cfg = dict(group="cyclic_p", p=2, trials=3, suites=["relation"])
    a = run_suite("relation", RunConfig(**cfg)).to_json()
    b = run_suite("relation", RunConfig(**cfg)).to_json()
    assert a == b
    d = json.loads(a)
    assert set(d) == {"suite", "config", "trials", "passes", "failures", "precision_effective", "ms"}
    assert d["passes"] + len({f["trial"] for f in d["failures"]}) == d["trials"]


def test_config_errors():
    with pytest.raises(ConfigError):
        run_suite("nope", RunConfig("trivial_H", 3))
    with pytest.raises(ConfigError):
        RunConfig("trivial_H", 3, trials=0).validate()
    with pytest.raises(ConfigError):
        RunConfig("trivial_H", 4).validate()
    with pytest.raises(ConfigError):
        RunConfig("no_such_group", 3).validate()


def _runner(kind):
    def run(G, ctx, rng, tr):
        if kind == "fail":
            tr.check("always", False, {"why": "forced"})
        elif kind == "leak":
            raise CyclotomicLeak("residue left in the cyclotomic quotient")
        else:
            tr.check("always", True)
    return run


@pytest.mark.parametrize("kind,code", [("pass", 0), ("fail", 1), ("leak", 3)])
def test_exit_codes(monkeypatch, kind, code, tmp_path):
    monkeypatch.setitem(harness._RUNNERS, "relation", _runner(kind))
    out = tmp_path / "r.json"
    rc = main(["verify", "relation", "--group", "trivial_H", "--p", "3", "--trials", "2",
               "--report", str(out)])
    assert rc == code
    rep = json.loads(out.read_text())
    assert rep["trials"] == 2
    if code:
        assert rep["failures"]


def test_exit_code_of_reports():
    r = run_suite("oracle-crosschecks", RunConfig("trivial_H", 2, trials=1))
    assert exit_code([r]) == 0


@pytest.mark.parametrize("argv", [
    ["verify", "bogus", "--group", "trivial_H", "--p", "3"],
    ["verify", "relation", "--group", "trivial_H", "--p", "3", "--trials", "0"],
    ["verify", "relation", "--group", "trivial_H", "--p", "6"],
    ["verify", "relation"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    for name in ACCEPTANCE_CATALOG[2]:
        assert name in out


def test_group_validate(tmp_path, capsys):
    G = build_group("dihedral8", 2)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group_to_json(G)))
    assert main(["group", "validate", str(path)]) == 0
    desc = json.loads(capsys.readouterr().out)
    assert desc["order"] == G.order
    bad = tmp_path / "bad.json"
    data = group_to_json(G)
    data["p"] = 3
    bad.write_text(json.dumps(data))
    assert main(["group", "validate", str(bad)]) == 2


def test_verify_all_writes_list(tmp_path, capsys):
    out = tmp_path / "all.json"
    assert main(["verify", "all", "--group", "trivial_H", "--p", "2", "--trials", "1", "--report", str(out)]) == 0
    reps = json.loads(out.read_text())
    assert [r["suite"] for r in reps] == list(SUITES)


CATALOG_RUNS = [(g, p) for p, names in ACCEPTANCE_CATALOG.items() for g in names]


@pytest.mark.parametrize("group,p", CATALOG_RUNS)
def test_single_trial_smoke_budget(group, p):
    cfg = RunConfig(group, p, trials=1)
    cfg.validate()
    slow = {}
    for s in SUITES:
        t0 = time.perf_counter()
        rep = run_suite(s, cfg)
        dt = time.perf_counter() - t0
        assert rep.ok, (s, rep.failures)
        if dt >= 5.0:
            slow[s] = round(dt, 2)
    assert not slow, slow
