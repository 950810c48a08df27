import random

from hmlchar.errors import ResourceLimit
from hmlchar.formula import TRUE, parse_formula, parse_fragment
from hmlchar.lts import show_process
from hmlchar.oracle import (
    DiffConfig, differential_run, oracle_least_model, oracle_prime_dnf, oracle_prime_models,
    random_formula,
)

AB = ("a", "b")
PHI_A = "<a>([a]ff & [b]ff) & [b]ff & [a][a]ff & [a][b]ff"


def test_oracle_prime_dnf_examples():
    assert oracle_prime_dnf(parse_formula("<a>tt"), None, AB)
    assert not oracle_prime_dnf(parse_formula("<a>tt | <b>tt"), None, AB)
    assert oracle_prime_dnf(parse_formula("ff"), None, AB)


def test_oracle_least_model_examples():
    ts, s = parse_fragment("TS"), parse_fragment("S")
    assert show_process(oracle_least_model(parse_formula(PHI_A, AB), ts, AB, 1)) == "a.0"
    assert show_process(oracle_least_model(TRUE, s, AB, 1)) == "0"
    assert oracle_least_model(parse_formula("<a>tt | <b>tt"), s, AB, 1) is None


def test_oracles_agree_on_s_and_cs():
    rng = random.Random(3)
    for frag in ("S", "CS"):
        fr = parse_fragment(frag)
        for _ in range(40):
            f = random_formula(rng, fr, AB, 2, 12)
            assert oracle_prime_dnf(f, fr, AB) == oracle_prime_models(f, fr, AB)


def test_differential_run():
    recs = differential_run(42, DiffConfig(fragment="S", count=100))
    assert len(recs) == 100 and all(r["match"] for r in recs)
    assert differential_run(0, {}) == []


def test_differential_run_catches_injected_bug():
    recs = differential_run(1, DiffConfig(fragment="S", count=60), fast=lambda f, fr, al: False)
    bad = [r for r in recs if r["match"] is False]
    assert bad and "minimized" in bad[0]


def test_differential_run_skips_intractable_cases():
    def too_big(f, fr, al):
        raise ResourceLimit("cap")

    recs = differential_run(2, DiffConfig(fragment="RS", count=5), oracle=too_big)
    assert all(r["match"] is None and r["skipped"] for r in recs)
