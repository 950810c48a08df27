import random

import pytest

from gen import AB, tiny_ns, tiny_s
from hmlchar.errors import PreconditionError
from hmlchar.formula import FALSE, TRUE, modal_depth, parse_formula
from hmlchar.games import equiv_models_2s, solve_charnse, solve_primensp
from hmlchar.oracle import bounded_models, oracle_prime_models
from hmlchar.prime import prime_ns
from hmlchar.sat import sat_hml
from hmlchar.semantics import Sim, equivalent

A12 = ("a1", "a2")
PHI_A = "<a>([a]ff & [b]ff) & [b]ff & [a][a]ff & [a][b]ff"


def F(text, alphabet=AB):
    return parse_formula(text, alphabet)


def test_charnse_examples():
    f = F("<a1>0", A12)
    assert solve_charnse(1, [f], [f], A12) is False
    # <a1>0 & [a2]ff still admits a1.0 + a1.a1.0; pinning the a1-successors restores uniqueness
    g = F("<a1>0 & [a2]ff", A12)
    assert solve_charnse(1, [g], [g], A12) is False
    h = F("<a1>0 & [a1]0 & [a2]ff", A12)
    assert solve_charnse(1, [h], [h], A12) is True
    assert solve_charnse(1, [TRUE], [TRUE], ("a",)) is False
    with pytest.raises(PreconditionError):
        solve_charnse(1, [FALSE], [TRUE], AB)


def test_charnse_sim_direction():
    assert solve_charnse(1, [F("0")], [F("<a>tt")], AB)
    assert not solve_charnse(1, [F("<a>tt")], [F("0")], AB)
    assert solve_charnse(2, [F(PHI_A)], [F(PHI_A)], AB)


def test_primensp_examples():
    assert solve_primensp(3, F("0"), AB)
    assert not solve_primensp(3, F("0 | <a>tt"), AB)
    assert solve_primensp(3, F(PHI_A), AB)
    with pytest.raises(ValueError):
        solve_primensp(2, F("0"), AB)


def test_equiv_models_2s():
    assert equiv_models_2s(FALSE, AB)
    assert not equiv_models_2s(TRUE, ("a",))
    assert equiv_models_2s(F(PHI_A), AB)


def test_equiv_models_2s_routes_agree():
    rng = random.Random(4)
    for _ in range(30):
        f = tiny_s(rng)
        if modal_depth(f) <= 2 and sat_hml(f, AB):
            assert equiv_models_2s(f, AB) == equiv_models_2s(f, AB, method="conpro", cap=10**6)


def test_games_against_enumeration():
    rng = random.Random(11)
    seen = set()
    for _ in range(25):
        f = tiny_s(rng)
        if modal_depth(f) > 2 or not sat_hml(f, AB):
            continue
        ms = bounded_models(f, AB, 2, 2)
        expect = all(equivalent(Sim, ms[0], q) for q in ms[1:])
        assert solve_charnse(1, [f], [f], AB) == expect
        seen.add(expect)
    for _ in range(15):
        f = tiny_ns(rng)
        if modal_depth(f) > 2 or not sat_hml(f, AB):
            continue
        from hmlchar.formula import parse_fragment

        g = solve_primensp(3, f, AB)
        assert g == oracle_prime_models(f, parse_fragment("3S"), AB)
        assert g == prime_ns(f, 3, AB, method="lower").prime
