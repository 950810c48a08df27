"""Characteristic formulae modulo the kernel equivalences."""

from dataclasses import dataclass

from .charform import below_formula, char_formula
from .errors import FragmentError
from .formula import FALSE, Box, actions, classify, conj, show, unfold_zero
from .lts import term
from .sat import entails, model_node, sat_hml


@dataclass
class EquivVerdict:
    characteristic: bool
    witness: object = None
    reason: str = ""


def decide_char_equiv(f, frag, alphabet=None):
    """Is f characteristic for some process modulo the fragment's kernel equivalence?"""
    alphabet = tuple(alphabet) if alphabet else tuple(sorted(actions(f)))
    tag = frag.tag
    if frag.tag == "NS" and classify(f, alphabet).min_ns > frag.n:
        raise FragmentError(f"{show(f, alphabet)} is not in L_{frag.n}S")
    if tag == "S":
        return EquivVerdict(False, reason="no formula is characteristic modulo simulation equivalence")
    if not sat_hml(f, alphabet):
        return EquivVerdict(False, reason="unsatisfiable")
    if tag in ("CS", "RS"):
        nil = conj(Box(a, FALSE) for a in alphabet)
        if entails(unfold_zero(f, alphabet), nil, alphabet):
            return EquivVerdict(True, "0")
        return EquivVerdict(False, reason="has a model with a transition")
    m0 = model_node(f, alphabet)
    if tag == "NS" and frag.n == 2:
        from .games import equiv_models_2s

        ok = equiv_models_2s(f, alphabet)
    elif tag == "NS" and frag.n >= 3:
        from .games import solve_charnse

        ok = solve_charnse(frag.n, [f], [f], alphabet)
    else:
        g = conj([char_formula(m0, frag, alphabet), below_formula(m0, frag, alphabet)])
        ok = entails(f, g, alphabet)
    return EquivVerdict(ok, term(m0) if ok else None, "" if ok else "models are not all equivalent")
