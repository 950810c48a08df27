"""Instance generators shared by the test modules."""

import random

from hmlchar.charform import below_formula, char_formula
from hmlchar.formula import conj, disj, parse_fragment
from hmlchar.lts import NIL_NODE, Node, term
from hmlchar.oracle import random_formula, random_process

AB = ("a", "b")


def formulas(seed, frag, n, md, max_nodes=25, alphabet=AB):
    rng = random.Random(seed)
    fr = parse_fragment(frag) if frag else None
    return [random_formula(rng, fr, alphabet, rng.randint(1, md), max_nodes) for _ in range(n)]


def tiny_ns(rng, n=3, alphabet=AB):
    """Small L_nS formulae, biased so that both prime and non-prime cases occur."""
    fr = parse_fragment(f"{n}S")
    p = random_process(rng, alphabet, 1, 2)
    q = random_process(rng, alphabet, 1, 2)
    r = rng.random()
    if r < 0.3:
        return char_formula(p, fr, alphabet)
    if r < 0.55:
        return disj([char_formula(p, fr, alphabet), char_formula(q, fr, alphabet)])
    if r < 0.75:
        return conj([char_formula(p, fr, alphabet), random_formula(rng, fr, alphabet, 1, 5)])
    return random_formula(rng, fr, alphabet, 2, 8)


def tiny_s(rng, alphabet=AB):
    """Small L_S / L_2S formulae whose models are sometimes all simulation equivalent."""
    fs = parse_fragment("S")
    p = random_process(rng, alphabet, 1, 2)
    q = random_process(rng, alphabet, 1, 2)
    base = conj([char_formula(p, fs, alphabet), below_formula(p, fs, alphabet)])
    r = rng.random()
    if r < 0.35:
        return base
    if r < 0.6:
        return disj([base, conj([char_formula(q, fs, alphabet), below_formula(q, fs, alphabet)])])
    if r < 0.75:
        return conj([char_formula(p, fs, alphabet), random_formula(rng, parse_fragment("2S"), alphabet, 1, 5)])
    return random_formula(rng, parse_fragment(rng.choice(["S", "2S"])), alphabet, 2, 9)


def _below_s(rng, p):
    """A node simulated by p (drop summands, recurse)."""
    edges = [(a, _below_s(rng, c)) for a, c in p.sorted_edges() if rng.random() < 0.7]
    return Node(edges) if edges else NIL_NODE


def process_pair(rng, alphabet=AB, d=3, w=2):
    """Random pair; half of the time q is p plus a summand p already simulates."""
    p = random_process(rng, alphabet, d, w)
    if rng.random() < 0.5 or not p.edges:
        return term(p), term(random_process(rng, alphabet, d, w))
    a, c = rng.choice(p.sorted_edges())
    q = Node(set(p.edges) | {(a, _below_s(rng, c))})
    return term(p), term(q)
