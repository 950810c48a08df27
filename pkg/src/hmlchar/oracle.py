"""Brute-force ground truth for the fast deciders.

Nothing here uses the rewriting systems, the alternating graphs or the games.
Primality is decided from first principles: a satisfiable formula is prime
exactly when it is characteristic for one of its models, and such a least
model always has depth at most md(phi), because every preorder here contains
simulation and trimming a deeper model to md(phi) keeps it a model.
"""

import json
import random
from dataclasses import dataclass, field

from .errors import ResourceLimit
from .formula import (
    FALSE, TRUE, And, Box, Diamond, Or, boxes, modal_depth, nnf_negate,
    show, size, to_dnf, zero_macro,
)
from .lts import NIL_NODE, Node, canon, enumerate_nodes, node_size, term
from .charform import char_formula
from .sat import entails, model_node
from .semantics import model_check, node_preorder, relation_for


# ---------------------------------------------------------------- primality


def _models(f, alphabet, d, w=None, cap=10**5):
    return [n for n in enumerate_nodes(alphabet, d, w, cap) if model_check(n, f)]


def characterized_model(f, frag, alphabet, cap=10**5):
    """Least model of f (in P^md) for which f is characteristic, or None."""
    if model_node(f, alphabet) is None:
        return None
    cands = _models(f, alphabet, modal_depth(f), None, cap)
    cands.sort(key=lambda n: (node_size(n), n.text()))
    for n in cands:
        if entails(f, char_formula(n, frag, alphabet), alphabet):
            return n
    return None


def oracle_prime_models(f, frag, alphabet, cap=10**5):
    """Prime iff unsatisfiable or characteristic for some model of depth <= md."""
    if model_node(f, alphabet) is None:
        return True
    return characterized_model(f, frag, alphabet, cap) is not None


def oracle_prime_dnf(f, frag=None, alphabet=None, cap=10**5, max_disjuncts=4096):
    """Prime iff unsatisfiable or f entails one of its own prime DNF disjuncts."""
    if model_node(f, alphabet) is None:
        return True
    seen = []
    for d in to_dnf(f):
        if d in seen:
            continue
        seen.append(d)
        if len(seen) > max_disjuncts:
            raise ResourceLimit("too many DNF disjuncts for the oracle")
    sat_ds = [d for d in seen if model_node(d, alphabet) is not None]
    for d in sat_ds:
        if not entails(f, d, alphabet):
            continue
        if frag is None or frag.tag == "S":
            return True
        if oracle_prime_models(d, frag, alphabet, cap):
            return True
    return False


def oracle_least_model(f, frag, alphabet, d, w=None, cap=10**5):
    """A <=_frag-least element of the bounded model set (under-approximate)."""
    rel = relation_for(frag)
    models = _models(f, alphabet, d, w, cap)
    models.sort(key=lambda n: (node_size(n), n.text()))
    for m in models:
        if all(node_preorder(rel, m, q) for q in models):
            return term(m)
    return None


def bounded_models(f, alphabet, d, w=2, cap=10**5):
    return [term(n) for n in _models(f, alphabet, d, w, cap)]


def is_least_among(p, f, frag, alphabet, d, w=2, cap=10**5):
    """p |= f and p <=_frag q for every bounded model q."""
    rel = relation_for(frag)
    pn = canon(p)
    if not model_check(pn, f):
        return False
    return all(node_preorder(rel, pn, q) for q in _models(f, alphabet, d, w, cap))


# ---------------------------------------------------------------- random formulae


def random_formula(rng, frag, alphabet, md, max_nodes=25):
    """Random formula of the fragment with modal depth <= md and at most max_nodes nodes."""
    budget = [max_nodes]
    tag = frag.tag if frag is not None else "HML"
    level = frag.n if tag == "NS" else (1 if tag in ("S", "CS", "RS", "TS") else 0)

    def leaf(depth, n):
        opts = [TRUE, FALSE] if depth >= 1 else [TRUE] * 3 + [FALSE]
        if depth >= 1:
            opts += [Diamond(a, TRUE) for a in alphabet] * 2
        # L_S and the L_S layer of L_nS cannot express 0
        zero_ok = tag in ("CS", "RS", "TS") or n != 1
        if zero_ok and depth >= 1:
            opts += [zero_macro(alphabet)] * 3
        if zero_ok and depth >= 2:
            opts += [Diamond(a, zero_macro(alphabet)) for a in alphabet] * 2
        if tag in ("RS", "TS") and depth >= 1:
            opts += [Box(a, FALSE) for a in alphabet] * 2
        if tag == "TS" and depth >= 2:
            opts.append(boxes(tuple(rng.choice(alphabet) for _ in range(rng.randint(2, depth)))))
        f = rng.choice(opts)
        budget[0] -= size(f)
        return f

    def pos(depth, n):
        """Formula of L_nS (n=0 means full HML)."""
        if budget[0] <= 1:
            return leaf(depth, n)
        r = rng.random()
        if n != 1 and r < 0.18 and budget[0] > 3:
            budget[0] -= 1
            sub = pos(depth, n - 1 if n > 1 else 0)
            return nnf_negate(sub, alphabet)
        if r < 0.5 and depth > 0:
            budget[0] -= 1
            return Diamond(rng.choice(alphabet), pos(depth - 1, n))
        if r < 0.85 and budget[0] > 3 and depth > 0:
            budget[0] -= 1
            op = And if rng.random() < 0.55 else Or
            return op(pos(depth, n), pos(depth, n))
        return leaf(depth, n)

    while True:
        budget[0] = max_nodes
        f = pos(md, level)
        if size(f) <= max_nodes:
            return f


def random_process(rng, alphabet, d, w):
    """Random canonical node with depth <= d and out-degree <= w."""
    if d == 0:
        return NIL_NODE
    return Node(
        (rng.choice(alphabet), random_process(rng, alphabet, rng.randint(0, d - 1), w))
        for _ in range(rng.randint(0, w))
    )


# ---------------------------------------------------------------- differential testing


@dataclass
class DiffConfig:
    fragment: str = "S"
    count: int = 100
    alphabet: tuple = ("a", "b")
    md: int = 3
    max_nodes: int = 25
    minimize: bool = True
    extra: dict = field(default_factory=dict)


def _fast_verdict(f, frag, alphabet):
    from . import prime

    return prime.decide_prime(f, frag, alphabet).prime


def _oracle_verdict(f, frag, alphabet):
    if frag.tag == "S":
        return oracle_prime_dnf(f, frag, alphabet)
    if frag.tag in ("CS", "RS", "TS"):
        return oracle_prime_dnf(f, frag, alphabet)
    return oracle_prime_models(f, frag, alphabet)


def _shrink_candidates(f):
    out = [TRUE, FALSE]
    if isinstance(f, (And, Or)):
        out += [f.left, f.right]
        out += [type(f)(g, f.right) for g in _shrink_candidates(f.left)]
        out += [type(f)(f.left, g) for g in _shrink_candidates(f.right)]
    elif isinstance(f, (Diamond, Box)):
        out.append(f.body)
        out += [type(f)(f.action, g) for g in _shrink_candidates(f.body)]
    return out


def minimize(f, still_fails, limit=200):
    """Greedy delta-debugging over the AST."""
    steps = 0
    improved = True
    while improved and steps < limit:
        improved = False
        for g in sorted(set(_shrink_candidates(f)), key=lambda h: (size(h), h.key)):
            if size(g) >= size(f):
                continue
            steps += 1
            try:
                bad = still_fails(g)
            except Exception:
                bad = False
            if bad:
                f = g
                improved = True
                break
    return f


def differential_run(seed, config, fast=None, oracle=None):
    """Run a fast decider against the oracle; returns a list of JSON-able records."""
    from .formula import parse_fragment

    if config is None:
        return []
    if isinstance(config, dict):
        if not config:
            return []
        config = DiffConfig(**config)
    fast = fast or _fast_verdict
    oracle = oracle or _oracle_verdict
    frag = parse_fragment(config.fragment)
    alphabet = tuple(config.alphabet)
    rng = random.Random(seed)
    records = []
    for i in range(config.count):
        f = random_formula(rng, frag, alphabet, rng.randint(0, config.md), config.max_nodes)
        rec = {"case": i, "fragment": str(frag), "formula": show(f, alphabet)}
        try:
            fv = fast(f, frag, alphabet)
            ov = oracle(f, frag, alphabet)
        except ResourceLimit as e:
            # too big for one side; not evidence either way
            rec.update(fast=None, oracle=None, match=None, skipped=str(e)[:80])
            records.append(rec)
            continue
        rec.update(fast=fv, oracle=ov, match=fv == ov)
        if fv != ov and config.minimize:
            small = minimize(f, lambda g: fast(g, frag, alphabet) != oracle(g, frag, alphabet))
            rec["minimized"] = show(small, alphabet)
        records.append(rec)
    return records


def report_lines(records):
    for r in records:
        yield json.dumps(r, sort_keys=True)
