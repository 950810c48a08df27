"""Satisfiability: initials families for the small fragments and a tableau kernel for full HML."""

from .errors import FragmentError
from .formula import (
    FALSE, And, Box, Diamond, FF, Not, Or, TT, Zero, classify, fold_zero, nnf,
)
from .lts import NIL_NODE, Node, term

# ---------------------------------------------------------------- tableau kernel

_memo = {}


def _expand(todo, lits):
    """Propositional expansion: yield elementary literal sets, left disjuncts first."""
    while todo:
        f = todo[-1]
        todo = todo[:-1]
        if isinstance(f, TT):
            continue
        if isinstance(f, FF):
            return
        if isinstance(f, And):
            todo = todo + (f.right, f.left)
            continue
        if isinstance(f, Or):
            yield from _expand(todo + (f.left,), lits)
            yield from _expand(todo + (f.right,), lits)
            return
        if isinstance(f, Not):
            raise FragmentError("tableau input must be in negation normal form")
        lits = lits | {f}
    yield lits


def _elementary_model(lits):
    dias = sorted(f for f in lits if isinstance(f, Diamond))
    if dias and ZERO_ATOM in lits:
        return None
    boxed = {}
    for f in lits:
        if isinstance(f, Box):
            boxed.setdefault(f.action, []).append(f.body)
    edges = []
    for d in dias:
        child = _sat_labels(frozenset([d.body, *boxed.get(d.action, ())]))
        if child is None:
            return None
        edges.append((d.action, child))
    return Node(edges) if edges else NIL_NODE


def _sat_labels(labels):
    hit = _memo.get(labels, 0)
    if hit != 0:
        return hit
    if FALSE in labels:
        _memo[labels] = None
        return None
    result = None
    seen = set()
    start = tuple(sorted(labels, reverse=True))
    for lits in _expand(start, frozenset()):
        if lits in seen:
            continue
        seen.add(lits)
        result = _elementary_model(lits)
        if result is not None:
            break
    _memo[labels] = result
    return result


ZERO_ATOM = Zero()


def model_node(f, alphabet=None):
    """Canonical node of a model of depth <= md(f), or None when unsatisfiable."""
    return _sat_labels(frozenset([nnf(f, alphabet)]))


def extract_model(f, alphabet=None):
    n = model_node(f, alphabet)
    return None if n is None else term(n)


def sat_hml(f, alphabet=None):
    return model_node(f, alphabet) is not None


def entails(f, g, alphabet=None):
    """f |= g, decided as unsatisfiability of f & !g."""
    return model_node(And(f, Not(g)), alphabet) is None


def equivalent_formulas(f, g, alphabet=None):
    return entails(f, g, alphabet) and entails(g, f, alphabet)


# ---------------------------------------------------------------- initials families

EMPTY = "0"
ALPHA = "alpha"


def j_family(f, alphabet=None):
    """4-valued initials abstraction for L_CS: a subset of {EMPTY, ALPHA}."""
    g = fold_zero(f, alphabet) if alphabet else f
    memo = {}

    def go(h):
        if h in memo:
            return memo[h]
        if isinstance(h, TT):
            r = frozenset([EMPTY, ALPHA])
        elif isinstance(h, FF):
            r = frozenset()
        elif isinstance(h, Zero):
            r = frozenset([EMPTY])
        elif isinstance(h, Diamond):
            r = frozenset([ALPHA]) if go(h.body) else frozenset()
        elif isinstance(h, And):
            r = go(h.left) & go(h.right)
        elif isinstance(h, Or):
            r = go(h.left) | go(h.right)
        else:
            raise FragmentError("J-family is defined for L_CS only")
        memo[h] = r
        return r

    return go(g)


def initials_family(f, alphabet):
    """Family of initials sets of the models of an L_RS formula."""
    k = len(alphabet)
    full = (1 << (1 << k)) - 1  # bitset over all 2^k subsets
    index = {a: i for i, a in enumerate(alphabet)}
    memo = {}

    def having(a, present):
        bit = 1 << index[a]
        out = 0
        for x in range(1 << k):
            if bool(x & bit) == present:
                out |= 1 << x
        return out

    def go(h):
        if h in memo:
            return memo[h]
        if isinstance(h, TT):
            r = full
        elif isinstance(h, FF):
            r = 0
        elif isinstance(h, Zero):
            r = 1
        elif isinstance(h, Diamond):
            if h.action not in index:
                raise FragmentError(f"action {h.action!r} not in the alphabet")
            r = having(h.action, True) if go(h.body) else 0
        elif isinstance(h, Box):
            if h.body is not FALSE:
                raise FragmentError("initials family is defined for L_RS only")
            if h.action not in index:
                raise FragmentError(f"action {h.action!r} not in the alphabet")
            r = having(h.action, False)
        elif isinstance(h, And):
            r = go(h.left) & go(h.right)
        elif isinstance(h, Or):
            r = go(h.left) | go(h.right)
        else:
            raise FragmentError("initials family is defined for L_RS only")
        memo[h] = r
        return r

    bits = go(f)
    fam = set()
    for x in range(1 << k):
        if bits >> x & 1:
            fam.add(frozenset(a for a in alphabet if x >> index[a] & 1))
    return frozenset(fam)


def conjunctive_rs_sat(f):
    """Linear check for disjunction-free L_RS formulae."""
    if isinstance(f, TT):
        return True
    if isinstance(f, FF):
        return False
    if isinstance(f, Zero):
        return True
    if isinstance(f, Or):
        raise FragmentError("conjunctive_rs_sat expects a disjunction-free formula")
    parts = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack += [g.left, g.right]
        else:
            parts.append(g)
    if FALSE in parts:
        return False
    closed = {g.action for g in parts if isinstance(g, Box)}
    if any(isinstance(g, Zero) for g in parts):
        closed = None
    for g in parts:
        if isinstance(g, Diamond):
            if closed is None or g.action in closed:
                return False
            if not conjunctive_rs_sat(g.body):
                return False
    return True


def satisfiable(f, frag=None, alphabet=None):
    """Dispatch to the cheapest sound decider for the fragment."""
    if frag is None:
        return sat_hml(f, alphabet)
    fs = classify(f, alphabet)
    if frag.tag in ("S", "CS") and frag in fs:
        return bool(j_family(f, alphabet))
    if frag.tag == "RS" and alphabet is not None and frag in fs and len(alphabet) <= 12:
        return bool(initials_family(f, alphabet))
    return sat_hml(f, alphabet)
