"""Satisfaction and the simulation-based preorders on canonical process nodes."""

from dataclasses import dataclass

from .formula import And, Box, Diamond, FF, Not, Or, TT, Zero
from .lts import NIL_NODE, Node, canon, node_sim, term


@dataclass(frozen=True)
class Relation:
    tag: str
    n: int = 0

    def __str__(self):
        return f"{self.n}S" if self.tag == "NestedSim" else self.tag


Sim = Relation("Sim")
CompleteSim = Relation("CompleteSim")
ReadySim = Relation("ReadySim")
TraceSim = Relation("TraceSim")
Bisim = Relation("Bisim")


def NestedSim(n):
    if n < 1:
        raise ValueError("nesting level must be >= 1")
    return Sim if n == 1 else Relation("NestedSim", n)


def relation_for(frag):
    """The preorder a fragment characterizes."""
    return {
        "S": Sim,
        "CS": CompleteSim,
        "RS": ReadySim,
        "TS": TraceSim,
        "BS": Bisim,
    }.get(frag.tag) or NestedSim(frag.n)


_REL_NAMES = {
    "S": Sim, "SIM": Sim, "CS": CompleteSim, "RS": ReadySim, "TS": TraceSim,
    "BS": Bisim, "BISIM": Bisim,
}


def parse_relation(text):
    t = text.strip().upper()
    if t in _REL_NAMES:
        return _REL_NAMES[t]
    if t.endswith("S") and t[:-1].isdigit():
        return NestedSim(int(t[:-1]))
    raise ValueError(f"unknown relation {text!r}")


# ---------------------------------------------------------------- model checking


def model_check(p, f):
    memo = {}

    def sat(n, g):
        key = (n, g)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(g, TT):
            r = True
        elif isinstance(g, FF):
            r = False
        elif isinstance(g, Zero):
            r = not n.edges
        elif isinstance(g, Diamond):
            r = any(a == g.action and sat(c, g.body) for a, c in n.edges)
        elif isinstance(g, Box):
            r = all(sat(c, g.body) for a, c in n.edges if a == g.action)
        elif isinstance(g, And):
            r = sat(n, g.left) and sat(n, g.right)
        elif isinstance(g, Or):
            r = sat(n, g.left) or sat(n, g.right)
        elif isinstance(g, Not):
            r = not sat(n, g.body)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = r
        return r

    return sat(canon(p), f)


# ---------------------------------------------------------------- traces


_det_memo = {}


def trace_node(states):
    """Deterministic trace tree of a set of nodes, itself a canonical node."""
    states = frozenset(states)
    hit = _det_memo.get(states)
    if hit is not None:
        return hit
    by_act = {}
    for s in states:
        for a, c in s.edges:
            by_act.setdefault(a, set()).add(c)
    out = Node((a, trace_node(cs)) for a, cs in by_act.items())
    _det_memo[states] = out
    return out


def traces(p):
    out = set()

    def walk(n, prefix):
        out.add(prefix)
        for a, c in n.edges:
            walk(c, prefix + (a,))

    walk(trace_node([canon(p)]), ())
    return out


# ---------------------------------------------------------------- preorders


def _side(tag):
    if tag == "CompleteSim":
        return lambda p, q: (not p.edges) == (not q.edges)
    if tag == "ReadySim":
        return lambda p, q: p.initials() == q.initials()
    if tag == "TraceSim":
        return lambda p, q: trace_node([p]) is trace_node([q])
    return None


_memos = {}


def _constrained_sim(p, q, cond, memo):
    key = (p, q)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not cond(p, q):
        r = False
    elif p.depth > q.depth:
        r = False
    else:
        r = all(
            any(b == a and _constrained_sim(p2, q2, cond, memo) for b, q2 in q.edges)
            for a, p2 in p.edges
        )
    memo[key] = r
    return r


def _nested(n, p, q):
    if n == 1:
        return node_sim(p, q)
    memo = _memos.setdefault(("NS", n), {})
    return _constrained_sim(p, q, lambda x, y: _nested(n - 1, y, x), memo)


def node_preorder(rel, p, q):
    if rel.tag == "Bisim":
        return p is q
    if rel.tag == "Sim":
        return node_sim(p, q)
    if rel.tag == "NestedSim":
        return _nested(rel.n, p, q)
    memo = _memos.setdefault(rel.tag, {})
    return _constrained_sim(p, q, _side(rel.tag), memo)


def preorder(rel, p, q):
    """p <=_rel q."""
    return node_preorder(rel, canon(p), canon(q))


def equivalent(rel, p, q):
    p, q = canon(p), canon(q)
    return node_preorder(rel, p, q) and node_preorder(rel, q, p)


# ---------------------------------------------------------------- 2S lower bound


def _sim_eq(p, q):
    return node_sim(p, q) and node_sim(q, p)


def mlb_node(p, q, memo=None):
    """Product-style greatest lower bound for <=_2S (None unless p ==_S q)."""
    if memo is None:
        memo = {}
    if not _sim_eq(p, q):
        return None
    key = (p, q)
    if key in memo:
        return memo[key]
    edges = []
    for a, p2 in p.edges:
        for b, q2 in q.edges:
            if a == b and _sim_eq(p2, q2):
                edges.append((a, mlb_node(p2, q2, memo)))
    out = Node(edges) if edges else NIL_NODE
    memo[key] = out
    return out


def mlb_2s(p, q):
    out = mlb_node(canon(p), canon(q))
    return None if out is None else term(out)
