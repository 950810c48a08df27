"""Primality deciders per fragment and witness extraction.

The S, CS and RS deciders build the sequent graph of (left, left => right)
vertices and solve alternating reachability on it.  TS and the nested
fragments go through the least-model search below a single model, and the
2S decider enumerates ConPro outputs.
"""

import itertools
from collections import deque
from dataclasses import dataclass

from .altgraph import EXISTS, FORALL, AltGraph, reach_a
from .charform import char_formula
from .errors import FragmentError, HmlError, PreconditionError, ResourceLimit
from .formula import (
    FALSE, TRUE, ZERO, And, Box, Diamond, Or, actions, classify, flatten_or, fold_zero, modal_depth, show, size, subformulae, to_dnf,
)
from .lts import NIL_NODE, Node, enumerate_nodes, node_size, term
from .rewrite import (
    _ops, _rebuild, consub, diamond_collapse, eliminate_ff, eliminate_tt, saturate,
    zero_normal_form,
)
from .sat import conjunctive_rs_sat, entails, j_family, model_node, sat_hml
from .semantics import mlb_node, model_check, node_preorder, relation_for

TRUE_V = "TRUE"


@dataclass
class PrimeVerdict:
    prime: bool
    witness: object = None
    counterexample: object = None
    nodes: int = 0

    @property
    def satisfiable(self):
        return self.witness is not None


def _alphabet(f, alphabet):
    return tuple(alphabet) if alphabet else tuple(sorted(actions(f)))


# ---------------------------------------------------------------- sequent graphs


def _axiom_s(f1, f2, g):
    return g is TRUE


def _axiom_cs(f1, f2, g):
    return g is ZERO and f1 is ZERO and f2 is ZERO


def _axiom_sat(f1, f2, g):
    return isinstance(g, Box) and f1 is g and f2 is g


def _axiom_unbounded(f1, f2, g):
    return g is TRUE or _axiom_sat(f1, f2, g)


def _and_rhs_diamond(g):
    return isinstance(g, Diamond)


def _and_rhs_sat(g):
    return isinstance(g, (Diamond, Box))


def sequent_graph(f1, f2, g, axiom=_axiom_s, and_ok=_and_rhs_diamond, limit=None):
    """Graph rooted at (f1, f2 => g); right rules before left rules."""
    root = (f1, f2, g)
    graph = AltGraph(root, TRUE_V)
    graph.add_vertex(TRUE_V, EXISTS)
    todo = deque([root])
    graph.add_vertex(root, EXISTS)
    seen = {root}

    def link(v, kids, kind):
        graph.kind[v] = kind
        for k in kids:
            graph.add_edge(v, k)
            if k != TRUE_V and k not in seen:
                seen.add(k)
                todo.append(k)

    while todo:
        v = todo.popleft()
        if limit is not None and len(seen) > limit:
            raise ResourceLimit("sequent graph exceeds its size bound")
        a, b, h = v
        if axiom(a, b, h):
            link(v, [TRUE_V], EXISTS)
        elif isinstance(h, And):
            link(v, [(a, b, h.left), (a, b, h.right)], FORALL)
        elif isinstance(h, Or):
            link(v, [(a, b, h.left), (a, b, h.right)], EXISTS)
        elif isinstance(a, Or):
            link(v, [(a.left, b, h), (a.right, b, h)], FORALL)
        elif isinstance(b, Or):
            link(v, [(a, b.left, h), (a, b.right, h)], FORALL)
        else:
            kids = []
            if and_ok(h):
                if isinstance(a, And):
                    kids += [(a.left, b, h), (a.right, b, h)]
                if isinstance(b, And):
                    kids += [(a, b.left, h), (a, b.right, h)]
            if (isinstance(h, Diamond) and isinstance(a, Diamond) and isinstance(b, Diamond)
                    and a.action == h.action == b.action):
                kids.append((a.body, b.body, h.body))
            link(v, kids, EXISTS)
    return graph


def _graph_prime(f, axiom, and_ok):
    n = len(subformulae(f))
    g = sequent_graph(f, f, f, axiom, and_ok, limit=n ** 3 + 1)
    return reach_a(g), len(g.vertices)


# ---------------------------------------------------------------- witnesses


def _positions_of_or(f, path=()):
    if isinstance(f, Or):
        return path
    for i, h in enumerate(_ops(f)):
        if isinstance(f, Box):
            break
        p = _positions_of_or(h, path + (i,))
        if p is not None:
            return p
    return None


def _replace(f, path, g):
    if not path:
        return g
    ops = _ops(f)
    ops[path[0]] = _replace(ops[path[0]], path[1:], g)
    return _rebuild(f, ops)


def _get(f, path):
    for i in path:
        f = _ops(f)[i]
    return f


def prime_disjunct(f, alphabet=None):
    """Greedily resolve every disjunction of a prime f to an equivalent disjunct.

    Diamonds and conjunctions distribute over disjunction, so a prime f
    entails f with some occurrence of l | r replaced by l or by r; repeating
    gives a disjunction-free formula equivalent to f.  None when f is not prime.
    """
    g = f
    while True:
        path = _positions_of_or(g)
        if path is None:
            return g
        node = _get(g, path)
        for side in flatten_or(node):
            h = _replace(g, path, side)
            if entails(f, h, alphabet):
                g = h
                break
        else:
            return None


def process_of(f):
    """p_f for a disjunction-free formula: diamonds become summands, the rest is dropped."""
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, Diamond):
            out = Node([(g.action, go(g.body))])
        elif isinstance(g, And):
            out = Node(go(g.left).edges | go(g.right).edges)
        elif isinstance(g, Or):
            raise PreconditionError("process_of expects a disjunction-free formula")
        else:
            out = NIL_NODE
        memo[g] = out
        return out

    return go(f)


def _witness_conj(c, tag, alphabet):
    if tag == "S":
        return process_of(c)
    if tag == "CS":
        c = diamond_collapse(fold_zero(c, alphabet))
        if c is TRUE:
            return None
        return process_of(c)
    if tag == "RS":
        c = saturate(c, alphabet, unbounded=True)
        if c is TRUE:
            return None
        return process_of(c)
    raise FragmentError(f"no syntactic witness for {tag}")


def extract_witness(f, frag, alphabet=None):
    """A process for which f is characteristic within the fragment."""
    alphabet = _alphabet(f, alphabet)
    if not sat_hml(f, alphabet):
        raise PreconditionError("an unsatisfiable formula has no witness")
    if frag.tag in ("S", "CS", "RS"):
        c = prime_disjunct(f, alphabet)
        p = None if c is None else _witness_conj(c, frag.tag, alphabet)
    else:
        p = least_model_below(f, frag, alphabet)
    if p is None or not model_check(p, f):
        raise PreconditionError(f"{show(f, alphabet)} is not prime in L_{frag}")
    return term(p)


# ---------------------------------------------------------------- S, CS, RS


def _dnf_counterexample(f, alphabet, cap=64):
    """A pair of satisfiable disjuncts with no common entailed disjunct, for L_S."""
    ds = []
    for d in to_dnf(f):
        if d not in ds and sat_hml(d, alphabet):
            ds.append(d)
        if len(ds) > cap:
            return None
    for i, x in enumerate(ds):
        for y in ds[i:]:
            if not any(entails(x, m, alphabet) and entails(y, m, alphabet) for m in ds):
                return (show(x, alphabet), show(y, alphabet))
    return None


def prime_s(f, alphabet=None):
    if not classify(f, None).s:
        raise FragmentError(f"{show(f)} is not in L_S")
    alphabet = _alphabet(f, alphabet)
    if not j_family(f):
        return PrimeVerdict(True)
    g = eliminate_ff(f)
    ok, nodes = _graph_prime(g, _axiom_s, _and_rhs_diamond)
    if not ok:
        return PrimeVerdict(False, counterexample=_dnf_counterexample(g, alphabet), nodes=nodes)
    return PrimeVerdict(True, extract_witness(g, _frag("S"), alphabet), nodes=nodes)


def prime_cs(f, alphabet=None, rng=None, trace=None):
    alphabet = _alphabet(f, alphabet)
    if not classify(f, alphabet).cs:
        raise FragmentError(f"{show(f, alphabet)} is not in L_CS")
    g = fold_zero(f, alphabet)
    if not j_family(g):
        return PrimeVerdict(True)
    g = consub(g, "CS", trace=trace)
    g = eliminate_tt(g, trace=trace, rng=rng)
    g = zero_normal_form(g, trace=trace, rng=rng)
    g = diamond_collapse(g)
    if g is TRUE:
        return PrimeVerdict(False, counterexample=("collapses to tt",))
    ok, nodes = _graph_prime(g, _axiom_cs, _and_rhs_diamond)
    if not ok:
        return PrimeVerdict(False, nodes=nodes)
    c = prime_disjunct(g, alphabet)
    p = None if c is None else process_of(c)
    if p is None or not model_check(p, f):
        return PrimeVerdict(False, counterexample=("collapse is weaker than the input",), nodes=nodes)
    return PrimeVerdict(True, term(p), nodes=nodes)


def prime_rs_bounded(f, alphabet=None):
    alphabet = _alphabet(f, alphabet)
    if not classify(f, alphabet).rs:
        raise FragmentError(f"{show(f, alphabet)} is not in L_RS")
    if not sat_hml(f, alphabet):
        return PrimeVerdict(True)
    g = consub(f, "RS", alphabet)
    g = saturate(g, alphabet)
    if g is TRUE:
        return PrimeVerdict(False, counterexample=("saturates to tt",))
    ok, nodes = _graph_prime(g, _axiom_sat, _and_rhs_sat)
    if not ok:
        return PrimeVerdict(False, nodes=nodes)
    c = prime_disjunct(g, alphabet)
    p = None if c is None else process_of(c)
    if p is None or not model_check(p, f):
        return PrimeVerdict(False, counterexample=("saturation is weaker than the input",), nodes=nodes)
    return PrimeVerdict(True, term(p), nodes=nodes)


def prime_rs_unbounded(f, alphabet=None, max_disjuncts=4096):
    alphabet = _alphabet(f, alphabet)
    if not classify(f, alphabet).rs:
        raise FragmentError(f"{show(f, alphabet)} is not in L_RS")
    if not sat_hml(f, alphabet):
        return PrimeVerdict(True)
    sats = []
    seen = set()
    for d in to_dnf(f):
        if d in seen:
            continue
        seen.add(d)
        if len(seen) > max_disjuncts:
            raise ResourceLimit("too many DNF disjuncts")
        if not conjunctive_rs_sat(d):
            continue
        s = saturate(eliminate_ff(d), alphabet, unbounded=True)
        if s is TRUE:
            return PrimeVerdict(False, counterexample=(show(d, alphabet), "saturates to tt"))
        sats.append((d, s))
    nodes = 0
    for i, (di, si) in enumerate(sats):
        for dj, sj in sats[i:]:
            g = sequent_graph(si, sj, f, _axiom_unbounded, _and_rhs_sat)
            nodes += len(g.vertices)
            if not reach_a(g):
                return PrimeVerdict(False, counterexample=(show(di, alphabet), show(dj, alphabet)),
                                    nodes=nodes)
    c = prime_disjunct(f, alphabet)
    if c is None:
        raise HmlError("pair check accepted but no prime disjunct was found")
    p = process_of(saturate(eliminate_ff(c), alphabet, unbounded=True))
    if not model_check(p, f):
        raise HmlError("witness construction failed")
    return PrimeVerdict(True, term(p), nodes=nodes)


# ---------------------------------------------------------------- least model below a model


def lower_set(m, rel, cap=10**5):
    """One representative per ==_rel class of {p : p <=_rel m}."""
    memo = {}
    budget = [cap]

    def go(n):
        if n in memo:
            return memo[n]
        opts = []
        for a, c in n.sorted_edges():
            for x in go(c):
                if (a, x) not in opts:
                    opts.append((a, x))
        out = []
        for r in range(len(opts) + 1):
            for combo in itertools.combinations(opts, r):
                budget[0] -= 1
                if budget[0] < 0:
                    raise ResourceLimit("lower-set enumeration exceeded the class cap")
                p = Node(combo) if combo else NIL_NODE
                if not node_preorder(rel, p, n):
                    continue
                if any(node_preorder(rel, p, q) and node_preorder(rel, q, p) for q in out):
                    continue
                out.append(p)
        out.sort(key=lambda p: (node_size(p), p.text()))
        memo[n] = out
        return out

    return go(m)


def least_model_below(f, frag, alphabet, cap=10**5):
    """The least model of f (as a node) when f is prime and satisfiable, else None."""
    m0 = model_node(f, alphabet)
    if m0 is None:
        return None
    rel = relation_for(frag)
    for p in lower_set(m0, rel, cap):
        if model_check(p, f) and entails(f, char_formula(p, frag, alphabet), alphabet):
            return p
    return None


def _least_in_pd(f, frag, alphabet, cap):
    """Two passes over the models in P^d: pick a candidate, then verify it."""
    rel = relation_for(frag)
    models = [n for n in enumerate_nodes(alphabet, modal_depth(f), None, cap) if model_check(n, f)]
    if not models:
        return None, 0
    cur = models[0]
    for q in models[1:]:
        if node_preorder(rel, q, cur):
            cur = q
    if all(node_preorder(rel, cur, q) for q in models):
        return cur, len(models)
    return False, len(models)


def prime_ts_fpt(f, alphabet=None, method="lower", cap=10**5):
    """TS primality; method "pd" enumerates P^d as in the FPT bound, "lower" searches below one model."""
    alphabet = _alphabet(f, alphabet)
    if not classify(f, alphabet).ts:
        raise FragmentError(f"{show(f, alphabet)} is not in L_TS")
    frag = _frag("TS")
    if method == "pd":
        p, nodes = _least_in_pd(f, frag, alphabet, cap)
        if p is None:
            return PrimeVerdict(True, nodes=nodes)
        if p is False:
            return PrimeVerdict(False, nodes=nodes)
        return PrimeVerdict(True, term(p), nodes=nodes)
    if not sat_hml(f, alphabet):
        return PrimeVerdict(True)
    p = least_model_below(f, frag, alphabet, cap)
    return PrimeVerdict(p is not None, None if p is None else term(p))


def prime_ns(f, n, alphabet=None, method="game", cap=10**5):
    if n < 2:
        raise FragmentError("prime_ns expects n >= 2")
    if n == 2 and method == "game":
        return prime_2s(f, alphabet)
    alphabet = _alphabet(f, alphabet)
    if classify(f, alphabet).min_ns > n:
        raise FragmentError(f"{show(f, alphabet)} is not in L_{n}S")
    if not sat_hml(f, alphabet):
        return PrimeVerdict(True)
    frag = _frag(f"{n}S")
    if method == "game":
        from .games import solve_primensp

        if not solve_primensp(n, f, alphabet):
            return PrimeVerdict(False)
    p = least_model_below(f, frag, alphabet, cap)
    if p is None:
        if method == "game":
            raise HmlError("game accepted but no least model was found")
        return PrimeVerdict(False)
    return PrimeVerdict(True, term(p))


# ---------------------------------------------------------------- 2S via ConPro


class RandomChoices:
    def __init__(self, rng, extra_rate=0.3):
        self.rng = rng
        self.extra_rate = extra_rate

    def disjunct(self, f):
        return self.rng.random() < 0.5

    def extras(self, budget):
        if budget <= 0 or self.rng.random() >= self.extra_rate:
            return 0
        return self.rng.randint(1, budget)

    def action(self, alphabet):
        return self.rng.choice(alphabet)


def conpro(f, alphabet, choices):
    """One execution of the process construction; returns (node, states) or None if it stops."""
    md = modal_depth(f)
    budget = [size(f)]
    labels = [{f}]
    depth = [0]
    kids = [[]]
    queue = deque([0])

    def fresh(lab, d, parent, a):
        labels.append(set(lab))
        depth.append(d)
        kids.append([])
        kids[parent].append((a, len(labels) - 1))
        return len(labels) - 1

    while queue:
        s = queue.popleft()
        lab = labels[s]
        while True:
            comp = next((g for g in sorted(lab) if isinstance(g, (And, Or))), None)
            if comp is None:
                break
            lab.discard(comp)
            if isinstance(comp, And):
                lab |= {comp.left, comp.right}
            else:
                lab.add(comp.left if choices.disjunct(comp) else comp.right)
        if FALSE in lab:
            return None
        boxed = {}
        for g in lab:
            if isinstance(g, Box):
                boxed.setdefault(g.action, set()).add(g.body)
        for g in sorted(lab):
            if isinstance(g, Diamond):
                t = fresh({g.body} | boxed.get(g.action, set()), depth[s] + 1, s, g.action)
                if FALSE in labels[t]:
                    return None
                if depth[t] < md + 1:
                    queue.append(t)
        for _ in range(choices.extras(budget[0])):
            a = choices.action(alphabet)
            t = fresh(boxed.get(a, set()), depth[s] + 1, s, a)
            if FALSE in labels[t]:
                return None
            if depth[t] < md + 1:
                queue.append(t)
            budget[0] -= 1

    def build(s):
        return Node((a, build(t)) for a, t in kids[s]) if kids[s] else NIL_NODE

    return build(0), len(labels)


def conpro_outputs(f, alphabet, cap=20000):
    """All ConPro outputs up to canonical form, with the least extra-state count per output."""
    md = modal_depth(f)
    limit = size(f)
    memo = {}
    work = [0]

    def tick(n=1):
        work[0] += n
        if work[0] > cap:
            raise ResourceLimit("ConPro choice space exceeds the cap")

    def expand(todo, lits):
        while todo:
            g = todo[-1]
            todo = todo[:-1]
            if isinstance(g, And):
                todo = todo + (g.right, g.left)
                continue
            if isinstance(g, Or):
                yield from expand(todo + (g.left,), lits)
                yield from expand(todo + (g.right,), lits)
                return
            lits = lits | {g}
        yield lits

    def combine(acc, opts):
        out = {}
        for edges, c in acc.items():
            for (a, n), c2 in opts.items():
                if c + c2 <= limit:
                    key = edges | {(a, n)}
                    if out.get(key, limit + 1) > c + c2:
                        out[key] = c + c2
                tick()
        return out

    def state(label, d):
        key = (label, d)
        if key in memo:
            return memo[key]
        res = {}
        for lits in set(expand(tuple(sorted(label)), frozenset())):
            tick()
            if FALSE in lits:
                continue
            boxed = {}
            for g in lits:
                if isinstance(g, Box):
                    boxed.setdefault(g.action, set()).add(g.body)
            acc = {frozenset(): 0}
            dead = False
            for g in sorted(lits):
                if isinstance(g, Diamond):
                    child = frozenset({g.body} | boxed.get(g.action, set()))
                    opts = child_outputs(child, d + 1)
                    if not opts:
                        dead = True
                        break
                    acc = combine(acc, {(g.action, n): c for n, c in opts.items()})
            if dead:
                continue
            extra = {}
            for a in alphabet:
                child = frozenset(boxed.get(a, set()))
                for n, c in child_outputs(child, d + 1).items():
                    extra[(a, n)] = c + 1
            for edges, c in list(acc.items()):
                _add(res, edges, c)
            frontier = dict(acc)
            for _ in range(limit):
                nxt = {}
                for edges, c in frontier.items():
                    for e, c2 in extra.items():
                        if c + c2 <= limit and e not in edges:
                            key = edges | {e}
                            if res.get(key, limit + 1) > c + c2 and nxt.get(key, limit + 1) > c + c2:
                                nxt[key] = c + c2
                        tick()
                for edges, c in nxt.items():
                    _add(res, edges, c)
                if not nxt:
                    break
                frontier = nxt
        out = {}
        for edges, c in res.items():
            n = Node(edges) if edges else NIL_NODE
            if out.get(n, limit + 1) > c:
                out[n] = c
        memo[key] = out
        return out

    def child_outputs(label, d):
        if FALSE in label:
            return {}
        if d >= md + 1:
            return {NIL_NODE: 0}
        return state(label, d)

    return state(frozenset([f]), 0)


def _add(res, edges, c):
    if res.get(edges, 10**9) > c:
        res[edges] = c


def prime_2s(f, alphabet=None, method="auto", cap=20000):
    """2S primality; "auto" runs ConPro and falls back to "lower" past the cap."""
    alphabet = _alphabet(f, alphabet)
    if classify(f, alphabet).min_ns > 2:
        raise FragmentError(f"{show(f, alphabet)} is not in L_2S")
    if method == "auto":
        try:
            return prime_2s(f, alphabet, "conpro", cap)
        except ResourceLimit:
            method = "lower"
    if method == "lower":
        if not sat_hml(f, alphabet):
            return PrimeVerdict(True)
        p = least_model_below(f, _frag("2S"), alphabet)
        return PrimeVerdict(p is not None, None if p is None else term(p))
    outs = sorted(conpro_outputs(f, alphabet, cap), key=lambda n: (node_size(n), n.text()))
    if not outs:
        return PrimeVerdict(True)
    for i, p in enumerate(outs):
        for q in outs[i:]:
            g = mlb_node(p, q)
            if g is None or not model_check(g, f):
                return PrimeVerdict(False, counterexample=(p.text(), q.text()), nodes=len(outs))
    g = outs[0]
    for q in outs[1:]:
        g = mlb_node(g, q)
    if not model_check(g, f):
        raise HmlError("pairwise lower bounds exist but their meet is not a model")
    return PrimeVerdict(True, term(g), nodes=len(outs))


# ---------------------------------------------------------------- dispatch


def _frag(text):
    from .formula import parse_fragment

    return parse_fragment(text)


def decide_prime(f, frag, alphabet=None, rng=None, cap=10**5, trace=None):
    tag = frag.tag
    if tag == "S":
        return prime_s(f, alphabet)
    if tag == "CS":
        return prime_cs(f, alphabet, rng=rng, trace=trace)
    if tag == "RS":
        return prime_rs_bounded(f, alphabet)
    if tag == "TS":
        return prime_ts_fpt(f, alphabet, cap=cap)
    if tag == "NS" and frag.n == 2:
        return prime_2s(f, alphabet)
    if tag == "NS":
        return prime_ns(f, frag.n, alphabet, cap=cap)
    alphabet = _alphabet(f, alphabet)
    if not sat_hml(f, alphabet):
        return PrimeVerdict(True)
    p = least_model_below(f, frag, alphabet, cap)
    return PrimeVerdict(p is not None, None if p is None else term(p))
