"""The charnse and primensp games, solved by memoized exhaustive search.

Positions hold the resolved label sets of the current states.  Resolving a
label (the B/A moves on conjunctions and disjunctions) is compiled into a
choice among the satisfiable disjuncts of the disjunctive form of its
conjunction.
"""

import itertools

from .charform import below_formula, char_formula
from .errors import PreconditionError, ResourceLimit
from .formula import NS, And, Box, Diamond, Or, conj, modal_depth, nnf, subformulae, unfold_zero
from .prime import conpro_outputs
from .sat import entails, model_node, sat_hml
from .semantics import NestedSim, node_preorder


class _Solver:
    def __init__(self, alphabet, cap=200000):
        self.alphabet = tuple(alphabet)
        self.cap = cap
        self.work = 0
        self.res_memo = {}
        self.sim_memo = {}
        self.sat_memo = {}

    def tick(self):
        self.work += 1
        if self.work > self.cap:
            raise ResourceLimit("game search exceeded its position cap")

    def sat(self, lits):
        hit = self.sat_memo.get(lits)
        if hit is None:
            hit = sat_hml(conj(sorted(lits)), self.alphabet)
            self.sat_memo[lits] = hit
        return hit

    def resolutions(self, label):
        """Satisfiable disjuncts of DF(conjunction of label), as literal sets."""
        label = frozenset(label)
        hit = self.res_memo.get(label)
        if hit is not None:
            return hit
        out = []

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

        for lits in expand(tuple(sorted(label)), frozenset()):
            if lits not in out and self.sat(lits):
                out.append(lits)
        out.sort(key=lambda s: sorted(g.key for g in s))
        self.res_memo[label] = out
        return out

    def boxed(self, lits, a):
        return frozenset(g.body for g in lits if isinstance(g, Box) and g.action == a)

    def diamond_children(self, lits):
        return [
            (g.action, frozenset({g.body}) | self.boxed(lits, g.action))
            for g in sorted(lits) if isinstance(g, Diamond)
        ]

    # ------------------------------------------------------------ charnse

    def sim(self, n, u1, u2):
        """A wins Sim^n(u1, u2): every model of u1 is n-nested-simulated by every model of u2."""
        key = (n, u1, u2)
        hit = self.sim_memo.get(key)
        if hit is not None:
            return hit
        self.tick()
        r1s, r2s = self.resolutions(u1), self.resolutions(u2)
        if not r1s or not r2s:
            out = True
        elif n > 1 and not (self.sim(n - 1, u1, u2) and self.sim(n - 1, u2, u1)):
            out = False
        else:
            out = all(self.round(n, r1, r2) for r1 in r1s for r2 in r2s)
        self.sim_memo[key] = out
        return out

    def round(self, n, r1, r2):
        key = ("round", n, r1, r2)
        hit = self.sim_memo.get(key)
        if hit is not None:
            return hit
        self.tick()
        kids1 = self.diamond_children(r1)
        kids1 += [(a, self.boxed(r1, a)) for a in self.alphabet]
        kids2 = self.diamond_children(r2)
        out = True
        for a, lab1 in kids1:
            for c1 in self.resolutions(lab1):
                if not any(
                    b == a and all(self.step_ok(n, c1, c2) for c2 in self.resolutions(lab2))
                    for b, lab2 in kids2
                ):
                    out = False
                    break
            if not out:
                break
        self.sim_memo[key] = out
        return out

    def step_ok(self, n, c1, c2):
        if n > 1 and not (self.sim(n - 1, c1, c2) and self.sim(n - 1, c2, c1)):
            return False
        return self.round(n, c1, c2)

    # ------------------------------------------------------------ primensp

    def prime_game(self, n, f):
        self.subs = sorted(subformulae(f))
        self.md = modal_depth(f)
        self.n = n
        self.sub_memo = {}
        top = frozenset([f])
        if not self.sim(n - 1, top, top):
            return False
        for r1 in self.resolutions(top):
            for r2 in self.resolutions(top):
                if not any(self.prime_round(r1, r2, q, 2) for q in self.resolutions(self.a_sub(top))):
                    return False
        return True

    def a_sub(self, label):
        hit = self.sub_memo.get(label)
        if hit is None:
            c = conj(sorted(label))
            hit = label | frozenset(g for g in self.subs if entails(c, g, self.alphabet))
            self.sub_memo[label] = hit
        return hit

    def prime_round(self, r1, r2, q, level):
        key = ("prime", r1, r2, q, level)
        hit = self.sim_memo.get(key)
        if hit is not None:
            return hit
        self.tick()
        p1_kids = self.diamond_children(r1)
        p2_kids = self.diamond_children(r2)
        q_kids = self.diamond_children(q)
        q_opts = [self.resolutions(self.a_sub(lab)) for _, lab in q_kids]
        if any(not o for o in q_opts):
            out = False
        else:
            out = True
            p_opts = [self.resolutions(lab) for _, lab in p1_kids + p2_kids]
            for rho in _product(p_opts, self):
                c1 = list(zip((a for a, _ in p1_kids), rho[:len(p1_kids)]))
                c2 = list(zip((a for a, _ in p2_kids), rho[len(p1_kids):]))
                if not any(self.q_choice_ok(sigma, q_kids, c1, c2, level)
                           for sigma in _product(q_opts, self)):
                    out = False
                    break
        self.sim_memo[key] = out
        return out

    def q_choice_ok(self, sigma, q_kids, c1, c2, level):
        kept = _remove_dominated([(a, lab) for (a, _), lab in zip(q_kids, sigma)])
        n = self.n
        for a, qq in kept:
            found = False
            for b1, x1 in c1:
                if b1 != a or not (self.sim(n - 1, qq, x1) and self.sim(n - 1, x1, qq)):
                    continue
                for b2, x2 in c2:
                    if b2 != a or not (self.sim(n - 1, qq, x2) and self.sim(n - 1, x2, qq)):
                        continue
                    if level >= self.md + 2:
                        continue
                    if self.prime_round(x1, x2, qq, level + 1):
                        found = True
                        break
                if found:
                    break
            if not found:
                return False
        return True


def _product(opts, solver):
    for combo in itertools.product(*opts):
        solver.tick()
        yield combo


def _remove_dominated(kids):
    kept = list(kids)
    i = 0
    while i < len(kept):
        a, lab = kept[i]
        if any(j != i and b == a and lab <= other for j, (b, other) in enumerate(kept)):
            del kept[i]
        else:
            i += 1
    return kept


def _prep(f, alphabet):
    return nnf(unfold_zero(f, alphabet), alphabet)


def solve_charnse(n, u1, u2, alphabet, cap=200000):
    """True iff p1 <=_nS p2 for every p1 |= /\\u1 and p2 |= /\\u2."""
    if n < 1:
        raise ValueError("nesting level must be >= 1")
    alphabet = tuple(alphabet)
    u1 = frozenset(_prep(f, alphabet) for f in u1)
    u2 = frozenset(_prep(f, alphabet) for f in u2)
    s = _Solver(alphabet, cap)
    if not s.resolutions(u1) or not s.resolutions(u2):
        raise PreconditionError("charnse needs satisfiable label sets")
    return s.sim(n, u1, u2)


def solve_primensp(n, f, alphabet, cap=200000):
    """True iff A wins the primensp game, i.e. f is characteristic within L_nS."""
    if n < 3:
        raise ValueError("the primensp game needs n >= 3")
    alphabet = tuple(alphabet)
    g = _prep(f, alphabet)
    if not sat_hml(g, alphabet):
        raise PreconditionError("primensp needs a satisfiable formula")
    return _Solver(alphabet, cap).prime_game(n, g)


def equiv_models_2s(f, alphabet, method="formula", cap=20000):
    """True iff all models of f are 2-nested-simulation equivalent.

    "formula" checks f |= chi(m) & below(m) for one tableau model m; "conpro"
    compares all ConPro outputs pairwise and is exponential in |f|.
    """
    alphabet = tuple(alphabet)
    if method == "conpro":
        outs = sorted(conpro_outputs(f, alphabet, cap), key=lambda n: n.text())
        rel = NestedSim(2)
        return all(node_preorder(rel, outs[0], q) and node_preorder(rel, q, outs[0]) for q in outs[1:])
    m = model_node(f, alphabet)
    if m is None:
        return True
    frag = NS(2)
    return entails(f, conj([char_formula(m, frag, alphabet), below_formula(m, frag, alphabet)]), alphabet)
