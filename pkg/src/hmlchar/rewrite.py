"""Rewriting systems over formulae: ff/tt elimination, zero normal form,
diamond collapse, propositional abstraction and saturation.

Positions are paths through the AC-flattened tree: at an ``And`` or ``Or``
node index i selects the i-th operand of the flattened operand list, at a
modality index 0 selects the body.  All rewrites are driven by one step engine
so every normal form can be traced and replayed.
"""

from dataclasses import dataclass, field

from .errors import HmlError, PreconditionError
from .formula import (
    FALSE, TRUE, ZERO, And, Box, Diamond, Or, Zero, conj, disj,
    flatten_and, flatten_or, fold_zero, show, size, unfold_zero,
)
from .sat import EMPTY, initials_family, j_family, sat_hml

# ---------------------------------------------------------------- positions and traces


def _ops(f):
    if isinstance(f, And):
        return flatten_and(f)
    if isinstance(f, Or):
        return flatten_or(f)
    if isinstance(f, (Diamond, Box)):
        return [f.body]
    return []


def _rebuild(f, ops):
    if isinstance(f, And):
        return conj(ops) if ops else TRUE
    if isinstance(f, Or):
        return disj(ops) if ops else FALSE
    return type(f)(f.action, ops[0])


def get_at(f, path):
    for i in path:
        f = _ops(f)[i]
    return f


def replace_at(f, path, g):
    if not path:
        return g
    ops = _ops(f)
    ops[path[0]] = replace_at(ops[path[0]], path[1:], g)
    return _rebuild(f, ops)


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def add(self, rule, path, before, after):
        self.steps.append((rule, tuple(path), before, after))

    def replay(self, f):
        for rule, path, before, after in self.steps:
            if get_at(f, path) is not before:
                raise HmlError(f"trace step {rule} does not match at {path}")
            f = replace_at(f, path, after)
        return f

    def lines(self, alphabet=None):
        for rule, path, before, after in self.steps:
            pos = ".".join(map(str, path)) or "root"
            yield f"{rule}\t{pos}\t{show(before, alphabet)}\t{show(after, alphabet)}"


# ---------------------------------------------------------------- step engine


def _normalize(f, rules, rng=None, trace=None, innermost=False, limit=None):
    """Rewrite to a fixed point, one rule instance per step.

    ``rules(g)`` lists the (name, result) pairs applicable at node g.  By default
    the leftmost-innermost redex is taken; with an rng a random redex (and a
    random rule at it) is taken instead.
    """
    limit = limit or 4 * size(f) + 16
    memo = {}

    def redexes(g, path, out):
        """Collect redex paths below g; returns True if any was found."""
        hit = memo.get(g)
        if hit is False:
            return False
        found = False
        for i, h in enumerate(_ops(g)):
            if redexes(h, path + (i,), out):
                found = True
        here = rules(g)
        if here and (not innermost or not found):
            out.append((path, g, here))
            found = True
        memo[g] = found
        return found

    for _ in range(limit):
        cands = []
        redexes(f, (), cands)
        if not cands:
            return f
        if rng is None:
            paths = [c[0] for c in cands]
            inner = [c for c in cands
                     if not any(len(p) > len(c[0]) and p[:len(c[0])] == c[0] for p in paths)]
            path, g, here = min(inner, key=lambda c: c[0])
            name, new = here[0]
        else:
            path, g, here = rng.choice(cands)
            name, new = rng.choice(here)
        if trace is not None:
            trace.add(name, path, g, new)
        f = replace_at(f, path, new)
    raise HmlError("rewriting did not reach a fixed point")


# ---------------------------------------------------------------- ff and tt rules


def _ff_rules(g):
    if isinstance(g, Diamond) and g.body is FALSE:
        return [("ff-diamond", FALSE)]
    if isinstance(g, Or):
        ops = flatten_or(g)
        if FALSE in ops:
            i = ops.index(FALSE)
            return [("ff-or", disj(ops[:i] + ops[i + 1:]))]
    if isinstance(g, And) and FALSE in flatten_and(g):
        return [("ff-and", FALSE)]
    return []


def _tt_rules(g):
    if isinstance(g, And):
        ops = flatten_and(g)
        if TRUE in ops:
            i = ops.index(TRUE)
            return [("tt-and", conj(ops[:i] + ops[i + 1:]))]
    if isinstance(g, Or) and TRUE in flatten_or(g):
        return [("tt-or", TRUE)]
    return []


def _diamond_rules(g):
    if isinstance(g, Diamond) and g.body is TRUE:
        return [("diamond-tt", TRUE)]
    return _tt_rules(g)


def eliminate_ff(f, trace=None, rng=None):
    return _normalize(f, _ff_rules, rng, trace)


def eliminate_tt(f, trace=None, rng=None):
    return _normalize(f, _tt_rules, rng, trace)


def diamond_collapse(f, trace=None, rng=None):
    return _normalize(f, _diamond_rules, rng, trace)


# ---------------------------------------------------------------- zero normal form


def _has_zero_disjunct(g):
    return isinstance(g, Or) and ZERO in flatten_or(g)


def _strip_zero(g):
    return disj(h for h in flatten_or(g) if h is not ZERO)


def _zero_rules(g):
    out = []
    if isinstance(g, Or):
        ops = flatten_or(g)
        if ops.count(ZERO) > 1:
            i = len(ops) - 1 - ops[::-1].index(ZERO)
            out.append(("zero-1", disj(ops[:i] + ops[i + 1:])))
        return out
    if not isinstance(g, And):
        return out
    ops = flatten_and(g)
    if ZERO in ops:
        return [("zero-2", ZERO)]
    zs = [i for i, h in enumerate(ops) if _has_zero_disjunct(h)]
    if not zs:
        return out
    blocking = [j for j, h in enumerate(ops) if EMPTY not in j_family(h)]
    for i in zs:
        if any(j != i for j in blocking):
            new = list(ops)
            new[i] = _strip_zero(ops[i])
            out.append(("zero-3", conj(new)))
    for x in range(len(zs)):
        for y in range(x + 1, len(zs)):
            i, j = zs[x], zs[y]
            merged = Or(ZERO, And(_strip_zero(ops[i]), _strip_zero(ops[j])))
            new = [merged if k == i else h for k, h in enumerate(ops) if k != j]
            out.append(("zero-4", conj(new)))
    return out


def _ac_key(g):
    return (0 if g is ZERO else 1, g.key)


def ac_sort(f):
    """Canonical representative modulo associativity and commutativity."""
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, (And, Or)):
            ops = sorted((go(h) for h in _ops(g)), key=_ac_key)
            out = _rebuild(g, ops)
        elif isinstance(g, (Diamond, Box)):
            out = type(g)(g.action, go(g.body))
        else:
            out = g
        memo[g] = out
        return out

    return go(f)


def _check_zero_pre(f):
    if f is TRUE:
        return

    def go(g, guarded):
        if g is TRUE and not guarded:
            raise PreconditionError("tt occurs outside the scope of a diamond")
        if not j_family(g):
            raise PreconditionError(f"unsatisfiable subformula {show(g)}")
        if isinstance(g, Box):
            raise PreconditionError("zero normal form expects a folded L_CS formula")
        for h in _ops(g):
            go(h, guarded or isinstance(g, Diamond))

    go(f, False)


def zero_normal_form(f, alphabet=None, trace=None, rng=None):
    """Innermost application of the four zero rules, modulo AC.

    With an alphabet the 0 macro is folded on entry and unfolded on exit.
    """
    g = fold_zero(f, alphabet) if alphabet else f
    _check_zero_pre(g)
    g = _normalize(g, _zero_rules, rng, trace, innermost=True)
    h = ac_sort(g)
    if trace is not None and h is not g:
        trace.add("ac-order", (), g, h)
    return unfold_zero(h, alphabet) if alphabet else h


# ---------------------------------------------------------------- ConSub


def consub(f, frag, alphabet=None, trace=None):
    """Replace unsatisfiable subformulae by ff and clean up with the ff rules."""
    tag = getattr(frag, "tag", frag)
    if tag == "CS":
        g = fold_zero(f, alphabet) if alphabet else f
        if not j_family(g):
            raise PreconditionError("consub needs a satisfiable formula")

        def dead(h):
            return not j_family(h)
    elif tag == "RS":
        g = f
        if not sat_hml(g, alphabet):
            raise PreconditionError("consub needs a satisfiable formula")

        def dead(h):
            return not sat_hml(h, alphabet)
    else:
        raise PreconditionError(f"consub is defined for CS and RS, not {tag}")

    def walk(h, path):
        if isinstance(h, Box):
            return h
        if h is not FALSE and dead(h):
            if trace is not None:
                trace.add("consub-ff", path, h, FALSE)
            return FALSE
        ops = _ops(h)
        if not ops:
            return h
        new = [walk(x, path + (i,)) for i, x in enumerate(ops)]
        return _rebuild(h, new)

    g = walk(g, ())
    g = eliminate_ff(g, trace)
    if tag == "CS" and alphabet:
        g = unfold_zero(g, alphabet)
    return g


# ---------------------------------------------------------------- propositional abstraction


@dataclass(frozen=True)
class PConst:
    value: bool

    def __str__(self):
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class PVar:
    action: str
    positive: bool = True
    label: object = None

    def __str__(self):
        return f"x_{self.action}" if self.positive else f"!x_{self.action}"


@dataclass(frozen=True)
class PAnd:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class POr:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} | {self.right})"


PTRUE = PConst(True)
PFALSE = PConst(False)


def prop_abstraction(f):
    """Prop(f): diamonds become labelled positive variables, [a]ff negative ones."""
    if f is TRUE:
        return PTRUE
    if f is FALSE:
        return PFALSE
    if isinstance(f, Diamond):
        return PVar(f.action, True, f.body)
    if isinstance(f, Box):
        if f.body is not FALSE:
            raise PreconditionError("only [a]ff boxes have a propositional abstraction")
        return PVar(f.action, False)
    if isinstance(f, And):
        return PAnd(prop_abstraction(f.left), prop_abstraction(f.right))
    if isinstance(f, Or):
        return POr(prop_abstraction(f.left), prop_abstraction(f.right))
    raise PreconditionError(f"no propositional abstraction for {show(f)}")


def concretize(p):
    if isinstance(p, PConst):
        return TRUE if p.value else FALSE
    if isinstance(p, PVar):
        return Diamond(p.action, p.label) if p.positive else Box(p.action, FALSE)
    op = And if isinstance(p, PAnd) else Or
    return op(concretize(p.left), concretize(p.right))


def _kill(p, s):
    """simpl on the abstraction: dead literals become FALSE, then FALSE is absorbed."""
    if isinstance(p, PVar):
        dead = (p.action in s) != p.positive
        return PFALSE if dead else p
    if isinstance(p, PConst):
        return p
    l, r = _kill(p.left, s), _kill(p.right, s)
    if isinstance(p, PAnd):
        if PFALSE in (l, r):
            return PFALSE
        return PAnd(l, r)
    if l == PFALSE:
        return r
    if r == PFALSE:
        return l
    return POr(l, r)


def _family(f, alphabet, unbounded):
    if unbounded:
        s = _conj_singleton(f, alphabet)
        return None if s is None else frozenset([s])
    return initials_family(f, alphabet)


def _conj_singleton(f, alphabet):
    """Initials set of a disjunction-free formula when it is a singleton, else None."""
    if f is TRUE:
        return None if alphabet else frozenset()
    ops = flatten_and(f)
    if any(isinstance(h, Or) for h in ops):
        raise PreconditionError("unbounded saturation expects a disjunction-free formula")
    dia = {h.action for h in ops if isinstance(h, Diamond)}
    box = {h.action for h in ops if isinstance(h, Box)}
    if dia & box or (dia | box) != set(alphabet):
        return None
    return frozenset(dia)


def simplify_saturated(f, s=None, alphabet=None):
    """simpl(f) for a formula whose initials family is the singleton {s}."""
    fam = initials_family(f, alphabet)
    if len(fam) != 1:
        raise PreconditionError(f"{show(f, alphabet)} is not saturated")
    (only,) = fam
    if s is not None and frozenset(s) != only:
        raise PreconditionError(f"initials of {show(f, alphabet)} are not {sorted(s)}")
    return _simpl(f, only)


def _simpl(f, s):
    return concretize(_kill(prop_abstraction(f), s))


def _top_diamonds(f, fn):
    """Rebuild f with fn applied to every diamond not under another diamond."""
    if isinstance(f, Diamond):
        return fn(f)
    if isinstance(f, (And, Or)):
        return type(f)(_top_diamonds(f.left, fn), _top_diamonds(f.right, fn))
    return f


def _check_rs_pre(f, alphabet):
    def go(g):
        if isinstance(g, Box):
            if g.body is not FALSE:
                raise PreconditionError("saturation is defined for L_RS")
            return
        if not sat_hml(g, alphabet):
            raise PreconditionError(f"unsatisfiable subformula {show(g, alphabet)} outside a box")
        for h in _ops(g):
            go(h)

    go(f)


def saturate(f, alphabet, unbounded=False, stats=None):
    """Satur(f): tt, or an equivalent-or-stronger saturated and simplified formula.

    ``unbounded`` switches the singleton test to the syntactic one for
    disjunction-free inputs, which avoids enumerating subsets of the alphabet.
    """
    alphabet = tuple(alphabet)
    if isinstance(f, Zero):
        f = unfold_zero(f, alphabet)
    _check_rs_pre(f, alphabet)
    memo = {}
    counter = [0]

    def single(g):
        fam = _family(g, alphabet, unbounded)
        if fam is None or len(fam) != 1:
            return None
        return next(iter(fam))

    def satur(g):
        if g in memo:
            return memo[g]
        start = g
        bound = size(g) + 2
        for _ in range(bound):
            counter[0] += 1
            old = g
            g = eliminate_tt(g)
            s = single(g)
            if s is None:
                g = TRUE
            else:
                g = _simpl(g, s)

            def sub(d):
                s2 = single(d.body)
                if s2 is None:
                    return TRUE
                return Diamond(d.action, satur(_simpl(d.body, s2)))

            g = _top_diamonds(g, sub)
            if g is old:
                break
        else:
            raise HmlError("saturation did not converge")
        if g is not TRUE:
            g = eliminate_tt(g)
            s = single(g)
            g = TRUE if s is None else _simpl(g, s)
        memo[start] = g
        return g

    out = satur(f)
    if stats is not None:
        stats["iterations"] = counter[0]
    return out
