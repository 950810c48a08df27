"""HML formulae: interned AST, parser/printer, fragments, NNF and normal forms.

Formula nodes are hash-consed, so equality is identity and sets of formulae
are cheap.  ``Zero`` is an internal atom standing for the conjunction of
``[a]ff`` over the alphabet; the parser never produces it (it expands the
``0`` token), but the CS rewriting pipeline folds boxes into it and back.
"""

import re
from dataclasses import dataclass

from .errors import FragmentError, ParseError, PreconditionError


class Formula:
    __slots__ = ("_key", "_md", "_size", "__weakref__")
    _table = {}

    def _init(self):
        self._key = None
        self._md = None
        self._size = None

    @property
    def key(self):
        """Printed form, used as the total order on formulae."""
        if self._key is None:
            self._key = show(self)
        return self._key

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return self.key

    def __repr__(self):
        return f"Formula({self.key})"


def _intern(cls, key, fill):
    tkey = (cls, key)
    inst = Formula._table.get(tkey)
    if inst is None:
        inst = object.__new__(cls)
        inst._init()
        fill(inst)
        Formula._table[tkey] = inst
    return inst


class TT(Formula):
    __slots__ = ()
    __match_args__ = ()

    def __new__(cls):
        return _intern(cls, (), lambda i: None)


class FF(Formula):
    __slots__ = ()
    __match_args__ = ()

    def __new__(cls):
        return _intern(cls, (), lambda i: None)


class Zero(Formula):
    """Internal atom: no transitions at all."""

    __slots__ = ()
    __match_args__ = ()

    def __new__(cls):
        return _intern(cls, (), lambda i: None)


class _Modal(Formula):
    __slots__ = ("action", "body")
    __match_args__ = ("action", "body")

    def __new__(cls, action, body):
        def fill(i):
            i.action = action
            i.body = body

        return _intern(cls, (action, body), fill)


class Diamond(_Modal):
    __slots__ = ()


class Box(_Modal):
    __slots__ = ()


class _Binary(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __new__(cls, left, right):
        def fill(i):
            i.left = left
            i.right = right

        return _intern(cls, (left, right), fill)


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Not(Formula):
    __slots__ = ("body",)
    __match_args__ = ("body",)

    def __new__(cls, body):
        def fill(i):
            i.body = body

        return _intern(cls, (body,), fill)


TRUE = TT()
FALSE = FF()
ZERO = Zero()


def conj(parts):
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def flatten_and(f):
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def flatten_or(f):
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Or):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def zero_macro(alphabet):
    return conj(Box(a, FALSE) for a in alphabet)


def boxes(a, n=1, body=FALSE):
    """[a]...[a]body with a a single action or a sequence of actions."""
    seq = [a] * n if isinstance(a, str) else list(a)
    for b in reversed(seq):
        body = Box(b, body)
    return body


def diamonds(seq, body=TRUE):
    for b in reversed(list(seq)):
        body = Diamond(b, body)
    return body


# ---------------------------------------------------------------- measures


def modal_depth(f):
    if f._md is None:
        if isinstance(f, (TT, FF)):
            f._md = 0
        elif isinstance(f, Zero):
            f._md = 1
        elif isinstance(f, _Modal):
            f._md = 1 + modal_depth(f.body)
        elif isinstance(f, _Binary):
            f._md = max(modal_depth(f.left), modal_depth(f.right))
        else:
            f._md = modal_depth(f.body)
    return f._md


def size(f):
    """Number of AST nodes (tree count, not DAG count)."""
    if f._size is None:
        if isinstance(f, (TT, FF, Zero)):
            f._size = 1
        elif isinstance(f, _Binary):
            f._size = 1 + size(f.left) + size(f.right)
        else:
            f._size = 1 + size(f.body)
    return f._size


def subformulae(f):
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, _Binary):
            stack += [g.left, g.right]
        elif isinstance(g, (_Modal, Not)):
            stack.append(g.body)
    return seen


def actions(f):
    return {g.action for g in subformulae(f) if isinstance(g, _Modal)}


# ---------------------------------------------------------------- NNF


def nnf(f, alphabet=None):
    """Push negations to the leaves; Not disappears entirely."""
    return _nnf(f, False, alphabet, {})


def nnf_negate(f, alphabet=None):
    return _nnf(f, True, alphabet, {})


def _nnf(f, neg, alphabet, memo):
    key = (f, neg)
    if key in memo:
        return memo[key]
    if isinstance(f, TT):
        out = FALSE if neg else TRUE
    elif isinstance(f, FF):
        out = TRUE if neg else FALSE
    elif isinstance(f, Zero):
        if not neg:
            out = ZERO
        elif alphabet is None:
            raise PreconditionError("negating 0 needs an alphabet")
        else:
            out = disj(Diamond(a, TRUE) for a in alphabet)
    elif isinstance(f, Not):
        out = _nnf(f.body, not neg, alphabet, memo)
    elif isinstance(f, Diamond):
        body = _nnf(f.body, neg, alphabet, memo)
        out = Box(f.action, body) if neg else Diamond(f.action, body)
    elif isinstance(f, Box):
        body = _nnf(f.body, neg, alphabet, memo)
        out = Diamond(f.action, body) if neg else Box(f.action, body)
    else:
        l = _nnf(f.left, neg, alphabet, memo)
        r = _nnf(f.right, neg, alphabet, memo)
        if isinstance(f, And):
            out = Or(l, r) if neg else And(l, r)
        else:
            out = And(l, r) if neg else Or(l, r)
    memo[key] = out
    return out


def fold_zero(f, alphabet):
    """Replace every conjunction group containing all [a]ff by the Zero atom."""
    want = {Box(a, FALSE) for a in alphabet}
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, And):
            parts = [go(p) for p in flatten_and(g)]
            if want <= set(parts):
                rest = []
                for p in parts:
                    if p not in want and p not in rest:
                        rest.append(p)
                out = conj([ZERO] + rest)
            else:
                out = conj(parts)
        elif isinstance(g, Or):
            out = Or(go(g.left), go(g.right))
        elif isinstance(g, _Modal):
            out = type(g)(g.action, go(g.body))
        elif isinstance(g, Not):
            out = Not(go(g.body))
        else:
            out = g
        if len(alphabet) == 1 and out is Box(alphabet[0], FALSE):
            out = ZERO
        memo[g] = out
        return out

    return go(f)


def unfold_zero(f, alphabet):
    z = zero_macro(alphabet)
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, Zero):
            out = z
        elif isinstance(g, _Binary):
            out = type(g)(go(g.left), go(g.right))
        elif isinstance(g, (_Modal,)):
            out = type(g)(g.action, go(g.body))
        elif isinstance(g, Not):
            out = Not(go(g.body))
        else:
            out = g
        memo[g] = out
        return out

    return go(f)


# ---------------------------------------------------------------- fragments


@dataclass(frozen=True, order=True)
class Fragment:
    tag: str
    n: int = 0

    def __str__(self):
        return f"{self.n}S" if self.tag == "NS" else self.tag

    @property
    def level(self):
        """Position in the inclusion chain, used for comparisons."""
        return {"S": 0, "CS": 1, "RS": 2, "TS": 3}.get(self.tag, 3 + self.n if self.tag == "NS" else 10**6)


S = Fragment("S")
CS = Fragment("CS")
RS = Fragment("RS")
TS = Fragment("TS")
BS = Fragment("BS")


def NS(n):
    if n < 1:
        raise ValueError("nesting level must be >= 1")
    return S if n == 1 else Fragment("NS", n)


def parse_fragment(text):
    t = text.strip().upper()
    if t in ("S", "CS", "RS", "TS", "BS"):
        return Fragment(t)
    m = re.fullmatch(r"(\d+)S", t)
    if m:
        return NS(int(m.group(1)))
    raise ParseError(f"unknown fragment {text!r}", text, 0)


class FragmentSet:
    """Result of classify: which fragment grammars generate a formula."""

    def __init__(self, s, cs, rs, ts, min_ns):
        self.s, self.cs, self.rs, self.ts = s, cs, rs, ts
        self.min_ns = min_ns

    def __contains__(self, frag):
        if frag.tag == "BS":
            return True
        if frag.tag == "NS":
            return frag.n >= self.min_ns
        return {"S": self.s, "CS": self.cs, "RS": self.rs, "TS": self.ts}[frag.tag]

    def tags(self, upto=4):
        out = [t for t, ok in (("S", self.s), ("CS", self.cs), ("RS", self.rs), ("TS", self.ts)) if ok]
        out += [f"{n}S" for n in range(max(2, self.min_ns), upto + 1)]
        return out + ["BS"]

    def least(self):
        for frag, ok in ((S, self.s), (CS, self.cs), (RS, self.rs), (TS, self.ts)):
            if ok:
                return frag
        return NS(self.min_ns)

    def __repr__(self):
        return "{" + ", ".join(self.tags()) + ", ...}"


def _is_box_chain(f):
    while isinstance(f, Box):
        f = f.body
    return isinstance(f, FF)


def _grammar(f, box_ok):
    """Check S-style grammar where box subformulae must satisfy box_ok."""
    ok = {}

    def go(g):
        if g in ok:
            return ok[g]
        if isinstance(g, (TT, FF)):
            r = True
        elif isinstance(g, Zero):
            r = box_ok is not None
        elif isinstance(g, Diamond):
            r = go(g.body)
        elif isinstance(g, Box):
            r = box_ok is not None and box_ok(g)
        elif isinstance(g, _Binary):
            r = go(g.left) and go(g.right)
        else:
            r = False
        ok[g] = r
        return r

    return go(f)


def _cs_ok(f, alphabet):
    if alphabet is None:
        return _grammar(f, None)
    want = {Box(a, FALSE) for a in alphabet}
    ok = {}

    def go(g):
        if g in ok:
            return ok[g]
        if isinstance(g, (TT, FF, Zero)):
            r = True
        elif isinstance(g, Diamond):
            r = go(g.body)
        elif isinstance(g, Box):
            r = len(alphabet) == 1 and g in want
        elif isinstance(g, Or):
            r = go(g.left) and go(g.right)
        elif isinstance(g, And):
            parts = flatten_and(g)
            bx = [p for p in parts if isinstance(p, Box)]
            r = all(go(p) for p in parts if not isinstance(p, Box))
            if bx:
                r = r and set(bx) <= want and want <= set(bx)
        else:
            r = False
        ok[g] = r
        return r

    return go(f)


_INF = 10**9


def _nesting(f):
    """Least n with f in L_nS, for f in NNF."""
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, (TT, FF)):
            d = b = 1
        elif isinstance(g, Zero):
            d, b = 2, 1
        elif isinstance(g, Diamond):
            d, b = go(g.body)[0], _INF
        elif isinstance(g, Box):
            d, b = _INF, go(g.body)[1]
        else:
            (dl, bl), (dr, br) = go(g.left), go(g.right)
            d, b = max(dl, dr), max(bl, br)
        d, b = min(d, b + 1), min(b, d + 1)
        memo[g] = (d, b)
        return d, b

    return go(f)[0]


def classify(f, alphabet=None):
    """Fragments whose grammar generates f (after NNF)."""
    g = nnf(f, alphabet)
    s = _grammar(g, None) and not any(isinstance(x, Zero) for x in subformulae(g))
    cs = _cs_ok(g, alphabet)
    rs = _grammar(g, lambda b: b.body is FALSE)
    ts = _grammar(g, _is_box_chain)
    return FragmentSet(s, cs, rs, ts, _nesting(g))


def require(f, frag, alphabet=None):
    if frag not in classify(f, alphabet):
        raise FragmentError(f"{show(f, alphabet)} is not in L_{frag}")


# ---------------------------------------------------------------- normal forms


def to_dnf(f):
    """Lazily yield disjunction-free disjuncts (diamonds and ands distributed)."""
    if isinstance(f, (TT, FF, Zero)):
        yield f
    elif isinstance(f, Diamond):
        for d in to_dnf(f.body):
            yield Diamond(f.action, d)
    elif isinstance(f, Box):
        if not _is_box_chain(f):
            raise FragmentError(f"to_dnf: box {show(f)} is not a chain ending in ff")
        yield f
    elif isinstance(f, Or):
        yield from to_dnf(f.left)
        yield from to_dnf(f.right)
    elif isinstance(f, And):
        for l in to_dnf(f.left):
            for r in to_dnf(f.right):
                yield And(l, r)
    else:
        raise FragmentError("to_dnf: negation is not allowed")


def disjunctive_form(f):
    """Distribute outermost conjunctions over disjunctions; modalities are opaque."""
    if isinstance(f, Or):
        yield from disjunctive_form(f.left)
        yield from disjunctive_form(f.right)
    elif isinstance(f, And):
        for l in disjunctive_form(f.left):
            for r in disjunctive_form(f.right):
                yield And(l, r)
    else:
        yield f


# ---------------------------------------------------------------- printer


def show(f, alphabet=None):
    zero = zero_macro(alphabet) if alphabet else None
    return _show(f, 0, zero)


def _show(f, prec, zero):
    if zero is not None and f is zero:
        return "0"
    if isinstance(f, TT):
        return "tt"
    if isinstance(f, FF):
        return "ff"
    if isinstance(f, Zero):
        return "0"
    if isinstance(f, Diamond):
        return f"<{f.action}>{_show(f.body, 2, zero)}"
    if isinstance(f, Box):
        return f"[{f.action}]{_show(f.body, 2, zero)}"
    if isinstance(f, Not):
        return f"!{_show(f.body, 2, zero)}"
    mine, op = (1, " & ") if isinstance(f, And) else (0, " | ")
    text = _show(f.left, mine, zero) + op + _show(f.right, mine + 1, zero)
    return f"({text})" if prec > mine else text


# ---------------------------------------------------------------- parser


_FTOKEN = re.compile(r"<\s*([A-Za-z0-9_]+)\s*>|\[\s*([A-Za-z0-9_]+)\s*\]|[A-Za-z0-9_]+|\S")


class _FormulaParser:
    def __init__(self, text, alphabet):
        self.text = text
        self.alphabet = alphabet
        self.toks = []
        for m in _FTOKEN.finditer(text):
            if m.group(1) is not None:
                self.toks.append(("<>", m.group(1), m.start()))
            elif m.group(2) is not None:
                self.toks.append(("[]", m.group(2), m.start()))
            else:
                self.toks.append((m.group(), None, m.start()))
        self.toks.append(("$", None, len(text)))
        self.i = 0

    def err(self, msg):
        raise ParseError(msg, self.text, self.toks[self.i][2])

    def parse(self):
        f = self.disj()
        if self.toks[self.i][0] != "$":
            self.err(f"unexpected {self.toks[self.i][0]!r}")
        return f

    def disj(self):
        f = self.conj()
        while self.toks[self.i][0] == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.toks[self.i][0] == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def action(self, act):
        if self.alphabet is not None and act not in self.alphabet:
            self.err(f"unknown action {act!r}")
        return act

    def unary(self):
        tok, act, _ = self.toks[self.i]
        if tok == "!":
            self.i += 1
            return Not(self.unary())
        if tok == "<>":
            a = self.action(act)
            self.i += 1
            return Diamond(a, self.unary())
        if tok == "[]":
            a = self.action(act)
            self.i += 1
            return Box(a, self.unary())
        if tok == "tt":
            self.i += 1
            return TRUE
        if tok == "ff":
            self.i += 1
            return FALSE
        if tok == "0":
            if self.alphabet is None:
                self.err("the 0 macro needs an alphabet")
            self.i += 1
            return zero_macro(self.alphabet)
        if tok == "(":
            self.i += 1
            f = self.disj()
            if self.toks[self.i][0] != ")":
                self.err("expected ')'")
            self.i += 1
            return f
        self.err(f"unexpected {tok!r}")


def parse_formula(text, alphabet=None):
    return _FormulaParser(text, alphabet).parse()


def formula_actions_text(text):
    """Actions mentioned in formula text (used to infer an alphabet)."""
    acts = []
    for m in _FTOKEN.finditer(text):
        a = m.group(1) or m.group(2)
        if a and a not in acts:
            acts.append(a)
    return acts
