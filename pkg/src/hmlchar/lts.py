"""Finite loop-free processes: terms, canonical bisimulation nodes, measures and helpers.

Terms (Nil, Prefix, Sum) are hash-consed, so structurally equal terms are the
same object.  Every term maps to a canonical ``Node``: the set of its
(action, Node) transitions with duplicates merged.  Two finite trees are
bisimilar exactly when their canonical nodes are identical, which is what the
semantic layer works on.
"""

import math
import re
from dataclasses import dataclass
from itertools import combinations

from .errors import ParseError, PreconditionError, ResourceLimit

ACTION_RE = re.compile(r"[A-Za-z0-9_]+")


def parse_alphabet(text):
    """'a,b,c' -> ('a', 'b', 'c'), keeping the given order."""
    acts = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if not ACTION_RE.fullmatch(tok):
            raise ParseError(f"bad action name {tok!r}", text, text.find(tok))
        if tok not in acts:
            acts.append(tok)
    if not acts:
        raise ParseError("empty alphabet", text, 0)
    return tuple(acts)


def action_order(alphabet, actions):
    """Sort actions by alphabet position; unknown ones go last, by name."""
    if alphabet is None:
        return sorted(actions)
    pos = {a: i for i, a in enumerate(alphabet)}
    return sorted(actions, key=lambda a: (pos.get(a, len(pos)), a))


# ---------------------------------------------------------------- nodes


class Node:
    """Canonical process up to bisimilarity (interned)."""

    __slots__ = ("edges", "depth", "_text", "_sorted", "__weakref__")
    _table = {}

    def __new__(cls, edges=()):
        edges = frozenset(edges)
        node = cls._table.get(edges)
        if node is None:
            node = object.__new__(cls)
            node.edges = edges
            node.depth = 1 + max((c.depth for _, c in edges), default=-1)
            node._text = None
            node._sorted = None
            cls._table[edges] = node
        return node

    def initials(self):
        return frozenset(a for a, _ in self.edges)

    def succ(self, a):
        return [c for b, c in self.sorted_edges() if b == a]

    def sorted_edges(self):
        if self._sorted is None:
            self._sorted = sorted(self.edges, key=lambda e: (e[0], e[1].text()))
        return self._sorted

    def text(self):
        if self._text is None:
            parts = sorted(_summand_text(a, c) for a, c in self.edges)
            self._text = " + ".join(parts) if parts else "0"
        return self._text

    def __repr__(self):
        return f"Node({self.text()})"

    def __str__(self):
        return self.text()


def _summand_text(a, c):
    inner = c.text()
    if len(c.edges) > 1:
        inner = f"({inner})"
    return f"{a}.{inner}"


NIL_NODE = Node()


def node_states(node):
    seen = {}
    stack = [node]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen[n] = True
        stack.extend(c for _, c in n.edges)
    return list(seen)


def node_size(node):
    """States plus transitions of the (shared) canonical DAG."""
    states = node_states(node)
    return len(states) + sum(len(s.edges) for s in states)


_sim_memo = {}


def node_sim(p, q):
    """Plain simulation p <=_S q on canonical nodes."""
    key = (p, q)
    hit = _sim_memo.get(key)
    if hit is not None:
        return hit
    if p is q or not p.edges:
        res = True
    elif p.depth > q.depth:
        res = False
    else:
        res = all(any(b == a and node_sim(p2, q2) for b, q2 in q.edges) for a, p2 in p.edges)
    _sim_memo[key] = res
    return res


# ---------------------------------------------------------------- terms


class Process:
    __slots__ = ("_node", "_text", "__weakref__")

    def node(self):
        if self._node is None:
            self._node = _canon(self)
        return self._node

    def __str__(self):
        return show_process(self)

    def __repr__(self):
        return f"Process({show_process(self)})"


class Nil(Process):
    __slots__ = ()
    __match_args__ = ()
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            inst = object.__new__(cls)
            inst._node = None
            inst._text = None
            cls._inst = inst
        return cls._inst


class Prefix(Process):
    __slots__ = ("action", "cont")
    __match_args__ = ("action", "cont")
    _table = {}

    def __new__(cls, action, cont):
        key = (action, cont)
        inst = cls._table.get(key)
        if inst is None:
            inst = object.__new__(cls)
            inst.action = action
            inst.cont = cont
            inst._node = None
            inst._text = None
            cls._table[key] = inst
        return inst


class Sum(Process):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    _table = {}

    def __new__(cls, left, right):
        key = (left, right)
        inst = cls._table.get(key)
        if inst is None:
            inst = object.__new__(cls)
            inst.left = left
            inst.right = right
            inst._node = None
            inst._text = None
            cls._table[key] = inst
        return inst


NIL = Nil()


def psum(parts):
    """Left-nested sum of a list of processes; empty gives 0."""
    parts = list(parts)
    if not parts:
        return NIL
    out = parts[0]
    for p in parts[1:]:
        out = Sum(out, p)
    return out


def _canon(p):
    return Node((a, c.node()) for a, c in transitions(p))


def canon(p):
    """Canonical bisimulation node of a term (nodes pass through)."""
    if isinstance(p, Node):
        return p
    return p.node()


def term(node):
    """A term for a node, summands sorted by their printed form."""
    if isinstance(node, Process):
        return node
    parts = sorted(node.edges, key=lambda e: _summand_text(*e))
    return psum(Prefix(a, term(c)) for a, c in parts)


def show_process(p):
    if isinstance(p, Node):
        return p.text()
    if p._text is None:
        if isinstance(p, Nil):
            p._text = "0"
        elif isinstance(p, Prefix):
            inner = show_process(p.cont)
            if isinstance(p.cont, Sum):
                inner = f"({inner})"
            p._text = f"{p.action}.{inner}"
        else:
            right = show_process(p.right)
            if isinstance(p.right, Sum):
                right = f"({right})"
            p._text = f"{show_process(p.left)} + {right}"
    return p._text


def transitions(p):
    """Syntactic transitions of a term, left to right, without repeats."""
    out = []
    stack = [p]
    while stack:
        t = stack.pop()
        if isinstance(t, Prefix):
            if (t.action, t.cont) not in out:
                out.append((t.action, t.cont))
        elif isinstance(t, Sum):
            stack.append(t.right)
            stack.append(t.left)
    return out


def successors(p, a):
    return {c for b, c in transitions(p) if b == a}


def initials(p):
    if isinstance(p, Node):
        return p.initials()
    return frozenset(a for a, _ in transitions(p))


def depth(p):
    return canon(p).depth


@dataclass(frozen=True)
class ProcessStats:
    depth: int
    size: int
    initials: frozenset


def stats(p):
    seen = set()
    stack = [p]
    trans = 0
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        ts = transitions(t)
        trans += len(ts)
        stack.extend(c for _, c in ts)
    return ProcessStats(depth=depth(p), size=len(seen) + trans, initials=initials(p))


def trim(p, d):
    if d < 0:
        raise PreconditionError("trim depth must be non-negative")
    if d >= depth(p):
        return p
    if d == 0:
        return NIL
    return psum(Prefix(a, trim(c, d - 1)) for a, c in transitions(p))


def _witproc(r1, r2, alphabet):
    acts = action_order(alphabet, r1.initials())
    missing = [a for a in acts if a not in r2.initials()]
    if missing:
        return Node([(missing[0], NIL_NODE)])
    for a in acts:
        for r1p in r1.succ(a):
            targets = r2.succ(a)
            if not any(node_sim(r1p, r2p) for r2p in targets):
                parts = {_witproc(r1p, r2p, alphabet) for r2p in targets}
                return Node((a, w) for w in parts)
    raise PreconditionError("no witness: the first process is simulated by the second")


def witness_process(r1, r2, alphabet=None):
    """Small process below r1 but not simulated by r2 (requires r1 not <=_S r2)."""
    n1, n2 = canon(r1), canon(r2)
    if node_sim(n1, n2):
        raise PreconditionError("no witness: the first process is simulated by the second")
    return term(_witproc(n1, n2, alphabet))


# ---------------------------------------------------------------- enumeration


def tow(k, d):
    """Upper bound on the number of bisimilarity classes of depth <= d."""
    t = 1
    for _ in range(d):
        t = k * 2 ** t
    return t


def _count_subsets(n, w):
    if w is None or w >= n:
        return 2 ** n
    return sum(math.comb(n, i) for i in range(w + 1))


def enumerate_nodes(alphabet, d, w=None, cap=10**5):
    """All canonical nodes of depth <= d (out-degree <= w when w is set)."""
    if d < 0:
        raise PreconditionError("depth bound must be non-negative")
    level = [NIL_NODE]
    for _ in range(d):
        items = [(a, q) for a in alphabet for q in level]
        total = _count_subsets(len(items), w)
        if total > cap:
            raise ResourceLimit(f"process enumeration needs {total} classes (cap {cap})")
        top = len(items) if w is None else min(w, len(items))
        nxt = []
        for size in range(top + 1):
            for combo in combinations(items, size):
                nxt.append(Node(combo))
        level = nxt
    return level


def enumerate_processes(alphabet, d, w=None, cap=10**5):
    for node in enumerate_nodes(alphabet, d, w, cap):
        yield term(node)


# ---------------------------------------------------------------- concrete syntax


_PTOKEN = re.compile(r"[A-Za-z0-9_]+|\S")


def _tokenize(text):
    toks = [(m.group(), m.start()) for m in _PTOKEN.finditer(text)]
    toks.append(("$", len(text)))
    return toks


class _ProcParser:
    def __init__(self, text, alphabet):
        self.text = text
        self.alphabet = alphabet
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.text, pos)
        self.i += 1
        return tok, pos

    def parse(self):
        p = self.sum()
        tok, pos = self.toks[self.i]
        if tok != "$":
            raise ParseError(f"unexpected {tok!r}", self.text, pos)
        return p

    def sum(self):
        p = self.seq()
        while self.peek() == "+":
            self.take()
            p = Sum(p, self.seq())
        return p

    def seq(self):
        tok, pos = self.toks[self.i]
        if tok == "(":
            self.take()
            p = self.sum()
            self.take(")")
            return p
        if ACTION_RE.fullmatch(tok):
            nxt = self.toks[self.i + 1][0]
            if nxt == ".":
                self.take()
                self.take(".")
                if self.alphabet is not None and tok not in self.alphabet:
                    raise ParseError(f"unknown action {tok!r}", self.text, pos)
                return Prefix(tok, self.seq())
            if tok == "0":
                self.take()
                return NIL
        raise ParseError(f"unexpected {tok!r}", self.text, pos)


def parse_process(text, alphabet=None):
    return _ProcParser(text, alphabet).parse()


def process_actions(p):
    acts = set()
    for s in node_states(canon(p)):
        acts.update(s.initials())
    return acts


# ---------------------------------------------------------------- .aut files


_HEADER = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_EDGE = re.compile(r"\s*\(\s*(\d+)\s*,\s*\"([^\"]*)\"\s*,\s*(\d+)\s*\)\s*")


def aut_write(p):
    lines = []
    counter = 1

    def walk(t, src):
        nonlocal counter
        for a, c in transitions(t):
            dst = counter
            counter += 1
            lines.append(f'({src},"{a}",{dst})')
            walk(c, dst)

    walk(p, 0)
    return "\n".join([f"des (0,{len(lines)},{counter})"] + lines)


def aut_read(text):
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ParseError("empty .aut input", text, 0)
    m = _HEADER.fullmatch(rows[0])
    if not m:
        raise ParseError("malformed header", text, 0)
    init, ntrans, nstates = (int(g) for g in m.groups())
    if init >= nstates:
        raise ParseError(f"dangling initial state {init}", text, 0)
    succ = {}
    labels = []
    offset = len(rows[0]) + 1
    for ln in rows[1:]:
        e = _EDGE.fullmatch(ln)
        if not e:
            raise ParseError(f"malformed transition line {ln.strip()!r}", text, offset)
        src, lab, dst = int(e.group(1)), e.group(2), int(e.group(3))
        if src >= nstates or dst >= nstates:
            raise ParseError(f"dangling state index in {ln.strip()!r}", text, offset)
        if not ACTION_RE.fullmatch(lab):
            raise ParseError(f"bad action label {lab!r}", text, offset)
        succ.setdefault(src, []).append((lab, dst))
        if lab not in labels:
            labels.append(lab)
        offset += len(ln) + 1
    if len(rows) - 1 != ntrans:
        raise ParseError(f"header announces {ntrans} transitions, found {len(rows) - 1}", text, 0)

    done = {}
    onstack = set()

    def unfold(s):
        if s in done:
            return done[s]
        if s in onstack:
            raise ParseError(f"cycle detected through state {s}", text, 0)
        onstack.add(s)
        p = psum(Prefix(a, unfold(t)) for a, t in succ.get(s, []))
        onstack.discard(s)
        done[s] = p
        return p

    return unfold(init), tuple(sorted(labels))
