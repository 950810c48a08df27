"""Characteristic formulae of finite processes.

``char_formula(p, X)`` has as models exactly the q with p <=_X q.
``below_formula(p, X)`` has as models exactly the q with q <=_X p, so the
conjunction of the two pins down the ==_X class of p.
"""

from .formula import FALSE, Box, Diamond, boxes, conj, diamonds, disj, zero_macro
from .lts import canon
from .semantics import trace_node


def char_formula(p, frag, alphabet):
    """A formula whose models are exactly the processes above p in the fragment's preorder."""
    p = canon(p)
    tag = frag.tag
    if tag == "NS":
        return _chi_ns(frag.n, p, alphabet, {})
    memo = {}

    def chi(n):
        if n in memo:
            return memo[n]
        parts = [Diamond(a, chi(c)) for a, c in n.sorted_edges()]
        if tag == "CS" and not n.edges:
            parts.append(zero_macro(alphabet))
        elif tag == "RS":
            parts += [Box(a, FALSE) for a in alphabet if a not in n.initials()]
        elif tag == "TS":
            parts += _forbidden_traces(n, alphabet)
        elif tag == "BS":
            for a in alphabet:
                parts.append(Box(a, disj(chi(c) for c in n.succ(a))))
        out = conj(parts)
        memo[n] = out
        return out

    return chi(p)


def _forbidden_traces(n, alphabet):
    out = []

    def walk(t, prefix):
        for b in alphabet:
            kids = [c for a, c in t.edges if a == b]
            if kids:
                walk(kids[0], prefix + (b,))
            else:
                out.append(boxes(prefix + (b,)))

    walk(trace_node([n]), ())
    return out


def _chi_ns(n, p, alphabet, memo):
    """chi^n: models are the q with p <=_nS q."""
    key = ("chi", n, p)
    if key in memo:
        return memo[key]
    if n == 1:
        out = char_formula(p, _S_FRAG, alphabet)
    else:
        out = conj([Diamond(a, _chi_ns(n, c, alphabet, memo)) for a, c in p.sorted_edges()]
                   + [_delta(n - 1, p, alphabet, memo)])
    memo[key] = out
    return out


def _delta(n, p, alphabet, memo):
    """delta^n: models are the q with q <=_nS p."""
    key = ("delta", n, p)
    if key in memo:
        return memo[key]
    parts = [Box(a, disj(_delta(n, c, alphabet, memo) for c in p.succ(a))) for a in alphabet]
    if n > 1:
        parts.append(_chi_ns(n - 1, p, alphabet, memo))
    out = conj(parts)
    memo[key] = out
    return out


class _SFrag:
    tag = "S"
    n = 1


_S_FRAG = _SFrag()




def _maximal_traces(n):
    out = []

    def walk(t, prefix):
        if not t.edges:
            out.append(prefix)
        for a, c in t.sorted_edges():
            walk(c, prefix + (a,))

    walk(trace_node([n]), ())
    return out


def below_formula(p, frag, alphabet):
    """A formula whose models are exactly the processes below p in the fragment's preorder."""
    p = canon(p)
    tag = frag.tag
    if tag == "NS":
        return _delta(frag.n, p, alphabet, {})
    if tag == "BS":
        return char_formula(p, frag, alphabet)
    memo = {}

    def down(n):
        if n in memo:
            return memo[n]
        parts = [Box(a, disj(down(c) for c in n.succ(a))) for a in alphabet]
        if tag == "CS" and n.edges:
            parts.append(disj(Diamond(a, conj([])) for a in alphabet))
        elif tag == "RS":
            parts += [Diamond(a, conj([])) for a in n.initials()]
        elif tag == "TS":
            parts += [diamonds(w) for w in _maximal_traces(n) if w]
        out = conj(parts)
        memo[n] = out
        return out

    return down(p)
