"""Reductions from propositional problems to satisfiability/primality questions.

A CNF is a tuple of clauses, each clause a tuple of non-zero ints in the
DIMACS convention (v for x_v, -v for its negation).  Variable v maps to the
action ``a{v}`` in the many-action reductions.
"""

import itertools

from .errors import FragmentError, HmlError
from .formula import (
    FALSE, TRUE, ZERO, Box, Diamond, boxes, classify, conj, diamonds, disj, nnf_negate,
    parse_fragment, unfold_zero,
)
from .lts import NIL, Prefix, psum
from .semantics import model_check


# ---------------------------------------------------------------- CNF helpers


def parse_dimacs(text):
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "cp%":
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(tuple(cur))
    return tuple(clauses)


def num_vars(cnf):
    return max((abs(v) for c in cnf for v in c), default=0)


def assignments(cnf, n=None):
    n = num_vars(cnf) if n is None else n
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(v) - 1] == (v > 0) for v in c) for c in cnf):
            yield bits


def count_models(cnf, n=None, stop=None):
    k = 0
    for _ in assignments(cnf, n):
        k += 1
        if stop is not None and k >= stop:
            break
    return k


def all_cnfs(max_vars=3, max_clauses=3):
    """Every CNF over x_1..x_n (n <= max_vars) with up to max_clauses distinct
    non-tautological clauses, each using variables at most once."""
    for n in range(1, max_vars + 1):
        clauses = []
        for signs in itertools.product((0, 1, -1), repeat=n):
            c = tuple((i + 1) * s for i, s in enumerate(signs) if s)
            if c:
                clauses.append(c)
        for m in range(1, max_clauses + 1):
            for combo in itertools.combinations(clauses, m):
                if num_vars(combo) == n:
                    yield combo


def _map_cnf(cnf, pos, neg):
    return conj(disj(pos(v) if v > 0 else neg(-v) for v in c) for c in cnf)


def alphabet_of(n, prefix="a"):
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


# ---------------------------------------------------------------- satisfiability


def sat_to_rs(cnf):
    return _map_cnf(cnf, lambda v: Diamond(f"a{v}", TRUE), lambda v: Box(f"a{v}", FALSE))


def bit_width(n):
    return max(1, n.bit_length())


def _bits(i, width):
    return tuple(format(i, f"0{width}b"))


def sat_to_ts(cnf):
    """Binary-index encoding over the actions {0, 1}."""
    width = bit_width(num_vars(cnf))
    return _map_cnf(
        cnf,
        lambda v: diamonds(_bits(v, width)),
        lambda v: boxes(_bits(v, width)),
    )


# ---------------------------------------------------------------- primality


def sat_to_nonprime_rs(cnf):
    """Satisfiable cnf iff the image is not prime; x_{n+1} is the fresh variable."""
    n = num_vars(cnf)
    fresh = n + 1
    alphabet = alphabet_of(fresh)
    base = _map_cnf(cnf, lambda v: Diamond(f"a{v}", ZERO), lambda v: Box(f"a{v}", FALSE))
    left = conj([base, Box(f"a{fresh}", FALSE)])
    right = conj([Diamond(f"a{fresh}", ZERO)] + [Box(f"a{i}", FALSE) for i in range(1, n + 1)])
    return unfold_zero(disj([left, right]), alphabet), alphabet


def _det_path(bits):
    body = conj([Box("0", FALSE), Box("1", FALSE)])
    for b in reversed(bits):
        other = "1" if b == "0" else "0"
        body = conj([Box(other, FALSE), Diamond(b, body)])
    return body


def ts_literal_paths(n):
    """Variable v (1-based) owns the path 0 b_1..b_k where b is the binary of v-1."""
    width = bit_width(max(n - 1, 0))
    return {v: ("0",) + _bits(v - 1, width) for v in range(1, n + 1)}


def sat_to_nonprime_ts(cnf):
    """Satisfiable cnf iff the image is not prime in L_TS (also used for L_2S)."""
    paths = ts_literal_paths(num_vars(cnf))
    inner = _map_cnf(cnf, lambda v: _det_path(paths[v]), lambda v: boxes(paths[v]))
    nil = conj([Box("0", FALSE), Box("1", FALSE)])
    one = conj([
        Diamond("1", nil), Box("1", Box("0", FALSE)), Box("1", Box("1", FALSE)), Box("0", FALSE),
    ])
    return disj([conj([inner, Box("1", FALSE)]), one])


def uniquesat_to_char(cnf, frag="RS"):
    """Exactly one satisfying assignment iff the image is characteristic in the fragment."""
    frag = parse_fragment(frag) if isinstance(frag, str) else frag
    n = num_vars(cnf)
    if frag.tag == "RS":
        alphabet = alphabet_of(n)
        f = _map_cnf(cnf, lambda v: Diamond(f"a{v}", ZERO), lambda v: Box(f"a{v}", FALSE))
        return unfold_zero(f, alphabet), alphabet
    if frag.tag != "TS":
        raise FragmentError("uniquesat_to_char supports RS and TS")
    paths = ts_literal_paths(n)
    k = len(paths[1]) - 1 if paths else 1
    base = _map_cnf(cnf, lambda v: _det_path(paths[v]), lambda v: boxes(paths[v]))
    parts = [base]
    for ell in range(2, k + 1):
        for rest in itertools.product("01", repeat=ell - 1):
            seq = ("0",) + rest
            tails = itertools.product("01", repeat=k + 1 - ell)
            parts.append(disj([diamonds(seq + t) for t in tails] + [boxes(seq)]))
    parts.append(Box("1", FALSE))
    return conj(parts), ("0", "1")


def uniquesat_witness(cnf, n=None):
    n = num_vars(cnf) if n is None else n
    sols = list(itertools.islice(assignments(cnf, n), 2))
    if len(sols) != 1:
        return None
    return psum([Prefix(f"a{i + 1}", NIL) for i, b in enumerate(sols[0]) if b])


# ---------------------------------------------------------------- validity


def char_fixture(frag, alphabet):
    """(p_ch, phi_ch, phi_nch) used by the validity reduction."""
    frag = parse_fragment(frag) if isinstance(frag, str) else frag
    nil = conj(Box(a, FALSE) for a in alphabet)
    if frag.tag in ("TS",) or (frag.tag == "NS" and frag.n == 2):
        a = alphabet[0]
        rest = [Box(b, FALSE) for b in alphabet if b != a]
        phi_a = conj([Diamond(a, nil), Box(a, nil)] + rest)
        return Prefix(a, NIL), phi_a, TRUE
    return NIL, nil, TRUE


def validity_to_char_equiv(f, frag, alphabet):
    """f valid iff the output is characteristic modulo the fragment's equivalence."""
    frag = parse_fragment(frag) if isinstance(frag, str) else frag
    if frag.tag == "S":
        raise FragmentError("no formula is characteristic modulo simulation equivalence")
    alphabet = tuple(alphabet)
    p_ch, phi_ch, phi_nch = char_fixture(frag, alphabet)
    if not model_check(p_ch, f):
        return phi_nch
    return disj([nnf_negate(f, alphabet), phi_ch])


def validity2s_to_prime_ns(f, n, alphabet):
    """f valid iff the output is prime in L_nS (n >= 3)."""
    if n < 3:
        raise HmlError("the validity reduction targets n >= 3")
    alphabet = tuple(alphabet)
    if not classify(f, alphabet).min_ns <= 2:
        raise FragmentError("input must be in L_2S")
    if not model_check(NIL, f):
        return TRUE
    return disj([ZERO, nnf_negate(f, alphabet)])


REDUCTIONS = {
    "sat-rs": sat_to_rs,
    "sat-ts": sat_to_ts,
    "nonprime-rs": lambda c: sat_to_nonprime_rs(c)[0],
    "nonprime-ts": sat_to_nonprime_ts,
    "uniquesat-rs": lambda c: uniquesat_to_char(c, "RS")[0],
    "uniquesat-ts": lambda c: uniquesat_to_char(c, "TS")[0],
}
