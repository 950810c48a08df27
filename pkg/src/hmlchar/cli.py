"""Command-line front end.

Exit codes: 0 yes, 1 no, 2 usage error, 3 resource limit, 4 parse error.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from .equiv import decide_char_equiv
from .errors import FragmentError, ParseError, PreconditionError, ResourceLimit
from .formula import actions, classify, formula_actions_text, parse_formula, parse_fragment, show
from .lts import aut_read, parse_alphabet, parse_process, process_actions, show_process
from .prime import decide_prime, extract_witness
from .reductions import REDUCTIONS, parse_dimacs
from .rewrite import RewriteTrace
from .sat import extract_model
from .semantics import model_check, parse_relation, preorder

YES, NO, USAGE, RESOURCE, PARSE = 0, 1, 2, 3, 4


class _Out:
    def __init__(self, args, fragment=None):
        self.args = args
        self.fragment = fragment
        self.start = getattr(args, "started", time.perf_counter())

    def emit(self, ok, witness=None, counterexample=None, nodes=0, extra=None):
        if self.args.json:
            rec = {"verdict": "yes" if ok else "no", "fragment": self.fragment}
            if witness is not None:
                rec["witness"] = witness
            if counterexample is not None:
                rec["counterexample"] = counterexample
            if extra:
                rec.update(extra)
            rec["stats"] = {
                "time_ms": round((time.perf_counter() - self.start) * 1000, 3),
                "nodes": nodes,
            }
            print(json.dumps(rec, sort_keys=True))
        else:
            print("yes" if ok else "no")
            if witness is not None:
                print(witness)
            if counterexample is not None:
                if isinstance(counterexample, list):
                    counterexample = "; ".join(map(str, counterexample))
                print("counterexample:", counterexample)
        return YES if ok else NO


def _alphabet(args, texts):
    if args.alphabet:
        return parse_alphabet(args.alphabet)
    acts = set()
    for t in texts:
        acts |= set(formula_actions_text(t))
    alphabet = tuple(sorted(acts)) or ("a",)
    print(f"alphabet inferred: {','.join(alphabet)}", file=sys.stderr)
    return alphabet


def _formula(args, text, frag=None):
    alphabet = _alphabet(args, [text])
    f = parse_formula(text, alphabet)
    if frag is not None and not _member(f, frag, alphabet):
        raise FragmentError(f"{show(f, alphabet)} is not in L_{frag}")
    return f, alphabet


def _member(f, frag, alphabet):
    fs = classify(f, alphabet)
    tag = frag.tag
    if tag == "BS":
        return True
    if tag == "NS":
        return fs.min_ns <= frag.n
    return getattr(fs, tag.lower())


def _process(args, text):
    if args.aut:
        return aut_read(Path(args.aut).read_text())[0]
    return parse_process(text)


def cmd_mc(args):
    p = _process(args, args.process)
    if not args.alphabet:
        acts = set(process_actions(p)) | set(formula_actions_text(args.formula))
        args.alphabet = ",".join(sorted(acts)) or "a"
    f, _ = _formula(args, args.formula)
    return _Out(args).emit(model_check(p, f))


def cmd_sat(args):
    frag = parse_fragment(args.fragment)
    f, alphabet = _formula(args, args.formula, frag)
    p = extract_model(f, alphabet)
    return _Out(args, str(frag)).emit(p is not None, None if p is None else show_process(p))


def _prime(args, need_sat):
    frag = parse_fragment(args.fragment)
    f, alphabet = _formula(args, args.formula, frag)
    trace = RewriteTrace() if args.trace else None
    v = decide_prime(f, frag, alphabet, cap=args.max_classes, trace=trace)
    if trace is not None:
        for line in trace.lines(alphabet):
            print(line, file=sys.stderr)
    ok = v.prime and (v.witness is not None or not need_sat)
    cx = None
    if v.counterexample is not None:
        cx = list(v.counterexample)
    elif need_sat and v.prime and v.witness is None:
        cx = ["unsatisfiable"]
    wit = None if v.witness is None else show_process(v.witness)
    return _Out(args, str(frag)).emit(ok, wit, cx, v.nodes)


def cmd_prime(args):
    return _prime(args, need_sat=False)


def cmd_char(args):
    return _prime(args, need_sat=True)


def cmd_char_equiv(args):
    frag = parse_fragment(args.fragment)
    f, alphabet = _formula(args, args.formula, frag)
    v = decide_char_equiv(f, frag, alphabet)
    wit = None if v.witness is None else show_process(v.witness)
    cx = None if v.characteristic else v.reason
    return _Out(args, str(frag)).emit(v.characteristic, wit, cx)


def cmd_preorder(args):
    rel = parse_relation(args.relation)
    return _Out(args).emit(preorder(rel, parse_process(args.p), parse_process(args.q)))


def cmd_extract(args):
    frag = parse_fragment(args.fragment)
    f, alphabet = _formula(args, args.formula, frag)
    try:
        p = extract_witness(f, frag, alphabet)
    except PreconditionError as e:
        return _Out(args, str(frag)).emit(False, counterexample=str(e))
    return _Out(args, str(frag)).emit(True, show_process(p))


def cmd_reduce(args):
    if args.name not in REDUCTIONS:
        raise FragmentError(f"unknown reduction {args.name!r}; choose from {', '.join(REDUCTIONS)}")
    cnf = parse_dimacs(Path(args.cnf).read_text())
    f = REDUCTIONS[args.name](cnf)
    alphabet = tuple(sorted(actions(f)))
    if args.json:
        print(json.dumps({"reduction": args.name, "formula": show(f, alphabet)}))
    else:
        print(show(f, alphabet))
    return YES


def cmd_oracle(args):
    from .oracle import differential_run, report_lines

    src = args.config
    text = Path(src).read_text() if Path(src).is_file() else src
    cfg = json.loads(text) if text.strip() else {}
    seed = cfg.pop("seed", 0) if isinstance(cfg, dict) else 0
    records = differential_run(seed, cfg)
    for line in report_lines(records):
        print(line)
    bad = sum(r["match"] is False for r in records)
    skipped = sum(r["match"] is None for r in records)
    print(f"{len(records)} cases, {bad} mismatches, {skipped} skipped", file=sys.stderr)
    return YES if bad == 0 else NO


def cmd_fmt(args):
    f, alphabet = _formula(args, args.formula)
    print(show(f, alphabet))
    return YES


def build_parser():
    ap = argparse.ArgumentParser(prog="hmlchar", description="Satisfiability, primality and characteristic formulae for simulation-based logics.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alphabet", help="comma-separated action names")
    common.add_argument("--aut", help="read the process from an Aldebaran .aut file")
    common.add_argument("--trace", action="store_true", help="dump rewrite steps to stderr")
    common.add_argument("--max-classes", type=int, default=10**5, help="enumeration cap")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, *params):
        p = sub.add_parser(name, parents=[common])
        for x in params:
            p.add_argument(x)
        p.set_defaults(fn=fn)

    add("mc", cmd_mc, "process", "formula")
    add("sat", cmd_sat, "fragment", "formula")
    add("prime", cmd_prime, "fragment", "formula")
    add("char", cmd_char, "fragment", "formula")
    add("char-equiv", cmd_char_equiv, "fragment", "formula")
    add("preorder", cmd_preorder, "relation", "p", "q")
    add("extract", cmd_extract, "fragment", "formula")
    add("reduce", cmd_reduce, "name", "cnf")
    add("oracle", cmd_oracle, "config")
    add("fmt", cmd_fmt, "formula")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    args.started = time.perf_counter()
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return PARSE
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return RESOURCE
    except (FragmentError, PreconditionError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
