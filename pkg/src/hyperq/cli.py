"""Command-line front end: ``hyperq {parse,translate,eval,mc,verify}``."""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from hyperq.formula import Atom, Logic, PropQ, children
from hyperq.reductions import ReductionError, translate
from hyperq.semantics import EvalParams, EvaluationError, evaluate
from hyperq.syntax import ParseError, format_file, parse_file_text, print_formula
from hyperq.traces import (
    AlphabetError, CapExceeded, system_from_json, trace_set_from_json, traces_of_system,
)

NOTICE = ("bounded semantics: propositional and set quantifiers range over lassos with "
          "stem <= sigma and loop <= lambda")


@dataclass
class RunReport:
    command: str
    verdicts: list = field(default_factory=list)
    sigma: int | None = None
    lam: int | None = None
    notice: str | None = None
    exit_code: int = 0

    def add(self, label, value):
        self.verdicts.append((label, value))

    def lines(self):
        out = [f"command: {self.command}"]
        bounds = "" if self.sigma is None else f"  [sigma={self.sigma}, lambda={self.lam}]"
        for label, value in self.verdicts:
            out.append(f"{label}: {value}{bounds}")
        if self.notice:
            out.append(f"note: {self.notice}")
        return out


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(args):
    logic = Logic(args.logic) if getattr(args, "logic", None) else None
    return parse_file_text(_read(args.file), logic)


def cmd_parse(args):
    f = _load(args)
    print(print_formula(f))
    return 0


def cmd_translate(args):
    text = _read(args.file)
    f = parse_file_text(text, Logic(args.source))
    g = translate(f, args.target)
    print(format_file(g) if args.header else print_formula(g), end="" if args.header else "\n")
    return 0


def _bounds(args):
    return EvalParams.of(args.stem_bound, args.loop_bound, cap=args.cap)


def _open_props(node, bound=frozenset()):
    if isinstance(node, Atom):
        return set() if node.prop in bound else {node.prop}
    if isinstance(node, PropQ):
        bound = bound | {node.prop}
    return set().union(*(_open_props(k, bound) for k in children(node)))


def _check_alphabet(f, T):
    missing = _open_props(f.root) - T.ap
    if missing:
        raise AlphabetError(f"trace alphabet {sorted(T.ap)} lacks {sorted(missing)}")


def _verdict(report, T, f, params, label):
    _check_alphabet(f, T)
    report.sigma, report.lam = params.universe.stem_bound, params.universe.loop_bound
    report.add(label, "true" if evaluate(T, f, params) else "false")


def cmd_eval(args):
    f = _load(args)
    T = trace_set_from_json(args.traces)
    report = RunReport(f"eval {args.file}", notice=NOTICE)
    _verdict(report, T, f, _bounds(args), "verdict")
    return report


def cmd_mc(args):
    f = _load(args)
    ts = system_from_json(args.system)
    params = _bounds(args)
    T = traces_of_system(ts, params.universe, params.cap)
    report = RunReport(f"mc {args.file}",
                       notice=NOTICE + "; the system's traces are under-approximated by bounded lassos")
    report.add("traces", len(T))
    _verdict(report, T, f, params, "verdict (BOUNDED)")
    return report


def cmd_verify(args):
    from hyperq.verify import run_suite

    report = RunReport(f"verify --suite {args.suite} --seed {args.seed}")
    failed = False
    for res in run_suite(args.suite, args.seed):
        report.add(res.name, f"{res.cases} cases, {res.passed} passed")
        for msg in res.failures:
            report.add(f"  failure in {res.name}", msg)
        failed |= not res.ok
    report.exit_code = 1 if failed else 0
    return report


def build_parser():
    p = argparse.ArgumentParser(prog="hyperq", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    logics = [l.value for l in Logic]

    def bounds(sp):
        sp.add_argument("--stem-bound", type=int, default=1, help="sigma")
        sp.add_argument("--loop-bound", type=int, default=1, help="lambda")
        sp.add_argument("--cap", type=int, default=None, help="enumeration cap (default: $HYPERQ_CAP or 4096)")
        sp.add_argument("--timing", action="store_true", help="print elapsed time on stderr")

    sp = sub.add_parser("parse", help="parse a formula file and print its canonical form")
    sp.add_argument("file")
    sp.add_argument("--logic", choices=logics)
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("translate", help="apply one of the reductions")
    sp.add_argument("file")
    sp.add_argument("--from", dest="source", required=True, choices=["h2l", "hqptl+", "arith"])
    sp.add_argument("--to", dest="target", required=True, choices=["hqptl+", "h2l", "hyperqptl"])
    sp.add_argument("--header", action="store_true", help="emit a '#logic:' header")
    sp.set_defaults(fn=cmd_translate)

    sp = sub.add_parser("eval", help="evaluate a sentence on a JSON trace set")
    sp.add_argument("file")
    sp.add_argument("--traces", required=True)
    sp.add_argument("--logic", choices=logics)
    bounds(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("mc", help="bounded model checking against a JSON transition system")
    sp.add_argument("file")
    sp.add_argument("--system", required=True)
    sp.add_argument("--logic", choices=logics)
    bounds(sp)
    sp.set_defaults(fn=cmd_mc)

    sp = sub.add_parser("verify", help="run a seeded correspondence suite")
    sp.add_argument("--suite", required=True,
                    choices=["roundtrip", "lasso", "pairing", "lemma1", "lemma2", "lemma3", "lemma4", "all"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--timing", action="store_true")
    sp.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        out = args.fn(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ReductionError, EvaluationError, AlphabetError, CapExceeded, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if isinstance(out, RunReport):
        print("\n".join(out.lines()))
        code = out.exit_code
    else:
        code = out
    if getattr(args, "timing", False):
        print(f"elapsed: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
