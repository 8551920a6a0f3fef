"""Command-line front end.

Exit codes: 0 success / holds / equal, 1 fails / unequal, 2 invalid table
(``validate``), 64 usage, 65 bad input data, 66 unreadable file, 70 budget
exceeded.  ``--json`` switches any command to machine-readable output.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import constructions as K
from . import freewords as F
from . import terms as T
from .classify import ClassifyOptions, TooFewElements, catalog_entry, derive_identity
from .classify import classify as classify_table
from .tables import (
    InvalidTable,
    Permutation,
    QgFormatError,
    load_qg,
    principal_isotope,
    read_qg,
    write_qg,
)

EX_OK, EX_FAIL, EX_INVALID = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE = 64, 65, 66, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _perm(text: str) -> Permutation:
    try:
        return Permutation(tuple(int(t) for t in text.split(",")))
    except ValueError as exc:
        raise ValueError(f"bad permutation {text!r}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    # --json is accepted before or after the subcommand; SUPPRESS keeps the
    # subcommand's default from overwriting a global flag
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = _Parser(prog="quasikit", description="Finite and free quasigroup toolkit")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a .qg file is a Latin square")
    s.add_argument("file")

    s = sub.add_parser("check", parents=[common], help="check an identity exhaustively")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--identity", help='identity text, e.g. "x*(x\\y) = y"')
    g.add_argument("--named", help="catalog key, e.g. MEDIAL")
    s.add_argument("--budget", type=int, default=T.DEFAULT_BUDGET)
    s.add_argument("--u", type=int, default=0, help="element used for the constant u")

    s = sub.add_parser("classify", parents=[common], help="run the identity catalog and the oracle")
    s.add_argument("file")
    s.add_argument("--max-class", type=int, default=0)
    s.add_argument("--decompose-t", action="store_true")
    s.add_argument("--budget", type=int, default=T.DEFAULT_BUDGET)

    s = sub.add_parser("isotope", parents=[common], help="principal isotope (x/a)*(b\\y)")
    s.add_argument("file")
    s.add_argument("-a", type=int, required=True)
    s.add_argument("-b", type=int, required=True)
    s.add_argument("-o", "--output")

    s = sub.add_parser("construct", parents=[common], help="build a quasigroup over a small group")
    s.add_argument("kind", choices=["linear", "t", "ch", "leftdist", "group"])
    s.add_argument("--group", required=True, help="Z3, Z2xZ2, S3, D4, Q8, ...")
    s.add_argument("--phi", type=_perm)
    s.add_argument("--psi", type=_perm)
    s.add_argument("--c", type=int, default=0)
    s.add_argument("--trailing", action="store_true", help="(φx + ψy) + c instead of φx + c + ψy")
    s.add_argument("-o", "--output")

    s = sub.add_parser("derive", parents=[common], help="derived quasigroup identity of a loop identity")
    s.add_argument("identity")

    s = sub.add_parser("word-eq", parents=[common], help="decide equality in the free T- or medial quasigroup")
    s.add_argument("t1")
    s.add_argument("t2")
    s.add_argument("--medial", action="store_true")
    s.add_argument("--no-search", action="store_true", help="skip the certificate search")

    s = sub.add_parser("normalize", parents=[common], help="canonical form of a term")
    s.add_argument("term")
    s.add_argument("--medial", action="store_true")
    return p


def _emit(args, payload: dict, text: str, out) -> None:
    if args.json:
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _write_table(args, Q, command: str, out) -> None:
    body = write_qg(Q)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    payload = {"command": command, "status": "ok", "order": Q.order, "table": Q.rows(), "output": args.output}
    if args.json:
        _emit(args, payload, "", out)
    elif not args.output:
        out.write(body)


def _assignment_text(pairs) -> str:
    return " ".join(f"{k}={v}" for k, v in pairs)


def _cmd_validate(args, out, err) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileNotFoundError(str(exc)) from exc
    try:
        Q = read_qg(text)
    except (InvalidTable, QgFormatError) as exc:
        _emit(args, {"command": "validate", "status": "invalid", "valid": False, "error": str(exc)}, "invalid", out)
        err.write(f"{args.file}: {exc}\n")
        return EX_INVALID
    _emit(args, {"command": "validate", "status": "valid", "valid": True, "order": Q.order}, f"valid (order {Q.order})", out)
    return EX_OK


def _cmd_check(args, out, err) -> int:
    Q = load_qg(args.file)
    if args.named:
        try:
            identity = catalog_entry(args.named).identity
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    else:
        identity = T.parse_identity(args.identity)
    v = T.check_identity(Q, identity, budget=args.budget, u=args.u)
    payload = {"command": "check", "status": "holds" if v.holds else "fails", "identity": str(identity), "named": args.named, **v.to_dict()}
    text = "holds" if v.holds else f"fails\ncounterexample: {_assignment_text(v.counterexample)}"
    _emit(args, payload, text, out)
    return EX_OK if v.holds else EX_FAIL


def _cmd_classify(args, out, err) -> int:
    Q = load_qg(args.file)
    opts = ClassifyOptions(max_class=args.max_class, decompose_t=args.decompose_t, budget=args.budget)
    report = classify_table(Q, opts)
    data = report.to_dict()
    lines = []
    for key, v in data["entries"].items():
        line = f"{key:<16} {v['verdict']}"
        if v["counterexample"]:
            line += "  [" + _assignment_text(v["counterexample"]) + "]"
        lines.append(line)
    for n, v in data["nilpotency"].items():
        lines.append(f"{'NILPOTENT_' + n:<16} {v['verdict']}")
    o = data["oracle"]
    lines.append(f"oracle: group_isotope={o['group_isotope']} abelian_isotope={o['abelian_isotope']} "
                 f"nilpotency_class={o['nilpotency_class']}")
    if "t_decomposition" in data:
        d = data["t_decomposition"]
        lines.append("T-decomposition: none" if d is None else
                     f"T-decomposition: a={d['a']} b={d['b']} phi={d['phi']} psi={d['psi']} c={d['c']}")
    lines.append(f"consistent: {data['consistent']}")
    _emit(args, {"command": "classify", "status": "ok", **data}, "\n".join(lines), out)
    return EX_OK


def _cmd_isotope(args, out, err) -> int:
    Q = load_qg(args.file)
    n = Q.order
    for name in ("a", "b"):
        if not 0 <= getattr(args, name) < n:
            raise UsageError(f"-{name} must be an element of 0..{n - 1}")
    _write_table(args, principal_isotope(Q, args.a, args.b), "isotope", out)
    return EX_OK


def _cmd_construct(args, out, err) -> int:
    G = K.resolve_group(args.group)
    kind = args.kind
    if kind == "group":
        Q = G
    elif kind in ("linear", "t"):
        spec = K.LinearSpec(G, args.phi, args.psi, args.c, K.Form.TRAILING if args.trailing else K.Form.MIDDLE)
        Q = K.linear_quasigroup(spec) if kind == "linear" else K.t_quasigroup(spec)
    elif kind == "ch":
        Q = K.ch_quasigroup(G, args.c)
    else:
        if args.phi is None:
            raise UsageError("leftdist needs --phi")
        Q = K.left_distributive_quasigroup(G, args.phi)
    _write_table(args, Q, "construct", out)
    return EX_OK


def _cmd_derive(args, out, err) -> int:
    derived = derive_identity(args.identity)
    _emit(args, {"command": "derive", "status": "ok", "identity": str(derived), "variables": list(derived.variables)},
          str(derived), out)
    return EX_OK


def _mode(args) -> F.Mode:
    return F.Mode.MEDIAL if args.medial else F.Mode.FREE_T


def _cmd_word_eq(args, out, err) -> int:
    verdict = F.words_equal(args.t1, args.t2, _mode(args), search=not args.no_search)
    data = verdict.to_dict()
    if verdict.equal:
        text = "equal"
    else:
        text = f"unequal\nleft:  {data['left']}\nright: {data['right']}"
        cert = verdict.certificate
        if cert is None:
            text += "\ncanonical forms differ"
        else:
            text += (f"\ncertificate: {cert.model.describe()}\n"
                     f"assignment: {_assignment_text(cert.assignment)} "
                     f"(values {cert.left_value} vs {cert.right_value})\n" + write_qg(cert.table))
    _emit(args, {"command": "word-eq", "status": "equal" if verdict.equal else "unequal", "mode": _mode(args).value, **data}, text, out)
    return EX_OK if verdict.equal else EX_FAIL


def _cmd_normalize(args, out, err) -> int:
    canon = F.normal_form(args.term, _mode(args))
    terms = [{"generator": g, "word": "".join(F.word_letters(w, canon.mode)), "coefficient": c}
             for (g, w), c in canon.items()]
    _emit(args, {"command": "normalize", "status": "ok", "mode": _mode(args).value, "canonical": canon.display(), "terms": terms},
          canon.display(), out)
    return EX_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "check": _cmd_check,
    "classify": _cmd_classify,
    "isotope": _cmd_isotope,
    "construct": _cmd_construct,
    "derive": _cmd_derive,
    "word-eq": _cmd_word_eq,
    "normalize": _cmd_normalize,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EX_USAGE
    try:
        return _COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EX_USAGE
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        err.write(f"file error: {exc}\n")
        return EX_NOINPUT
    except (T.BudgetExceeded, TooFewElements) as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EX_SOFTWARE
    except (T.TermSyntaxError, T.UnsupportedLoopOperation, T.UnboundVariable, QgFormatError, InvalidTable,
            K.UnknownGroup, K.NotAutomorphism, K.NotAbelian, K.PsiNotBijective, K.NotAGroup, ValueError) as exc:
        err.write(f"input error: {exc}\n")
        return EX_DATAERR
    except OSError as exc:
        err.write(f"file error: {exc}\n")
        return EX_NOINPUT


def main() -> None:
    sys.exit(run())
