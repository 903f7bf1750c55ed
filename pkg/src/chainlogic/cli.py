"""Command-line front end.

Exit codes: 0 when the queried property is established (formula holds,
proof accepted, no countermodel within budget), 1 when it is refuted
(with a witness or diagnostic printed), and 2 for usage, parse, or file
format errors. ``--json`` switches each report to a single JSON object on
stdout with the same verdict as the text output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .formula import FormulaSyntaxError, VariableLimitError, parse, render, scope
from .proofcheck import ProofFormatError, check_script, load_script
from .protocol import (
    ProtocolFormatError,
    ValueDomainError,
    is_run,
    load_protocol,
    protocol_to_dict,
    telephone,
)
from .search import (
    ExhaustiveMode,
    RandomMode,
    SearchBounds,
    SearchSpaceError,
    embed_formula,
    falsify,
)
from .semantics import (
    EvalContext,
    StrictWindowError,
    UndeclaredAtomError,
    counterexample,
    evaluate,
    valid_in,
)

_NAMED_ALPHABETS = {"latin": "abcdefghijklmnopqrstuvwxyz"}


class _UsageError(ValueError):
    pass


def _emit(args, out, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload), file=out)
    else:
        for line in text_lines:
            print(line, file=out)


def _format_scope(sc) -> str:
    return "{" + ", ".join(str(k) for k in sorted(sc.indices)) + "}"


def _cmd_scope(args, out) -> int:
    sc = scope(parse(args.formula))
    _emit(
        args,
        out,
        {"command": "scope", "formula": args.formula, "scope": sorted(sc.indices)},
        [_format_scope(sc)],
    )
    return 0


def _parse_run(text: str, protocol) -> tuple:
    r = tuple(text.split(","))
    if not is_run(protocol, r):
        raise _UsageError(f"{text!r} is not a run of the protocol")
    return r


def _eval_on(args, out, protocol) -> int:
    ctx = EvalContext(protocol, strict_window=args.strict_window)
    r = _parse_run(args.run, protocol)
    value = evaluate(ctx, r, parse(args.formula))
    _emit(
        args,
        out,
        {"command": "eval", "formula": args.formula, "run": list(r), "value": value},
        ["true" if value else "false"],
    )
    return 0 if value else 1


def _valid_on(args, out, protocol) -> int:
    ctx = EvalContext(protocol, strict_window=args.strict_window)
    witness = counterexample(ctx, parse(args.formula))
    payload = {
        "command": "valid",
        "formula": args.formula,
        "valid": witness is None,
        "counterexample": list(witness) if witness is not None else None,
    }
    if witness is None:
        _emit(args, out, payload, ["valid"])
        return 0
    _emit(args, out, payload, ["invalid", "counterexample: " + ",".join(witness)])
    return 1


def _counterexample_on(args, out, protocol) -> int:
    ctx = EvalContext(protocol, strict_window=args.strict_window)
    witness = counterexample(ctx, parse(args.formula))
    payload = {
        "command": "counterexample",
        "formula": args.formula,
        "found": witness is not None,
        "run": list(witness) if witness is not None else None,
    }
    if witness is None:
        _emit(args, out, payload, ["none: the formula is valid on this protocol"])
        return 0
    _emit(args, out, payload, [",".join(witness)])
    return 1


def _cmd_eval(args, out) -> int:
    return _eval_on(args, out, load_protocol(args.protocol))


def _cmd_valid(args, out) -> int:
    return _valid_on(args, out, load_protocol(args.protocol))


def _cmd_prove(args, out) -> int:
    verdict = check_script(load_script(args.script))
    payload = {
        "command": "prove",
        "script": args.script,
        "accepted": verdict.accepted,
        "line": verdict.failure[0] if verdict.failure else None,
        "reason": verdict.failure[1] if verdict.failure else None,
    }
    if verdict.accepted:
        _emit(args, out, payload, ["accepted"])
        return 0
    line, reason = verdict.failure
    _emit(args, out, payload, [f"rejected at line {line}: {reason}"])
    return 1


def _cmd_falsify(args, out) -> int:
    if (args.seed is None) != (args.samples is None):
        raise _UsageError("--seed and --samples must be given together")
    mode = (
        RandomMode(args.seed, args.samples)
        if args.seed is not None
        else ExhaustiveMode()
    )
    bounds = SearchBounds(
        num_channels=args.channels,
        max_values_per_channel=args.max_values,
        atoms_per_channel=args.atoms,
        mode=mode,
    )
    f = parse(args.formula)
    shifted = embed_formula(f, bounds)
    hit = falsify(f, bounds, budget=args.budget)
    if hit is None:
        payload = {
            "command": "falsify",
            "formula": args.formula,
            "found": False,
            "note": "no countermodel within the bounds and budget; "
            "this proves nothing beyond the explored space",
        }
        _emit(args, out, payload, [payload["note"]])
        return 0
    protocol, run = hit
    doc = protocol_to_dict(protocol)
    payload = {
        "command": "falsify",
        "formula": args.formula,
        "checked_formula": render(shifted),
        "found": True,
        "protocol": doc,
        "run": list(run),
    }
    _emit(
        args,
        out,
        payload,
        [
            "countermodel found",
            "checked formula: " + render(shifted),
            "protocol: " + json.dumps(doc),
            "run: " + ",".join(run),
        ],
    )
    return 1


def _cmd_telephone(args, out) -> int:
    alphabet = _NAMED_ALPHABETS.get(args.alphabet, args.alphabet)
    protocol = telephone(args.len, alphabet, args.chain)
    if args.verb == "eval":
        return _eval_on(args, out, protocol)
    if args.verb == "valid":
        return _valid_on(args, out, protocol)
    return _counterexample_on(args, out, protocol)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="emit one JSON object")
    parser.add_argument(
        "--strict-window",
        action="store_true",
        help="error on modalities outside the protocol window",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainlogic",
        description="Epistemic logic over linear communication chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scope", help="minimal channel set of a formula")
    p.add_argument("formula")
    _add_common(p)
    p.set_defaults(handler=_cmd_scope)

    p = sub.add_parser("eval", help="evaluate a formula at a run")
    p.add_argument("--protocol", required=True, help="protocol JSON file")
    p.add_argument("--run", required=True, help="comma-separated values, one per channel")
    p.add_argument("--formula", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("valid", help="check a formula on every run")
    p.add_argument("--protocol", required=True, help="protocol JSON file")
    p.add_argument("--formula", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_valid)

    p = sub.add_parser("prove", help="verify a proof script")
    p.add_argument("--script", required=True, help="proof script JSON file")
    _add_common(p)
    p.set_defaults(handler=_cmd_prove)

    p = sub.add_parser("falsify", help="search small protocols for a countermodel")
    p.add_argument("--formula", required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--max-values", type=int, required=True)
    p.add_argument("--atoms", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--budget", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(handler=_cmd_falsify)

    p = sub.add_parser("telephone", help="the word-passing demo protocol")
    p.add_argument("--len", type=int, required=True, help="word length")
    p.add_argument(
        "--alphabet",
        required=True,
        help='named alphabet ("latin") or the letters themselves, e.g. "abc"',
    )
    p.add_argument("--chain", type=int, required=True, help="number of channels")
    verbs = p.add_subparsers(dest="verb", required=True)
    v = verbs.add_parser("eval")
    v.add_argument("--run", required=True)
    v.add_argument("--formula", required=True)
    _add_common(v)
    v = verbs.add_parser("valid")
    v.add_argument("--formula", required=True)
    _add_common(v)
    v = verbs.add_parser("counterexample")
    v.add_argument("--formula", required=True)
    _add_common(v)
    p.set_defaults(handler=_cmd_telephone)

    return parser


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; normalize its exit code
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.handler(args, out)
    except (
        _UsageError,
        FormulaSyntaxError,
        VariableLimitError,
        ProtocolFormatError,
        ProofFormatError,
        SearchSpaceError,
        ValueDomainError,
        UndeclaredAtomError,
        StrictWindowError,
        json.JSONDecodeError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
