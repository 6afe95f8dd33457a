"""Command-line driver: static checks, schedule replay, bounded property
verification, and multi-contract network runs.

Exit codes: 0 success / Holds; 1 Violated; 2 parse error; 3 static-check
error; 4 malformed input file; 5 Inconclusive; 6 unknown or ill-typed
predicate; 10 I/O error. Verdicts are a pure function of the inputs and
the seed (SCILLA_MC_SEED or --seed), so reruns are bit-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from . import ast
from .checks import check_contract
from .interp import (
    ContractInstance,
    InstantiationError,
    absorbed_funds_lint,
    execute0,
    instantiate,
    overdraw_lint,
)
from .lexer import ParseError
from .network import make_network, network_result_to_json, run_network
from .parser import parse_contract
from .predicates import (
    Donated,
    EndpointHolds,
    PredicateTypeError,
    UnknownPredicate,
    resolve_predicate,
)
from .propcheck import (
    Alphabet,
    Holds,
    Inconclusive,
    Violated,
    alphabet_from_json,
    check_can_claim_back,
    check_safe,
    check_safe_inductive,
    check_since_as_long,
    make_state_generator,
    verdict_to_json,
    witness_schedule,
)
from .state import (
    BState,
    SchemaError,
    message_from_json,
    params_from_json,
    schedule_from_json,
    schedule_to_json,
    trace_to_json,
)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_PARSE = 2
EXIT_CHECK = 3
EXIT_SCHEMA = 4
EXIT_INCONCLUSIVE = 5
EXIT_PREDICATE = 6
EXIT_IO = 10

DEFAULT_SEED = 1729


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise CliFailure(EXIT_IO, f"{path}: {e.strerror or e}") from None


def _read_json(path: str) -> Any:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliFailure(EXIT_SCHEMA, f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None


def _write_json(obj: Any, path: str) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise CliFailure(EXIT_IO, f"{path}: {e.strerror or e}") from None


def _parse_checked(path: str) -> ast.ContractDef:
    text = _read_text(path)
    try:
        contract = parse_contract(text)
    except ParseError as e:
        raise CliFailure(EXIT_PARSE, f"{path}:{e.span.line}:{e.span.col}: error: {e.message}") from None
    report = check_contract(contract)
    if not report.ok:
        raise CliFailure(EXIT_CHECK, "\n".join(report.render(path)))
    return contract


def _load_instance(args) -> ContractInstance:
    contract = _parse_checked(args.contract)
    params = {}
    if args.params is not None:
        try:
            params = params_from_json(_read_json(args.params))
        except SchemaError as e:
            raise CliFailure(EXIT_SCHEMA, f"{args.params}: {e}") from None
    try:
        return instantiate(contract, args.id, args.balance, params)
    except InstantiationError as e:
        raise CliFailure(EXIT_SCHEMA, f"{args.params or args.contract}: {e}") from None


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SCILLA_MC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliFailure(EXIT_SCHEMA, f"SCILLA_MC_SEED: not an integer: {env!r}") from None
    return DEFAULT_SEED


# ------------------------------------------------------------ subcommands


def cmd_check(args) -> int:
    text = _read_text(args.contract)
    try:
        contract = parse_contract(text)
    except ParseError as e:
        print(f"{args.contract}:{e.span.line}:{e.span.col}: error: {e.message}", file=sys.stderr)
        return EXIT_PARSE
    report = check_contract(contract)
    if not report.ok:
        for line in report.render(args.contract):
            print(line, file=sys.stderr)
        return EXIT_CHECK
    print(f"{args.contract}: ok")
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _load_instance(args)
    try:
        schedule = schedule_from_json(_read_json(args.schedule))
    except SchemaError as e:
        raise CliFailure(EXIT_SCHEMA, f"{args.schedule}: {e}") from None
    trace = execute0(inst, schedule)
    for i, (stp, (_, m)) in enumerate(zip(trace, schedule)):
        for lint in (overdraw_lint(stp, m), absorbed_funds_lint(stp, m)):
            if lint is not None:
                print(f"{args.schedule}: step {i}: {lint}", file=sys.stderr)
    _write_json(trace_to_json(trace), args.out)
    return EXIT_OK


def _run_verify(args, inst: ContractInstance, alphabet: Alphabet):
    cont_depth = args.cont_depth if args.cont_depth is not None else args.depth
    if args.prop == "donation_preserved":
        if args.backer is None or args.amount is None:
            raise CliFailure(EXIT_PREDICATE, "donation_preserved needs --backer and --amount")
        p = Donated(args.backer, args.amount)
        r = resolve_predicate(args.r or f"no_claims_from({args.backer})", kind="elem")
        return check_since_as_long(inst, p, EndpointHolds(p), r, alphabet, args.depth, cont_depth)
    if args.prop == "can_claim_back":
        if args.backer is None or args.amount is None:
            raise CliFailure(EXIT_PREDICATE, "can_claim_back needs --backer and --amount")
        return check_can_claim_back(inst, args.backer, args.amount, alphabet, args.depth)
    pred = resolve_predicate(args.prop, inst.params, kind="state")
    if args.inductive:
        gen = make_state_generator(inst, pred, alphabet)
        return check_safe_inductive(inst, pred, gen, alphabet, args.samples, _resolve_seed(args))
    return check_safe(inst, pred, alphabet, args.depth, jobs=args.jobs)


def cmd_verify(args) -> int:
    inst = _load_instance(args)
    try:
        alphabet = alphabet_from_json(_read_json(args.alphabet))
    except SchemaError as e:
        raise CliFailure(EXIT_SCHEMA, f"{args.alphabet}: {e}") from None
    try:
        verdict = _run_verify(args, inst, alphabet)
    except UnknownPredicate as e:
        raise CliFailure(EXIT_PREDICATE, f"unknown predicate: {e}") from None
    except PredicateTypeError as e:
        raise CliFailure(EXIT_PREDICATE, f"predicate error: {e}") from None

    if args.format == "json":
        _write_json(verdict_to_json(verdict), "-")
    if type(verdict) is Holds:
        if args.format == "text":
            extra = "" if verdict.premise_states is None else f", {verdict.premise_states} premise state(s)"
            print(f"Holds: {verdict.schedules_checked} schedules checked within {_bound_text(verdict.bound)}{extra}")
        return EXIT_OK
    if type(verdict) is Violated:
        _write_json(schedule_to_json(witness_schedule(verdict)), args.out)
        if args.format == "text":
            detail = f" ({verdict.detail})" if verdict.detail else ""
            print(f"Violated at step {verdict.failing_index}{detail}; witness schedule written to {args.out}")
        return EXIT_VIOLATED
    if args.format == "text":
        print(f"Inconclusive: {verdict.reason}")
    return EXIT_INCONCLUSIVE


def _bound_text(bound) -> str:
    s = f"depth {bound.depth} over {bound.bstates} bstate(s) x {bound.messages} message(s)"
    if bound.cont_depth is not None:
        s += f", continuations to depth {bound.cont_depth}"
    return s


def _parse_contract_spec(spec: str):
    parts = spec.split(":")
    if len(parts) == 3:
        addr, path, params = parts
        balance = 0
    elif len(parts) == 4:
        addr, path, params, raw = parts
        if not raw.isdigit():
            raise CliFailure(EXIT_SCHEMA, f"--contract {spec!r}: balance must be a non-negative integer")
        balance = int(raw)
    else:
        raise CliFailure(EXIT_SCHEMA, f"--contract {spec!r}: expected ADDR:PATH:PARAMS[:BALANCE]")
    return addr, path, params or None, balance


def cmd_network(args) -> int:
    instances: dict[str, ContractInstance] = {}
    for spec in args.contract:
        addr, path, params_path, balance = _parse_contract_spec(spec)
        contract = _parse_checked(path)
        params = {}
        if params_path is not None:
            try:
                params = params_from_json(_read_json(params_path))
            except SchemaError as e:
                raise CliFailure(EXIT_SCHEMA, f"{params_path}: {e}") from None
        try:
            instances[addr] = instantiate(contract, addr, balance, params)
        except InstantiationError as e:
            raise CliFailure(EXIT_SCHEMA, f"{path}: {e}") from None
    try:
        initial = message_from_json(_read_json(args.message))
    except SchemaError as e:
        raise CliFailure(EXIT_SCHEMA, f"{args.message}: {e}") from None
    net = make_network(instances, BState(args.block))
    result = run_network(net, initial, args.budget)
    _write_json(network_result_to_json(result), args.out)
    return EXIT_OK


# -------------------------------------------------------------- arg wiring


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("contract", help="contract source file")
    p.add_argument("--params", help="JSON file with contract parameters")
    p.add_argument("--id", default="C", help="address of the instance (default C)")
    p.add_argument("--balance", type=int, default=0, help="initial balance (default 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scilla-mc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a contract and run the static checks")
    p.add_argument("contract")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("simulate", help="replay a schedule and write the trace")
    _add_instance_args(p)
    p.add_argument("--schedule", required=True, help="schedule JSON file")
    p.add_argument("--out", default="-", help="trace output path (default stdout)")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="bounded property checking over an alphabet")
    _add_instance_args(p)
    p.add_argument("--prop", required=True, help="builtin name, expression, or a composite property")
    p.add_argument("--alphabet", required=True, help="alphabet JSON file")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--cont-depth", type=int, default=None, help="continuation depth (default: --depth)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the schedule search")
    p.add_argument("--inductive", action="store_true", help="sampled induction step instead of full search")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--backer", help="backer address for donation properties")
    p.add_argument("--amount", type=int, help="donation amount for donation properties")
    p.add_argument("--r", help="schedule-element side condition (donation_preserved)")
    p.add_argument("--out", default="witness.json", help="witness schedule path on Violated")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("network", help="run communicating contracts under a budget")
    p.add_argument(
        "--contract",
        action="append",
        required=True,
        metavar="ADDR:PATH:PARAMS[:BALANCE]",
        help="register a contract instance (repeatable); PARAMS may be empty",
    )
    p.add_argument("--message", required=True, help="initial message JSON file")
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--block", type=int, default=1, help="block number for the whole run")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_network)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliFailure as e:
        print(str(e), file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
