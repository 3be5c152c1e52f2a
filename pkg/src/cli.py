"""
Command-line front end
Monitor traces, cross-check the automaton against the direct semantics,
generate scenarios and inspect automata
"""

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

from algebra import BOOLEAN, MINMAX, Algebra, AlgebraValue, get_algebra
from automaton import Automaton, build
from errors import StrelError, TraceFormatError, UnknownLocationError
from logic import Formula, Predicate, normalize, parse, parse_alias, parse_predicate, size, temporal_extent, to_text
from monitor import MonitorBank, run_offline
from oracle import eval_semantics
from scenario import ScenarioConfig, write_scenario
from spatial import DEFAULT_REGISTRY
from trace_io import LabeledTrace, TraceReader, load_trace
from utils import CheckConfig, export_results, random_instance, timed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

DEFAULT_ALIASES = {
    "obstacle": "dist_to_obstacle <= 0",
    "goal": "dist_to_goal <= 0",
}


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def build_aliases(definitions: Sequence[str] = ()) -> Dict[str, Predicate]:
    """Case-study aliases plus ``NAME=EXPR`` definitions (later ones win)"""
    aliases = {name: parse_predicate(expr) for name, expr in DEFAULT_ALIASES.items()}
    for definition in definitions:
        name, pred = parse_alias(definition)
        aliases[name] = pred
    return aliases


def read_spec(spec: str) -> str:
    """Formula text from a file path, or the argument itself"""
    path = Path(spec)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8")
    except OSError:
        pass
    return spec


def load_formula(spec: str, definitions: Sequence[str] = ()) -> Formula:
    return parse(read_spec(spec), build_aliases(definitions), DEFAULT_REGISTRY)


def compile_formula(f: Formula, universe: Sequence[str], alg: Algebra, prune: bool = True) -> Automaton:
    aut = build(normalize(f), universe, alg, DEFAULT_REGISTRY)
    return aut.prune_unreachable() if prune else aut


def satisfied(value: AlgebraValue, alg: Algebra) -> bool:
    """Boolean verdicts pass on top; robustness passes only when strictly positive"""
    if alg.is_boolean():
        return value is True
    return value > 0


def resolve_egos(ego: str, universe: Sequence[str]) -> List[str]:
    if ego == "all":
        return list(universe)
    if ego not in universe:
        raise UnknownLocationError(f"ego '{ego}' is not in the trace universe {list(universe)}")
    return [ego]


def check_instance(f: Formula, trace: LabeledTrace, ego: str, alg: Algebra) -> Tuple[AlgebraValue, AlgebraValue]:
    """Direct-semantics value and automaton value of f at (ego, 0)"""
    expected = eval_semantics(trace, f, ego, 0, alg)
    actual = run_offline(compile_formula(f, trace.universe, alg), trace, ego)
    return expected, actual


def counterexample(f: Formula, trace: LabeledTrace, ego: str, reason: str,
                   values: Dict[str, AlgebraValue]) -> Dict[str, Any]:
    return {
        "reason": reason,
        "formula": to_text(f),
        "ego": ego,
        "trace": [model.to_dict() for model in trace],
        "values": values,
    }


def compare_both(f: Formula, trace: LabeledTrace, ego: str) -> Optional[Dict[str, Any]]:
    """Counterexample for one instance in both algebras, or None when everything agrees"""
    values: Dict[str, AlgebraValue] = {}
    for alg in (BOOLEAN, MINMAX):
        expected, actual = check_instance(f, trace, ego, alg)
        values[f"{alg.name}_oracle"] = expected
        values[f"{alg.name}_automaton"] = actual
        if expected != actual:
            return counterexample(f, trace, ego, f"{alg.name} mismatch", values)
    robust = values["minmax_oracle"]
    if robust != 0 and (robust > 0) != values["boolean_oracle"]:
        return counterexample(f, trace, ego, "robustness sign differs from the Boolean verdict", values)
    return None


def run_check(cfg: CheckConfig) -> Dict[str, Any]:
    """
    Cross-check automaton and direct semantics on random instances

    Args:
        cfg: Instance count, seed and size bounds

    Returns:
        Summary with ``instances``, ``passed`` and the first ``counterexample`` (or None)
    """
    rng = random.Random(cfg.seed)
    passed = 0
    found = None
    with timed(f"Checked {cfg.instances} random instances") as clock:
        for _ in range(cfg.instances):
            f, trace, ego = random_instance(rng, cfg)
            found = compare_both(f, trace, ego)
            if found is not None:
                break
            passed += 1
    return {"instances": cfg.instances, "passed": passed, "seed": cfg.seed,
            "counterexample": found, "seconds": clock["seconds"]}


def format_counterexample(found: Dict[str, Any]) -> str:
    lines = [f"COUNTEREXAMPLE ({found['reason']})", f"  formula: {found['formula']}", f"  ego: {found['ego']}"]
    for name, value in found["values"].items():
        lines.append(f"  {name}: {value!r}")
    for record in found["trace"]:
        lines.append(f"  trace: {json.dumps(record, separators=(',', ':'))}")
    return "\n".join(lines)


def _jsonable(value: AlgebraValue) -> Any:
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return "inf" if value > 0 else "-inf"
    return value


def _print_verdicts(results: List[Tuple[str, AlgebraValue]], alg: Algebra, fmt: str, out: TextIO) -> None:
    for ego, value in results:
        if fmt == "jsonl":
            record = {"ego": ego, "verdict": _jsonable(value), "satisfied": satisfied(value, alg)}
            out.write(json.dumps(record) + "\n")
        else:
            out.write(f"EGO {ego} VERDICT {alg.format(value)}\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_monitor(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    """
    Monitor a trace for one or all egos

    Offline mode loads the whole trace, online mode streams it; both feed one
    MonitorBank in a single pass.

    Args:
        args: Parsed "monitor" arguments
        out: Output stream (stdout when omitted)

    Returns:
        EXIT_OK when every verdict is satisfied, EXIT_VIOLATION otherwise
    """
    out = out or sys.stdout
    alg = get_algebra(args.semantics)
    f = load_formula(args.spec, args.define)
    results: List[Tuple[str, AlgebraValue]] = []

    if args.mode == "offline":
        trace = load_trace(args.trace)
        egos = resolve_egos(args.ego, trace.universe)
        aut = compile_formula(f, trace.universe, alg, prune=not args.no_prune)
        bank = MonitorBank()
        bank.add(aut, egos, spec=to_text(f))
        with timed(f"Offline monitoring of {len(egos)} egos"):
            for _ in bank.run(trace):
                if alg.is_boolean() and bank.conclusive():
                    break
        results = [(ego, value) for _, ego, value in bank.values()]
    else:
        reader = TraceReader(args.trace)
        egos = resolve_egos(args.ego, reader.universe)
        aut = compile_formula(f, reader.universe, alg, prune=not args.no_prune)
        bank = MonitorBank()
        bank.add(aut, egos, spec=to_text(f))
        for verdicts in bank.run(reader):
            if args.per_step:
                for verdict in verdicts:
                    if args.format == "jsonl":
                        out.write(json.dumps(verdict.to_dict()) + "\n")
                    else:
                        out.write(f"STEP {verdict.step} EGO {verdict.ego} VALUE {alg.format(verdict.value)}\n")
                out.flush()
        if bank.steps == 0:
            raise TraceFormatError("trace has no snapshots")
        logger.info(f"Online monitoring: {bank.steps} steps, {bank.mean_step_time() * 1e3:.4f} ms per step per ego")
        results = [(ego, value) for _, ego, value in bank.values()]

    _print_verdicts(results, alg, args.format, out)
    return EXIT_OK if all(satisfied(value, alg) for _, value in results) else EXIT_VIOLATION


def cmd_check(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    """
    Automaton versus direct semantics, on random instances or one explicit instance

    Args:
        args: Parsed "check" arguments
        out: Output stream (stdout when omitted)

    Returns:
        EXIT_OK without a counterexample, EXIT_VIOLATION with one
    """
    out = out or sys.stdout
    if args.spec is not None:
        if args.trace is None or args.ego is None:
            raise ValueError("an explicit check needs --spec, --trace and --ego")
        f = load_formula(args.spec, args.define)
        trace = load_trace(args.trace)
        resolve_egos(args.ego, trace.universe)
        found = compare_both(f, trace, args.ego)
        summary: Dict[str, Any] = {"instances": 1, "passed": 0 if found else 1, "counterexample": found}
    else:
        cfg = CheckConfig(instances=args.random, seed=args.seed, max_locations=args.max_locations,
                          max_depth=args.max_depth, max_len=args.max_len)
        summary = run_check(cfg)

    if args.export:
        export_results(summary, args.export)
    if summary["counterexample"] is not None:
        out.write(format_counterexample(summary["counterexample"]) + "\n")
        out.write(f"FAIL {summary['passed']}/{summary['instances']}\n")
        return EXIT_VIOLATION
    out.write(f"OK {summary['passed']}/{summary['instances']}\n")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    """
    Generate a scenario trace from a JSON config

    Args:
        args: Parsed "gen" arguments
        out: Stream for the summary (stderr when the trace goes to stdout)

    Returns:
        EXIT_OK
    """
    out = out or sys.stdout
    cfg = ScenarioConfig.from_file(args.config)
    summary = write_scenario(cfg, args.out, progress=args.progress)
    report = sys.stderr if args.out == "-" else out
    report.write(f"nodes {summary['nodes']} (drones {summary['drones']}, stations {summary['stations']}), "
                 f"obstacles {summary['obstacles']}, steps {summary['steps']}\n")
    report.write(f"edges per step: min {summary['edges_min']} mean {summary['edges_mean']:.2f} "
                 f"max {summary['edges_max']}\n")
    return EXIT_OK


def read_locations(spec: str) -> List[str]:
    """``N`` gives l0..l(N-1); a trace file gives its header universe; any other file lists one id per line"""
    if spec.isdigit():
        n = int(spec)
        if n <= 0:
            raise ValueError("--locations needs a positive count")
        return [f"l{i}" for i in range(n)]
    path = Path(spec)
    if not path.is_file():
        raise FileNotFoundError(f"Locations file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        reader = TraceReader(path)
        reader.close()
        return list(reader.universe)
    return [line.strip() for line in text.splitlines() if line.strip()]


def cmd_info(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    """
    Automaton size report: |phi|, |phi'|, |Q| against the bound, pruning and |F|

    Args:
        args: Parsed "info" arguments
        out: Output stream (stdout when omitted)

    Returns:
        EXIT_OK
    """
    out = out or sys.stdout
    f = load_formula(args.spec, args.define)
    universe = read_locations(args.locations)
    alg = get_algebra(args.semantics)
    normalized = normalize(f)
    aut = build(normalized, universe, alg, DEFAULT_REGISTRY)

    info = aut.get_info()
    out.write(f"formula: {to_text(f)}\n")
    out.write(f"|phi|={size(f)} T={temporal_extent(f)} |phi'|={info['closure']} "
              f"size(phi')={info['formula_size']}\n")
    out.write(f"|L|={info['locations']}\n")
    out.write(f"|Q|={info['states']} bound={info['bound']}\n")
    if args.prune:
        aut = aut.prune_unreachable()
        info = aut.get_info()
        out.write(f"pruned |Q|={info['states']}\n")
    out.write(f"|F|={info['accepting']}\n")
    if args.states:
        for i in sorted(aut.live):
            mark = " F" if aut.is_accepting(i) else ""
            out.write(f"  q{i}{mark}: {to_text(aut.formulas[i])}\n")
    if args.dot:
        out.write(aut.to_dot() + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run_monitor.py",
                                     description="Spatio-temporal monitoring of dynamic graph traces")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--log-level", default=None, help="Logging level (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_defines(p: argparse.ArgumentParser) -> None:
        p.add_argument("--define", action="append", default=[], metavar="NAME=EXPR",
                       help="Bind a predicate alias, e.g. low=battery<=2")

    monitor = sub.add_parser("monitor", help="Monitor a trace")
    monitor.add_argument("--spec", required=True, help="Formula text or file")
    monitor.add_argument("--trace", required=True, help="Trace file, '-' for stdin")
    monitor.add_argument("--ego", default="all", help="Ego location or 'all'")
    monitor.add_argument("--semantics", choices=["bool", "robust"], default="bool")
    monitor.add_argument("--mode", choices=["offline", "online"], default="offline")
    monitor.add_argument("--per-step", action="store_true", help="Print the value after every step (online)")
    monitor.add_argument("--format", choices=["text", "jsonl"], default="text")
    monitor.add_argument("--no-prune", action="store_true", help="Keep unreachable automaton states")
    add_defines(monitor)
    monitor.set_defaults(handler=cmd_monitor)

    check = sub.add_parser("check", help="Cross-check automaton and direct semantics")
    check.add_argument("--random", type=int, default=100, help="Number of random instances")
    check.add_argument("--seed", type=int, default=7)
    check.add_argument("--max-locations", type=int, default=4)
    check.add_argument("--max-depth", type=int, default=3)
    check.add_argument("--max-len", type=int, default=5)
    check.add_argument("--spec", default=None, help="Explicit formula (with --trace and --ego)")
    check.add_argument("--trace", default=None)
    check.add_argument("--ego", default=None)
    check.add_argument("--export", default=None, help="Write the summary as JSON")
    add_defines(check)
    check.set_defaults(handler=cmd_check)

    gen = sub.add_parser("gen", help="Generate a scenario trace")
    gen.add_argument("--config", required=True, help="Scenario JSON config")
    gen.add_argument("--out", required=True, help="Output trace, '-' for stdout")
    gen.add_argument("--progress", action="store_true", help="Show a progress bar")
    gen.set_defaults(handler=cmd_gen)

    info = sub.add_parser("info", help="Automaton size report")
    info.add_argument("--spec", required=True)
    info.add_argument("--locations", required=True, help="Location count or file")
    info.add_argument("--semantics", choices=["bool", "robust"], default="bool")
    info.add_argument("--prune", action="store_true")
    info.add_argument("--states", action="store_true", help="List the live states")
    info.add_argument("--dot", action="store_true", help="Print the successor graph in DOT")
    add_defines(info)
    info.set_defaults(handler=cmd_info)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    level = logging.DEBUG if args.verbose else getattr(logging, str(args.log_level or "WARNING").upper(), None)
    if not isinstance(level, int):
        print(f"error: unknown log level '{args.log_level}'", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                        stream=sys.stderr)

    if getattr(args, "per_step", False) and args.mode != "online":
        print("error: --per-step needs --mode online", file=sys.stderr)
        return EXIT_USAGE

    try:
        return args.handler(args)
    except (StrelError, ValueError, KeyError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
