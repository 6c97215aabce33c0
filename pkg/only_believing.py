#!/usr/bin/env python3
"""
only-believing - model checker for multi-agent only believing over belief bases
Batch command line: check a model, benchmark the committee family, export QDIMACS,
generate committee instance files
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from bench_harness import rows_to_csv, run_committee_bench, write_csv
from checker_errors import EnumerationCapExceeded, ModelCheckError, ResourceLimitExceeded
from committee_examples import QUERY_NAMES, VARIANTS, committee_instance, write_instance
from formula_parser import ProblemInstance, instance_from_document
from logic_core import prune_to_vocabulary
from profiling_utils import analyze_profile_stats, profile_call
from qbf_translation import export_qdimacs, validity_sentence
from symbolic_checker import ENGINES, ResourceLimits, check_instance, reduce_dynamics
from validation_utils import validate_config_value, validate_file_path

# Try to import termcolor, fallback to ANSI codes if not available
try:
    from termcolor import colored
except ImportError:
    class Colors:
        RESET = '\033[0m'
        RED = '\033[31m'
        GREEN = '\033[32m'
        YELLOW = '\033[33m'
        CYAN = '\033[36m'

    def colored(text, color=None, attrs=None):
        color_map = {
            'red': Colors.RED,
            'green': Colors.GREEN,
            'yellow': Colors.YELLOW,
            'cyan': Colors.CYAN,
        }
        return f"{color_map.get(color, '')}{text}{Colors.RESET}"

logger = logging.getLogger("only_believing")

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_KO = 2
EXIT_INPUT_ERROR = 3

VERDICT_COLORS = {"TRUE": "green", "FALSE": "red", "KO": "yellow"}

DEFAULT_CONFIG: Dict[str, Any] = {
    "enumeration_cap": 24,
    "timeout": 600.0,
    "node_limit": 50_000_000,
    "engine": "auto",
    "stats_format": "text",
    "bench_workers": 1,
    "log_file": "~/.only_believing/checker.log",
    "log_level": "INFO",
}


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from file or return defaults with validation"""
    if config_path is None:
        config_path = os.path.expanduser('~/.only_believing_config.json')
    else:
        config_path = os.path.expanduser(config_path)
    config = DEFAULT_CONFIG.copy()
    if not os.path.exists(config_path):
        return config
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            user_config = json.load(f)
    except (json.JSONDecodeError, IOError, OSError):
        return config
    if not isinstance(user_config, dict):
        return config

    for key, value in user_config.items():
        if key not in DEFAULT_CONFIG:
            continue  # Skip unknown keys
        valid, _ = validate_config_value(key, value)
        if not valid:
            continue  # Keep the default
        config[key] = value
    return config


def configure_logging(log_file: Optional[str], level: str = "INFO", verbose: bool = False) -> None:
    """File handler plus stderr; stderr only when the log directory cannot be created"""
    handlers: List[logging.Handler] = []
    if log_file:
        path = Path(os.path.expanduser(log_file))
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            handlers.append(logging.FileHandler(path))
        except OSError:
            pass
    stream = logging.StreamHandler(sys.stderr)
    stream.setLevel(logging.DEBUG if verbose else logging.WARNING)
    handlers.append(stream)
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _error(message: str) -> None:
    print(colored(f"✗ {message}", 'red'), file=sys.stderr)


def read_formula_argument(value: str) -> str:
    """--formula takes formula text or the path of a file holding it"""
    candidate = Path(os.path.expanduser(value))
    if len(value) < 4096 and candidate.is_file():
        return candidate.read_text(encoding='utf-8').strip()
    return value


def load_model(model_path: str, formula: Optional[str] = None) -> ProblemInstance:
    """Parse an instance file, replacing its query when a formula is given"""
    valid, error = validate_file_path(model_path, must_exist=True, must_be_file=True)
    if not valid:
        raise ModelCheckError(error)
    with open(os.path.expanduser(model_path), 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelCheckError(f"{model_path} is not a JSON document: {e}") from None
    if formula is not None and isinstance(data, dict):
        data["query"] = read_formula_argument(formula)
    return instance_from_document(data)


def _limits(args: argparse.Namespace, config: Dict[str, Any]) -> ResourceLimits:
    timeout = args.timeout if getattr(args, "timeout", None) is not None else config["timeout"]
    node_limit = args.node_limit if getattr(args, "node_limit", None) is not None else config["node_limit"]
    return ResourceLimits(timeout=float(timeout), node_limit=node_limit)


def format_stats(stats: Dict[str, Any], style: str) -> str:
    if style == "json":
        return json.dumps(stats, sort_keys=True)
    return "  ".join(f"{key}={value}" for key, value in stats.items())


def cmd_check(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    instance = load_model(args.model, args.formula)
    engine = args.engine or config["engine"]
    limits = _limits(args, config)
    cap = config["enumeration_cap"]

    try:
        if args.profile:
            result, profile = profile_call(check_instance, instance, engine, limits, cap)
        else:
            result, profile = check_instance(instance, engine, limits, cap), None
    except (EnumerationCapExceeded, ResourceLimitExceeded) as e:
        print(colored("KO", VERDICT_COLORS["KO"]))
        _error(str(e))
        return EXIT_KO

    print(colored(result.label, VERDICT_COLORS[result.label]))
    style = args.stats or config["stats_format"]
    print(format_stats(result.stats.as_dict(), style))
    if profile is not None:
        print(colored("Profile (top 20 by cumulative time):", 'cyan'))
        print(analyze_profile_stats(profile, top_n=20))

    if result.verdict is None:
        return EXIT_KO
    return EXIT_TRUE if result.verdict else EXIT_FALSE


def cmd_bench_committee(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    workers = args.workers if args.workers is not None else config["bench_workers"]
    rows = run_committee_bench(args.variant, args.min, args.max, _limits(args, config), workers)
    if args.csv:
        write_csv(rows, args.csv)
        print(colored(f"✓ {len(rows)} rows written to {args.csv}", 'green'))
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def cmd_translate(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    instance = load_model(args.model, args.formula)
    query = prune_to_vocabulary(reduce_dynamics(instance.query), instance.vocab)
    work = instance.with_query(query)
    text = export_qdimacs(validity_sentence(instance.initial_state, query, work))
    if args.output:
        Path(os.path.expanduser(args.output)).write_text(text, encoding='utf-8')
        print(colored(f"✓ QDIMACS written to {args.output}", 'green'))
    else:
        sys.stdout.write(text)
    return 0


def cmd_generate(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    instance = committee_instance(args.n, args.variant, args.query)
    target = write_instance(args.output, instance)
    print(colored(f"✓ committee n={args.n} ({args.variant}) written to {target}", 'green'))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='only-believing',
                                     description='Model checker for multi-agent only believing')
    parser.add_argument('--config', type=str, help='Use specific config file path')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging on stderr')
    sub = parser.add_subparsers(dest='command', required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=argparse.SUPPRESS, help='Use specific config file path')

    check = sub.add_parser('check', parents=[common], help='Decide (S0, S_Γ) ⊨ φ0 for an instance file')
    check.add_argument('--model', required=True, help='Instance file (JSON)')
    check.add_argument('--formula', help='Query text or a file holding it (overrides the model query)')
    check.add_argument('--engine', choices=ENGINES, help='bdd, enumerate, or auto (default from config)')
    check.add_argument('--timeout', type=float, help='Seconds before the check is reported KO')
    check.add_argument('--node-limit', type=int, help='BDD node budget')
    check.add_argument('--stats', choices=('json', 'text'), help='Statistics format')
    check.add_argument('--profile', action='store_true', help='Print a cProfile summary')
    check.set_defaults(handler=cmd_check)

    bench = sub.add_parser('bench-committee', parents=[common], help='Benchmark the committee family')
    bench.add_argument('--variant', choices=VARIANTS, default='first')
    bench.add_argument('--min', type=int, default=3)
    bench.add_argument('--max', type=int, default=10)
    bench.add_argument('--timeout', type=float, help='Seconds per row')
    bench.add_argument('--node-limit', type=int, help='BDD node budget per row')
    bench.add_argument('--csv', help='Output CSV file (stdout when omitted)')
    bench.add_argument('--workers', type=int, help='Worker processes')
    bench.set_defaults(handler=cmd_bench_committee)

    translate = sub.add_parser('translate', parents=[common], help='Export the closed QBF sentence')
    translate.add_argument('--model', required=True)
    translate.add_argument('--formula')
    translate.add_argument('--format', choices=('qdimacs',), default='qdimacs')
    translate.add_argument('--output', help='Output file (stdout when omitted)')
    translate.set_defaults(handler=cmd_translate)

    generate = sub.add_parser('generate', parents=[common], help='Write a committee instance file')
    generate.add_argument('--n', type=int, default=3)
    generate.add_argument('--variant', choices=VARIANTS, default='first')
    generate.add_argument('--query', choices=QUERY_NAMES)
    generate.add_argument('--output', required=True)
    generate.set_defaults(handler=cmd_generate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    configure_logging(config["log_file"], config["log_level"], args.verbose)

    try:
        return args.handler(args, config)
    except ResourceLimitExceeded as e:
        _error(str(e))
        return EXIT_KO
    except (ModelCheckError, ValueError, OSError) as e:
        logger.info("input error: %s", e)
        _error(str(e))
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
