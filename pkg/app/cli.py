"""
Command line module.
This module provides the argparse entry point `python -m app <command>`.

Exit codes: 0 when every verdict is true and every tolerance met, 1 when
some verdict or tolerance failed, 2 for configuration or hypothesis errors.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.api.schemas.run import COMMANDS, RunConfig
from app.api.services import harness
from app.api.utils.errors import OperatorHypothesisError, VerificationError
from app.api.utils.settings import LOG_LEVEL, OUTPUT_DIR, configure_logging
from app.api.utils.unit_of_work import write_report

logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app",
        description="Numerical verification of uniformly balancing sublevel inequalities.",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="verification to run")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--p", nargs="+", help="exponents overriding the config, 'inf' allowed")
    parser.add_argument("--resolution", type=int, help="level-set grid cells per axis")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("--out", help=f"output directory (default {OUTPUT_DIR})")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level")
    parser.add_argument("--print-schema", action="store_true", help="print the RunConfig JSON schema and exit")
    return parser

def load_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the JSON config file with command line overrides.

    Args:
        args (argparse.Namespace): Parsed arguments.

    Returns:
        RunConfig: The validated configuration.

    Raises:
        ValidationError: If the merged configuration is invalid.
    """
    data: Dict[str, Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            data = json.load(handle)
    if args.command:
        data["command"] = args.command
    overrides = {"p": args.p, "resolution": args.resolution, "seed": args.seed, "out": args.out}
    data.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig.model_validate(data)

def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv (Optional[List[str]]): Arguments; defaults to sys.argv[1:].

    Returns:
        int: The exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if args.print_schema:
        print(json.dumps(RunConfig.model_json_schema(), indent=2, sort_keys=True))
        return EXIT_PASSED
    if not args.command and not args.config:
        parser.error("a command or --config is required")
    try:
        config = load_config(args)
    except (OSError, json.JSONDecodeError) as exc:
        logger.error("cannot read config: %s", exc)
        return EXIT_ERROR
    except ValidationError as exc:
        logger.error("invalid config:\n%s", exc)
        return EXIT_ERROR
    try:
        report = harness.run(config)
    except OperatorHypothesisError as exc:
        logger.error("operator hypothesis violated at %s (value %s): %s", exc.point, exc.value, exc)
        return EXIT_ERROR
    except VerificationError as exc:
        logger.error("%s failed: %s", config.command, exc)
        return EXIT_ERROR
    out = config.out or OUTPUT_DIR
    write_report(report, out)
    print(f"{config.command}: {'passed' if report.passed else 'FAILED'} ({len(report.rows)} rows, reports in {out})")
    return EXIT_PASSED if report.passed else EXIT_FAILED

if __name__ == "__main__":
    sys.exit(main())
