"""
Command-line front end.

    hamflow simulate <scenario-file>
    hamflow compare <scenario-file>
    hamflow quantum <scenario-file>
    hamflow list-models

Exit codes: 0 success, 1 invalid scenario, 2 runtime or check failure,
3 I/O failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from hamflow.scenarios.runner import run
from hamflow.scenarios.scenario import TRAJECTORY_MODES, ScenarioMode, parse_scenario
from hamflow.tools.errors import HamflowError, IntegrationError, ScenarioError
from hamflow.tools.hamiltonians import list_models

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

COMMAND_MODES = {
    "simulate": TRAJECTORY_MODES,
    "compare": (ScenarioMode.COMPARE,),
    "quantum": (ScenarioMode.QUANTUM,),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamflow", description="Modified-Hamiltonian dynamics on Minkowski space-time")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "Integrate a canonical4d, gauge4d or reference3d scenario"),
        ("compare", "Run two equivalent flows and report their deviation"),
        ("quantum", "Evolve a wave packet and check the expectation-value laws"),
    ):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("scenario", help="Path to the TOML scenario file")
        command.add_argument("--output-dir", default=None, help="Directory for relative output paths")
    commands.add_parser("list-models", help="List the built-in Hamiltonian models")
    return parser


def _run_command(command: str, scenario_path: str, output_dir, out) -> int:
    try:
        text = Path(scenario_path).read_bytes()
    except OSError as err:
        print(f"Cannot read scenario: {err}", file=sys.stderr)
        return EXIT_IO

    try:
        scenario = parse_scenario(text)
    except ScenarioError as err:
        print(err, file=sys.stderr)
        return EXIT_INVALID
    if scenario.mode not in COMMAND_MODES[command]:
        allowed = ", ".join(mode.value for mode in COMMAND_MODES[command])
        print(f"Mode '{scenario.mode.value}' cannot be run by '{command}' (expected {allowed})", file=sys.stderr)
        return EXIT_INVALID

    try:
        report = run(scenario, output_dir)
    except IntegrationError as err:
        print(f"Integration failed at step {err.step_index}: {err.cause}", file=sys.stderr)
        return EXIT_RUNTIME
    except HamflowError as err:
        print(f"Run failed: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as err:
        print(f"Cannot write output: {err}", file=sys.stderr)
        return EXIT_IO

    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.ok else EXIT_RUNTIME


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "list-models":
        for entry in list_models():
            print(f"{entry.name}: {entry.formula} [{', '.join(entry.parameters)}]", file=out)
        return EXIT_OK
    return _run_command(args.command, args.scenario, args.output_dir, out)


if __name__ == "__main__":
    sys.exit(main())
