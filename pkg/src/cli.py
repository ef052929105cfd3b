"""Command-line front end: ``python -m src <command> [flags]``.

Exit codes: 0 when every check passes, 1 when a check or a solver fails,
2 for usage and configuration errors.
"""
import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from src.commands import COMMANDS_REGISTRY
from src.lab.errors import DomainError, LabError, SourceError
from src.lab.export import write_csv, write_json
from src.schemas import CommandResult, RunConfig
from src.settings import settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# Flag and config-file names that differ from RunConfig fields.
_ALIASES = {
    "l": "l_values",
    "beta": "beta_values",
    "f": "source",
    "levels": "n_levels",
    "grid": "n_grid",
    "subsets": "n_subsets",
}
_LIST_FIELDS = {"l_values", "beta_values", "checks"}


class ConfigFileError(ValueError):
    pass


def _split_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _normalize(key: str, value: Any) -> tuple[str, Any]:
    key = key.strip().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key in _LIST_FIELDS and isinstance(value, str):
        value = _split_list(value)
    return key, value


def load_config_file(path: Path) -> Dict[str, Any]:
    """Parse ``key=value`` lines; '#' comments and blank lines are ignored."""
    values: Dict[str, Any] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFileError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key, value = _normalize(key, value.strip())
        if key not in RunConfig.model_fields:
            raise ConfigFileError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src",
        description="Weighted Schwarz symmetrization verification lab",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, module in COMMANDS_REGISTRY.items():
        sub = subparsers.add_parser(name, help=module.COMMAND["description"])
        sub.add_argument("--shape", help="Gallery shape: square, rectangle, ngon:n:r, disk, lshape")
        sub.add_argument("--vertices", type=Path, help="Vertex file, one 'x y' pair per line")
        sub.add_argument("--l", help="Weight exponent(s) in (-2, 0], comma separated")
        sub.add_argument("--beta", help="Robin parameter(s) > 0, comma separated")
        sub.add_argument("--f", help="Source: one, zero, nonradial, radial or const:c")
        sub.add_argument("--h", type=float, help="Target mesh size")
        sub.add_argument("--levels", type=int, help="Distribution levels")
        sub.add_argument("--grid", type=int, help="Radial grid intervals")
        sub.add_argument("--eigen-grid", type=int, help="Radial eigen grid intervals")
        sub.add_argument("--n-radii", type=int, help="Radii sampled by the pointwise check")
        sub.add_argument("--subsets", type=int, help="Random subsets for Hardy-Littlewood")
        sub.add_argument("--refinements", type=int, help="Mesh levels for the convergence study")
        sub.add_argument("--checks", help="Comma-separated checks to run (empty string for none)")
        sub.add_argument("--seed", type=int, help="Seed for random subsets")
        sub.add_argument("--out", type=Path, help="Output directory")
        sub.add_argument("--config", type=Path, help="key=value config file; flags win")
        sub.add_argument("--mesh-dump", action="store_true", default=None, help="Write the mesh text dump")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        key, value = _normalize(key, value)
        values[key] = value
    return RunConfig(**values)


def write_outputs(result: CommandResult, out: Path) -> None:
    write_json(result, out / f"{result.command}.json", exclude={"tables"})
    for table in result.tables:
        write_csv(out / table.name, table.header, table.rows)


_VALUE_FLAGS = ("--l", "--beta")


def join_flag_values(argv: Sequence[str]) -> List[str]:
    """Attach the value to --l/--beta so lists like "-0.5,-1" are not read as options."""
    joined: List[str] = []
    args = iter(argv)
    for token in args:
        if token in _VALUE_FLAGS:
            value = next(args, None)
            if value is not None:
                token = f"{token}={value}"
        joined.append(token)
    return joined


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(join_flag_values(argv))
    logging.basicConfig(
        level=getattr(logging, settings.LAB_LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        config = build_config(args)
    except (ValidationError, ConfigFileError) as exc:
        logger.error(f"Invalid configuration: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    module = COMMANDS_REGISTRY[args.command]
    try:
        result = asyncio.run(module.run(config))
    except (DomainError, SourceError) as exc:
        logger.error(f"{args.command} rejected its input: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LabError as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    write_outputs(result, config.out)
    if not result.ok:
        print("failed checks: " + ", ".join(result.failed_checks), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK
