import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from app.api.commands import HANDLERS, run
from app.api.render import render
from app.config import get_settings
from app.errors import StructuralError, SyzError
from app.models import CommandRequest

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT_ERROR = 2


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>",
        level=level,
    )


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="syz-mirror",
        description="Toric mirror symmetry: superpotentials, Jacobian rings and SYZ transform checks",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sub = subparsers.add_parser(name)
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--preset", help="built-in polytope, e.g. CP2")
        source.add_argument("--file", help="polytope JSON document")
        sub.add_argument("--cutoff", type=int, default=settings.default_cutoff, help="loop-space truncation K")
        sub.add_argument("--q", default="", help="Kahler parameters, e.g. q1=1/2,q2=3")
        sub.add_argument("--tol", type=float, default=settings.residual_tolerance, help="critical point residual tolerance")
        sub.add_argument("--format", dest="output_format", choices=["json", "text"], default=settings.output_format)
        sub.add_argument("--out", help="write the report here instead of stdout")
    return parser


def parse_q_assignments(text: str) -> dict[str, str]:
    """Split 'q1=1/2,q2=3' into {'q1': '1/2', 'q2': '3'}; values are checked later."""
    values: dict[str, str] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise StructuralError(f"--q expects name=value pairs, got {part!r}")
        values[name.strip()] = value.strip()
    return values


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    configure_logging(settings.log_level)

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        request = CommandRequest(
            command=args.command,
            preset=args.preset,
            file=args.file,
            cutoff=args.cutoff,
            q=parse_q_assignments(args.q),
            tol=args.tol,
            output_format=args.output_format,
            out=args.out,
        )
        report = run(request)
    except (SyzError, ValidationError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR

    text = render(report, request.output_format)
    if request.out:
        Path(request.out).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Report written to {request.out}")
    else:
        print(text)
    return EXIT_FAILED if report.status == "fail" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
