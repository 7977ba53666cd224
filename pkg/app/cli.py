"""
Command-Line Entry Point
verify, report, compute and table subcommands writing one report to stdout
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from app.models import OutputFormat
from core.config import settings
from core.exceptions import ConsistencyError, ConvergenceError, PreconditionError
from core.logging_config import get_logger, setup_logging
from services.report_service import ReportService
from services.verification_service import VerificationService

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

VERIFY_NAMES = ("thm61", "thm72", "lem71", "thm81", "eq82", "eq320", "eq314", "eq54", "lem21", "eq910", "zeta", "eq416", "prop32")
REPORT_NAMES = ("prop94", "residue-f")
COMPUTE_NAMES = ("f0", "feps", "pairing", "phi", "g0", "growth")


def _key_value(text: str) -> List[str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return [key, value]


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help=f"Target accuracy (default {settings.TOL:g})")
    common.add_argument("--max-height", type=float, default=None, help=f"Vertical-line height cap (default {settings.MAX_HEIGHT:g})")
    common.add_argument("--k-cap", type=int, default=None, help=f"Lattice k truncation cap (default {settings.K_CAP})")
    common.add_argument("--beta", type=float, default=None, help=f"Prime bound factor for R (default {settings.BETA:.6f})")
    common.add_argument("--c", type=float, default=None, help=f"Contour abscissa (default {settings.CONTOUR_C:g})")
    common.add_argument("--flattened", action="store_true", help="Use the flattened test-function pair")
    common.add_argument("--out", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--out-file", type=Path, default=None, help="Write the report here instead of stdout")
    common.add_argument("--params", type=_key_value, nargs="*", default=[], metavar="KEY=VALUE")
    common.add_argument("--R", type=int, default=None)
    common.add_argument("--Q", type=int, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="psiarith",
        description="Numerical verification of lattice-symbol and Eisenstein identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", parents=[common], help="Run an identity check")
    verify.add_argument("name", choices=VERIFY_NAMES)
    report = sub.add_parser("report", parents=[common], help="Produce a diagnostic report")
    report.add_argument("name", choices=REPORT_NAMES)
    compute = sub.add_parser("compute", parents=[common], help="Evaluate a quantity")
    compute.add_argument("name", choices=COMPUTE_NAMES)
    table = sub.add_parser("table", parents=[common], help="Export a coefficient table")
    table.add_argument("name", choices=("coeffs",))
    return parser


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {key: value for key, value in args.params}
    if args.R is not None:
        params["R"] = args.R
    if args.Q is not None:
        params["Q"] = args.Q
    return params


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {"tol": args.tol, "max_height": args.max_height, "k_cap": args.k_cap, "beta": args.beta, "c": args.c}


def _write(data: bytes, out_file: Optional[Path]) -> None:
    if out_file is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out_file.write_bytes(data)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Execute one subcommand

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        0 when every check passed, 1 when a check failed or a computation did
        not converge, 2 on usage or precondition errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    service = VerificationService()
    writer = ReportService()
    params = _params(args)
    try:
        if args.command == "table":
            R = int(params.get("R", 1))
            Q = int(params.get("Q", 3))
            _write(writer.emit_table(service.table(R, Q), args.out), args.out_file)
            return EXIT_OK
        handler = getattr(service, args.command)
        report = handler(args.name, params, _overrides(args), args.flattened)
    except PreconditionError as e:
        logger.error("precondition failed", extra={"command": args.command, "error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ConsistencyError) as e:
        logger.error("computation failed", extra={"command": args.command, "error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED

    _write(writer.emit(report, args.out), args.out_file)
    return EXIT_OK if report.passed else EXIT_FAILED


def main() -> None:
    setup_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
