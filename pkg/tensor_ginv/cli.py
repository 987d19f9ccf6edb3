"""
Command-line front end.

    python -m tensor_ginv pinv -i a.json --out x.json
    python -m tensor_ginv verify -i a.json -i x.json --emit-report
    python -m tensor_ginv identities --case rv2 --instances 20

Exit codes: 0 all checks passed, 1 checks ran and failed, 2 input or shape
error, 3 numerical error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field, field_validator

from tensor_ginv.catalog import CATALOG
from tensor_ginv.config import settings
from tensor_ginv.errors import EXIT_INPUT_ERROR, TensorGinvError
from tensor_ginv.service import GEN_KINDS, CommandReport, VerificationService
from tensor_ginv.tensor import DenseTensor, as_modes
from tensor_ginv.tensor_io import dumps, load_tensor, write_text

logger = logging.getLogger(__name__)

COMMANDS = (
    "pinv", "wpinv", "svd", "frd", "product", "hash", "check-rol", "check-wrol",
    "check-triple", "identities", "verify", "gen", "fixtures",
)

SEED_LIMIT = 2 ** 64


class RunConfig(BaseModel):
    """Validated options of one CLI invocation."""

    command: str
    inputs: List[Path] = Field(default_factory=list)
    weight_m: Optional[Path] = None
    weight_n: Optional[Path] = None
    weight_p: Optional[Path] = None
    weight_q: Optional[Path] = None
    tol: float = settings.TOLERANCE
    rank_tol: Optional[float] = None
    seed: int = settings.SEED
    out: Optional[str] = None
    allow_non_hpd: bool = False
    emit_report: bool = False
    cases: List[str] = Field(default_factory=list)
    kind: str = "tensor"
    row_modes: List[int] = Field(default_factory=list)
    col_modes: List[int] = Field(default_factory=list)
    rank: Optional[int] = None
    instances: Optional[int] = None
    workers: Optional[int] = None
    list_cases: bool = False

    @field_validator("command")
    @classmethod
    def _known_command(cls, v: str) -> str:
        if v not in COMMANDS:
            raise ValueError(f"unknown subcommand '{v}'")
        return v

    @field_validator("tol")
    @classmethod
    def _positive_tol(cls, v: float) -> float:
        if not v > 0.0:
            raise ValueError(f"tolerance must be > 0, got {v}")
        return v

    @field_validator("rank_tol")
    @classmethod
    def _rank_tol(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 <= v < 1.0:
            raise ValueError(f"rank tolerance must lie in [0, 1), got {v}")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, v: int) -> int:
        if not 0 <= v < SEED_LIMIT:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {v}")
        return v

    @field_validator("instances", "workers")
    @classmethod
    def _positive_count(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"count must be >= 1, got {v}")
        return v


def _load_optional(path: Optional[Path]) -> Optional[DenseTensor]:
    return load_tensor(path) if path is not None else None


def _dispatch(config: RunConfig, service: VerificationService) -> CommandReport:
    command = config.command
    if command == "fixtures":
        return service.fixtures()
    if command == "gen":
        return service.gen(config.kind, config.row_modes, config.col_modes, config.rank)
    if command == "identities" and config.list_cases:
        return service.list_identities()

    tensors = [load_tensor(p) for p in config.inputs]
    m = _load_optional(config.weight_m)
    n = _load_optional(config.weight_n)
    p = _load_optional(config.weight_p)

    if command == "pinv":
        return service.pinv(tensors)
    if command == "wpinv":
        return service.wpinv(tensors, m, n)
    if command == "svd":
        return service.svd(tensors)
    if command == "frd":
        return service.frd(tensors)
    if command == "product":
        return service.product(tensors)
    if command == "hash":
        return service.hash_transpose(tensors, m, n)
    if command == "check-rol":
        return service.check_rol(tensors)
    if command == "check-wrol":
        return service.check_wrol(tensors, m, n, p)
    if command == "check-triple":
        return service.check_triple(tensors, m, n)
    if command == "verify":
        return service.verify(tensors, m, n)
    weights = {"M": m, "N": n, "P": p, "Q": _load_optional(config.weight_q)}
    return service.identities(
        keys=config.cases,
        tensors=tensors,
        weights={role: w for role, w in weights.items() if w is not None},
        instances=config.instances,
        workers=config.workers,
    )


def _output_path(out: str, name: str) -> Path:
    path = Path(out)
    return path.with_name(f"{path.stem}_{name}{path.suffix or '.json'}")


def emit(report: CommandReport, config: RunConfig) -> None:
    """
    Write the command result.

    The full report goes to ``--out`` with ``--emit-report`` or when the
    command produced no tensors. Otherwise tensors are written as interchange
    files: a single output to ``--out`` itself, several outputs to
    ``<stem>_<name>.json`` next to it.
    """
    if report.status == "error" and not config.emit_report:
        return
    if config.emit_report or not report.outputs:
        write_text(dumps(report), config.out)
        return
    if len(report.outputs) == 1:
        write_text(dumps(next(iter(report.outputs.values()))), config.out)
    elif config.out is None or config.out == "-":
        write_text(dumps(report.outputs), None)
    else:
        for name, payload in report.outputs.items():
            write_text(dumps(payload), _output_path(config.out, name))


def run(config: RunConfig) -> int:
    """Execute one validated invocation and return its exit code."""
    service = VerificationService(
        tol=config.tol,
        rank_tol=config.rank_tol,
        allow_indefinite=config.allow_non_hpd,
        seed=config.seed,
    )
    try:
        report = _dispatch(config, service)
    except TensorGinvError as e:
        report = CommandReport.from_error(config.command, config.tol, e)
    emit(report, config)
    if report.message:
        sys.stderr.write(f"{config.command}: {report.message}\n")
    return report.exit_code


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", dest="inputs", action="append", default=[],
                        help="Tensor file (repeatable, order matters)")
    common.add_argument("--weight-m", type=Path, help="Row weight M")
    common.add_argument("--weight-n", type=Path, help="Column weight N")
    common.add_argument("--weight-p", type=Path, help="Inner weight P")
    common.add_argument("--weight-q", type=Path, help="Second inner weight Q (catalog only)")
    common.add_argument("--tol", type=float, default=settings.TOLERANCE, help="Check tolerance")
    common.add_argument("--rank-tol", type=float, default=settings.RANK_TOLERANCE,
                        help="Relative singular value cutoff for rank decisions")
    common.add_argument("--seed", type=int, default=settings.SEED, help="Seed for generated instances")
    common.add_argument("--out", help="Output path; '-' or absent writes to stdout")
    common.add_argument("--allow-non-hpd", action="store_true",
                        help="Accept Hermitian invertible weights that are not positive definite")
    common.add_argument("--emit-report", action="store_true", help="Write the full JSON report")

    parser = argparse.ArgumentParser(
        prog="tensor_ginv",
        description="Tensor Moore-Penrose inverses, reverse-order laws and identity checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "identities":
            p.add_argument("--case", dest="cases", action="append", default=[],
                           choices=sorted(CATALOG), metavar="KEY", help="Catalog case (repeatable)")
            p.add_argument("--instances", type=int, help="Seeded instances per case")
            p.add_argument("--workers", type=int, help="Worker threads")
            p.add_argument("--list", dest="list_cases", action="store_true", help="List catalog cases")
        elif name == "gen":
            p.add_argument("--kind", choices=GEN_KINDS, default="tensor")
            p.add_argument("--row-modes", default="2,2", help="Comma-separated row modes, e.g. 2,3")
            p.add_argument("--col-modes", default="", help="Comma-separated column modes")
            p.add_argument("--rank", type=int, help="Reshaping rank of a generated tensor")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse arguments into a ``RunConfig``; invalid values raise ``ValueError``."""
    args = vars(_build_parser().parse_args(argv))
    for key in ("row_modes", "col_modes"):
        if key in args:
            args[key] = as_modes(args[key])
    args = {k: v for k, v in args.items() if v is not None}
    return RunConfig(**args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT, stream=sys.stderr)
    try:
        config = parse_config(argv)
    except ValueError as e:
        sys.stderr.write(f"Invalid arguments: {str(e)}\n")
        return EXIT_INPUT_ERROR
    except SystemExit as e:
        # argparse exits on --help and on unknown options
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
