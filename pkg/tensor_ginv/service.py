import logging
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, Field

from tensor_ginv import catalog
from tensor_ginv.config import settings
from tensor_ginv.errors import (
    EXIT_CHECKS_FAILED,
    EXIT_OK,
    ShapeMismatch,
    TensorGinvError,
)
from tensor_ginv.fixtures import run_counterexample, run_worked_example
from tensor_ginv.generators import make_rng, random_hpd, random_invertible, random_tensor, random_unitary
from tensor_ginv.geninv import (
    CheckReport,
    WeightPair,
    mp_inverse,
    penrose_report,
    relative_residual,
    weighted_conj_transpose,
    wmp_inverse,
)
from tensor_ginv.rol import RolReport, check_rol, check_triple_rol, check_weighted_rol
from tensor_ginv.spectral import full_rank_decomposition, tensor_svd
from tensor_ginv.tensor import DenseTensor, identity_tensor, reshape_rank
from tensor_ginv.tensor_io import tensor_to_dict

logger = logging.getLogger(__name__)

Status = Literal["ok", "failed", "error"]

GEN_KINDS = ("tensor", "hpd", "unitary", "invertible")


class CommandReport(BaseModel):
    """Machine-readable outcome of one subcommand; the same schema for every command."""

    command: str
    status: Status
    exit_code: int
    tolerance: float
    checks: List[CheckReport] = Field(default_factory=list)
    outputs: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    summary: Dict[str, Any] = Field(default_factory=dict)
    message: Optional[str] = None

    @classmethod
    def from_checks(
        cls,
        command: str,
        tolerance: float,
        checks: Sequence[CheckReport] = (),
        outputs: Optional[Dict[str, DenseTensor]] = None,
        summary: Optional[Dict[str, Any]] = None,
    ) -> "CommandReport":
        passed = all(c.passed for c in checks)
        failed = [c.name for c in checks if not c.passed]
        return cls(
            command=command,
            status="ok" if passed else "failed",
            exit_code=EXIT_OK if passed else EXIT_CHECKS_FAILED,
            tolerance=tolerance,
            checks=list(checks),
            outputs={name: tensor_to_dict(t) for name, t in (outputs or {}).items()},
            summary=summary or {},
            message=None if passed else f"Checks failed: {', '.join(failed)}",
        )

    @classmethod
    def from_error(cls, command: str, tolerance: float, error: TensorGinvError) -> "CommandReport":
        return cls(
            command=command,
            status="error",
            exit_code=error.exit_code,
            tolerance=tolerance,
            message=f"{type(error).__name__}: {str(error)}",
        )


def _rol_summary(report: RolReport) -> Dict[str, Any]:
    return {
        "law_holds": report.law_holds,
        "conditions_hold": report.conditions_hold,
        "law_residual": report.law_residual,
    }


class VerificationService:
    """
    Runs one computation per subcommand and packages the result as a ``CommandReport``.

    Library errors are caught here and turned into reports with ``status="error"``
    and the error's exit code.
    """

    def __init__(
        self,
        tol: Optional[float] = None,
        rank_tol: Optional[float] = None,
        allow_indefinite: bool = False,
        seed: Optional[int] = None,
    ):
        """
        Initialize the service.

        Args:
            tol: check tolerance, default settings.TOLERANCE
            rank_tol: relative rank truncation, default from settings
            allow_indefinite: accept Hermitian invertible weights that are not positive definite
            seed: seed for generated instances, default settings.SEED
        """
        self.tol = settings.TOLERANCE if tol is None else tol
        self.rank_tol = settings.RANK_TOLERANCE if rank_tol is None else rank_tol
        self.allow_indefinite = allow_indefinite
        self.seed = settings.SEED if seed is None else seed

    def _run(self, command: str, action: Callable[[], CommandReport]) -> CommandReport:
        try:
            report = action()
        except TensorGinvError as e:
            logger.error(f"Error running '{command}': {str(e)}")
            return CommandReport.from_error(command, self.tol, e)
        if report.status == "failed":
            logger.error(f"'{command}': {report.message}")
        return report

    @staticmethod
    def _require(tensors: Sequence[DenseTensor], count: int, command: str) -> None:
        if len(tensors) != count:
            raise ShapeMismatch(f"'{command}' takes {count} input tensor(s), got {len(tensors)}")

    def _weights(self, a: DenseTensor, m: Optional[DenseTensor], n: Optional[DenseTensor]) -> WeightPair:
        return WeightPair.for_shape(a.shape, m, n, allow_indefinite=self.allow_indefinite)

    def pinv(self, tensors: Sequence[DenseTensor]) -> CommandReport:
        """Moore-Penrose inverse of the single input, with its Penrose residuals."""

        def action():
            self._require(tensors, 1, "pinv")
            a = tensors[0]
            x = mp_inverse(a, self.rank_tol)
            return CommandReport.from_checks(
                "pinv", self.tol, [penrose_report(a, x, tol=self.tol)],
                outputs={"X": x}, summary={"rank": reshape_rank(a, self.rank_tol)},
            )

        return self._run("pinv", action)

    def wpinv(
        self,
        tensors: Sequence[DenseTensor],
        m: Optional[DenseTensor],
        n: Optional[DenseTensor],
    ) -> CommandReport:
        """
        Weighted Moore-Penrose inverse.

        Args:
            tensors: the single tensor to invert
            m: row weight
            n: column weight

        Returns:
            Report with output ``X`` and the weighted Penrose residuals
        """

        def action():
            self._require(tensors, 1, "wpinv")
            if m is None and n is None:
                raise ShapeMismatch("'wpinv' needs --weight-m and/or --weight-n")
            a = tensors[0]
            w = self._weights(a, m, n)
            x = wmp_inverse(a, w, self.rank_tol)
            return CommandReport.from_checks(
                "wpinv", self.tol, [penrose_report(a, x, w, self.tol)], outputs={"X": x},
                summary={"positive_definite": w.m_factors.positive_definite and w.n_factors.positive_definite},
            )

        return self._run("wpinv", action)

    def svd(self, tensors: Sequence[DenseTensor]) -> CommandReport:
        def action():
            self._require(tensors, 1, "svd")
            a = tensors[0]
            f = tensor_svd(a)
            eye_u = identity_tensor(a.row_modes)
            eye_v = identity_tensor(a.col_modes)
            check = CheckReport.from_residuals("svd", {
                "reconstruction": relative_residual(a, f.u @ f.d @ f.v.H),
                "u_unitary": relative_residual(eye_u, f.u.H @ f.u),
                "v_unitary": relative_residual(eye_v, f.v.H @ f.v),
            }, self.tol)
            return CommandReport.from_checks(
                "svd", self.tol, [check], outputs={"U": f.u, "D": f.d, "V": f.v},
                summary={"sigma": list(f.sigma)},
            )

        return self._run("svd", action)

    def frd(self, tensors: Sequence[DenseTensor]) -> CommandReport:
        def action():
            self._require(tensors, 1, "frd")
            a = tensors[0]
            f = full_rank_decomposition(a, self.rank_tol)
            eye = identity_tensor((f.r,))
            check = CheckReport.from_residuals("frd", {
                "reconstruction": relative_residual(a, f.f @ f.g),
                "left_invertible": relative_residual(eye, mp_inverse(f.f, self.rank_tol) @ f.f),
                "right_invertible": relative_residual(eye, f.g @ mp_inverse(f.g, self.rank_tol)),
            }, self.tol)
            return CommandReport.from_checks(
                "frd", self.tol, [check], outputs={"F": f.f, "G": f.g}, summary={"rank": f.r},
            )

        return self._run("frd", action)

    def product(self, tensors: Sequence[DenseTensor]) -> CommandReport:
        """Left-to-right Einstein product of two or more inputs."""

        def action():
            if len(tensors) < 2:
                raise ShapeMismatch(f"'product' takes at least 2 input tensors, got {len(tensors)}")
            c = tensors[0]
            for t in tensors[1:]:
                c = c @ t
            return CommandReport.from_checks(
                "product", self.tol, outputs={"C": c}, summary={"shape": str(c.shape)},
            )

        return self._run("product", action)

    def hash_transpose(
        self,
        tensors: Sequence[DenseTensor],
        m: Optional[DenseTensor],
        n: Optional[DenseTensor],
    ) -> CommandReport:
        """Weighted conjugate transpose ``N^-1 A* M``."""

        def action():
            self._require(tensors, 1, "hash")
            a = tensors[0]
            return CommandReport.from_checks(
                "hash", self.tol, outputs={"A_hash": weighted_conj_transpose(a, n, m)},
            )

        return self._run("hash", action)

    def check_rol(self, tensors: Sequence[DenseTensor]) -> CommandReport:
        def action():
            self._require(tensors, 2, "check-rol")
            report = check_rol(tensors[0], tensors[1], self.tol, self.rank_tol)
            return CommandReport.from_checks(
                "check-rol", self.tol, [*report.condition_checks, report.to_check("rol_equivalence")],
                outputs={"direct": report.direct, "reversed": report.reversed},
                summary=_rol_summary(report),
            )

        return self._run("check-rol", action)

    def check_wrol(
        self,
        tensors: Sequence[DenseTensor],
        m: Optional[DenseTensor],
        n: Optional[DenseTensor],
        p: Optional[DenseTensor],
    ) -> CommandReport:
        def action():
            self._require(tensors, 2, "check-wrol")
            report = check_weighted_rol(tensors[0], tensors[1], m, n, p, self.tol, self.rank_tol)
            return CommandReport.from_checks(
                "check-wrol", self.tol, [*report.condition_checks, report.to_check("weighted_rol_equivalence")],
                outputs={"direct": report.direct, "reversed": report.reversed},
                summary=_rol_summary(report),
            )

        return self._run("check-wrol", action)

    def check_triple(
        self,
        tensors: Sequence[DenseTensor],
        m: Optional[DenseTensor],
        n: Optional[DenseTensor],
    ) -> CommandReport:
        """
        Triple-product sufficient conditions. The check fails only when the
        conditions hold and the law does not.
        """

        def action():
            self._require(tensors, 3, "check-triple")
            report = check_triple_rol(*tensors, m, n, self.tol, self.rank_tol)
            asserted = report.law_residual if report.conditions_hold else 0.0
            check = CheckReport.from_residuals(
                "triple_rol", {"law_under_conditions": asserted}, self.tol,
                details={"law": report.law_residual},
            )
            return CommandReport.from_checks(
                "check-triple", self.tol, [*report.condition_checks, check],
                outputs={"direct": report.direct, "reversed": report.reversed},
                summary=_rol_summary(report),
            )

        return self._run("check-triple", action)

    def list_identities(self) -> CommandReport:
        cases = {
            key: {"kind": case.kind.value, "roles": list(case.roles), "anchor": case.anchor}
            for key, case in catalog.CATALOG.items()
        }
        return CommandReport.from_checks("identities", self.tol, summary={"cases": cases})

    def identities(
        self,
        keys: Sequence[str] = (),
        tensors: Sequence[DenseTensor] = (),
        weights: Optional[Dict[str, DenseTensor]] = None,
        instances: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> CommandReport:
        """
        Run catalog cases on seeded instances, or a single case on given inputs.

        Args:
            keys: case keys; empty runs the whole catalog
            tensors: inputs for a single case, in the order of its tensor roles
            weights: weight tensors by role (M, N, P, Q)
            instances: instances per case, default from settings
            workers: worker threads for the catalog run
        """
        rank_tol = settings.CATALOG_RANK_TOLERANCE if self.rank_tol is None else self.rank_tol

        def evaluate_given():
            if len(keys) != 1:
                raise ShapeMismatch("explicit inputs need exactly one --case")
            case = catalog.get_case(keys[0])
            self._require(tensors, len(case.tensor_roles), f"identities --case {case.key}")
            inputs = dict(zip(case.tensor_roles, tensors))
            inputs.update(weights or {})
            report = catalog.evaluate_identity(case.key, inputs, self.tol, rank_tol)
            return CommandReport.from_checks("identities", self.tol, [report], summary={"anchor": case.anchor})

        def run_seeded():
            summary = catalog.run_catalog(
                keys=list(keys) or None, instances=instances, seed=self.seed,
                tol=self.tol, rank_tol=rank_tol, workers=workers,
            )
            checks = [
                CheckReport(
                    name=key,
                    residuals={"max_residual": case.max_residual},
                    tolerance=self.tol,
                    passed=case.failures == 0 and case.unsatisfiable == 0,
                    marginal=case.marginals > 0,
                    details={"failures": case.failures, "instances": case.instances},
                )
                for key, case in summary.cases.items()
            ]
            return CommandReport.from_checks(
                "identities", self.tol, checks, summary=summary.model_dump(mode="json"),
            )

        return self._run("identities", evaluate_given if tensors else run_seeded)

    def verify(
        self,
        tensors: Sequence[DenseTensor],
        m: Optional[DenseTensor] = None,
        n: Optional[DenseTensor] = None,
    ) -> CommandReport:
        """Penrose residuals of a candidate ``X`` for ``A``, weighted when weights are given."""

        def action():
            self._require(tensors, 2, "verify")
            a, x = tensors
            w = self._weights(a, m, n) if m is not None or n is not None else None
            return CommandReport.from_checks("verify", self.tol, [penrose_report(a, x, w, self.tol)])

        return self._run("verify", action)

    def gen(
        self,
        kind: str,
        row_modes: Sequence[int],
        col_modes: Sequence[int] = (),
        rank: Optional[int] = None,
    ) -> CommandReport:
        """
        Seeded random tensor.

        ``hpd``, ``unitary`` and ``invertible`` are square over ``row_modes``.
        """

        def action():
            rng = make_rng(self.seed)
            if kind == "tensor":
                t = random_tensor(rng, row_modes, col_modes, rank=rank)
            elif kind == "hpd":
                t = random_hpd(rng, row_modes)
            elif kind == "unitary":
                t = random_unitary(rng, row_modes)
            elif kind == "invertible":
                t = random_invertible(rng, row_modes)
            else:
                raise ShapeMismatch(f"Unknown kind '{kind}'; expected one of {', '.join(GEN_KINDS)}")
            return CommandReport.from_checks(
                "gen", self.tol, outputs={"T": t}, summary={"kind": kind, "seed": self.seed},
            )

        return self._run("gen", action)

    def fixtures(self) -> CommandReport:
        """Run the built-in worked example and counterexample."""

        def action():
            checks = run_worked_example() + run_counterexample()
            worked = checks[0]
            return CommandReport.from_checks(
                "fixtures", self.tol, checks,
                summary={"worked_example_max_deviation": worked.max_residual},
            )

        return self._run("fixtures", action)
