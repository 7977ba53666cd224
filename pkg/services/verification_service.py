"""
Verification Service
Runs named identity checks, diagnostic reports and computations and
collects the outcome in a RunReport
"""
import math
import threading
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.models import (
    CheckResult,
    CheckStatus,
    CoeffTable,
    Comparison,
    Estimate,
    PairingRoute,
    RunReport,
)
from core import eisenstein, forms, series
from core.arith import R_violations, minimal_R, squarefree_odd_array
from core.config import settings
from core.exceptions import ConsistencyError, PreconditionError
from core.logging_config import get_logger
from core.testfn import TestFunction, canonical_u, canonical_v
from core.wigner import euler_apply_check, euler_apply_convergence
from core.zeta import (
    PRINTED_RESIDUE,
    f_kernel,
    f_residue_at_1,
    sqfree_odd_dirichlet,
    zeta_star_residual,
    zeta_values,
)

logger = get_logger(__name__)

# Flatness width for checks that go through Mellin components
MELLIN_FLAT_WIDTH = 0.25

# Settings a caller may override per run, keyed by flag name
OVERRIDABLE = {
    "tol": "TOL",
    "max_height": "MAX_HEIGHT",
    "k_cap": "K_CAP",
    "beta": "BETA",
    "c": "CONTOUR_C",
    "xi_cut": "XI_CUT",
    "height": "DEFAULT_HEIGHT",
    "flat_width": "FLAT_WIDTH",
    "gl_order": "GL_ORDER",
    "seed": "SEED",
}

# Tolerance floors of checks whose identity is only reachable to this accuracy
CHECK_FLOORS = {
    "eq320": 1e-6,
    "eq314": 1e-4,
    "eq54": 3e-5,
    "lem21": 1e-6,
    "eq910": 1e-6,
    "eq416": 1e-6,
    "prop32": 1e-4,
    "f0": 1e-3,
    "feps": 1e-3,
    "g0": 1e-6,
}

ZETA_REFERENCE = (
    (2.0, math.pi ** 2 / 6.0),
    (0.0, -0.5),
    (-1.0, -1.0 / 12.0),
    (3.0, 1.2020569031595942854),
)
FIRST_ZERO = complex(0.5, 14.134725142)
ZERO_TOL = 1e-6
ZETA_TOL = 1e-10

LEM21_POINTS = ((0.8, 0.3), (1.0, 0.0), (1.2, -0.5), (0.6, 1.0), (1.4, 0.2))

# Observed order of the fourth-order stencil between steps 1e-2 and 5e-3
MIN_FD_ORDER = 3.5


def parse_number(value: Any) -> Any:
    """
    Coerce a parameter to int, float or complex

    Accepts numbers, lists of them and strings such as "15", "2.5",
    "3+4i" or "3+4j". Other strings are returned unchanged.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, float, complex)):
        return value
    if isinstance(value, (list, tuple)):
        return [parse_number(x) for x in value]
    text = str(value).strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        return text


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(x) for x in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _number_list(value: Any) -> List[Any]:
    value = parse_number(value)
    if isinstance(value, str):
        return [parse_number(x) for x in value.split(",") if x]
    if isinstance(value, list):
        return value
    return [value]


@contextmanager
def override_settings(overrides: Dict[str, Any]) -> Iterator[None]:
    """Temporarily replace settings fields named by their flag names"""
    saved: Dict[str, Any] = {}
    try:
        for key, value in sorted(overrides.items()):
            if value is None:
                continue
            field = OVERRIDABLE.get(key.lower())
            if field is None:
                raise PreconditionError(f"unknown override {key!r}")
            current = getattr(settings, field)
            saved[field] = current
            setattr(settings, field, type(current)(parse_number(value)))
        yield
    finally:
        for field, value in saved.items():
            setattr(settings, field, value)


def effective_config() -> Dict[str, Any]:
    """Echo of the settings that shape numerical results"""
    return {key: getattr(settings, field) for key, field in sorted(OVERRIDABLE.items())}


class VerificationService:
    """Registry of verify, report and compute operations"""

    def __init__(self):
        """Build the name tables"""
        self.checks: Dict[str, Callable[..., RunReport]] = {
            "thm61": self._thm61,
            "thm72": self._thm72,
            "lem71": self._lem71,
            "thm81": self._thm81,
            "eq82": self._eq82,
            "eq320": self._eq320,
            "eq314": self._eq314,
            "eq54": self._eq54,
            "lem21": self._lem21,
            "eq910": self._eq910,
            "zeta": self._zeta,
            "eq416": self._eq416,
            "prop32": self._prop32,
        }
        self.reports: Dict[str, Callable[..., RunReport]] = {
            "prop94": self._prop94,
            "residue-f": self._residue_f,
        }
        self.computations: Dict[str, Callable[..., RunReport]] = {
            "f0": self._f0,
            "feps": self._feps,
            "pairing": self._pairing,
            "phi": self._phi,
            "g0": self._g0,
            "growth": self._growth,
        }
        # Settings are process-wide; runs with overrides are serialized
        self._lock = threading.Lock()

    # ------------------------------------------------------------------
    # Entry points
    # ------------------------------------------------------------------

    def verify(self, name: str, params: Optional[Dict[str, Any]] = None, overrides=None, flattened: bool = False) -> RunReport:
        return self._dispatch("verify", self.checks, name, params, overrides, flattened)

    def report(self, name: str, params: Optional[Dict[str, Any]] = None, overrides=None, flattened: bool = False) -> RunReport:
        return self._dispatch("report", self.reports, name, params, overrides, flattened)

    def compute(self, name: str, params: Optional[Dict[str, Any]] = None, overrides=None, flattened: bool = False) -> RunReport:
        return self._dispatch("compute", self.computations, name, params, overrides, flattened)

    def table(self, R: int, Q: int) -> CoeffTable:
        """
        c_{R,Q} table, cross-checked against the DFT construction

        The stored entries are compared with the DFT form, and so is a seeded
        sample of all (m, n) (every pair when the table is small).

        Raises:
            ConsistencyError: the two constructions disagree
        """
        table = forms.coeff_table(int(R), int(Q))
        if table.entries:
            m, n = (np.array(axis, dtype=np.int64) for axis in zip(*table.entries))
            stored = np.array(list(table.entries.values()), dtype=np.int64)
            if np.any(forms.coeff_eq64(table.R, table.Q, m, n) != stored):
                raise ConsistencyError(f"stored c_{{R,Q}} entries differ from the DFT form at R={table.R}, Q={table.Q}")
        discrepancy = forms.check_lemma71(table.R, table.Q)
        if discrepancy:
            raise ConsistencyError(f"c_{{R,Q}} differs from the DFT form by {discrepancy} at R={table.R}, Q={table.Q}")
        logger.info("coefficient table", extra={"R": table.R, "Q": table.Q, "nonzero": len(table.entries)})
        return table

    def _dispatch(
        self,
        group: str,
        table: Dict[str, Callable[..., RunReport]],
        name: str,
        params: Optional[Dict[str, Any]],
        overrides: Optional[Dict[str, Any]],
        flattened: bool,
    ) -> RunReport:
        handler = table.get(name)
        if handler is None:
            raise PreconditionError(f"unknown {group} name {name!r}; expected one of {sorted(table)}")
        params = {key: parse_number(value) for key, value in (params or {}).items()}
        with self._lock, override_settings(overrides or {}):
            report = RunReport(command=f"{group} {name}", config=effective_config(), seed=settings.SEED)
            report.config["flattened"] = flattened
            handler(report, params, flattened)
            report.parameters = {key: _jsonable(value) for key, value in sorted(report.parameters.items())}
        for check in report.checks:
            logger.info(
                "check finished",
                extra={"command": report.command, "check": check.name, "status": check.status.value, "residual": check.residual},
            )
        return report

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _pair(flattened: bool, flat_width: Optional[float] = None) -> Tuple[TestFunction, TestFunction]:
        return canonical_v(flattened, flat_width), canonical_u(flattened, flat_width)

    @staticmethod
    def _mellin_pair(params: Dict[str, Any]) -> Tuple[TestFunction, TestFunction]:
        width = float(params.get("flat_width", MELLIN_FLAT_WIDTH))
        params["flat_width"] = width
        return canonical_v(True, width), canonical_u(True, width)

    @staticmethod
    def _tolerance(name: str, params: Dict[str, Any]) -> float:
        if "check_tol" in params:
            return float(params["check_tol"])
        return max(settings.TOL, CHECK_FLOORS.get(name, 0.0))

    @staticmethod
    def _judge(
        report: RunReport,
        name: str,
        comparison: Comparison,
        tol: float,
        mode: str = "relative",
        detail: Optional[Dict[str, Any]] = None,
    ) -> CheckResult:
        if mode == "absolute":
            metric = comparison.residual
        elif mode == "strict":
            metric = comparison.residual / max(comparison.left.abs(), comparison.right.abs(), 1e-300)
        else:
            metric = comparison.relative
        status = CheckStatus.PASS if metric <= tol else CheckStatus.FAIL
        result = CheckResult(
            name=name,
            status=status,
            residual=metric,
            tolerance=tol,
            detail={"err": comparison.err, "mode": mode, **(detail or {})},
        )
        report.add_value(f"{name}.left", comparison.left)
        report.add_value(f"{name}.right", comparison.right)
        report.checks.append(result)
        return result

    @staticmethod
    def _exact(report: RunReport, name: str, discrepancy: int) -> None:
        status = CheckStatus.PASS if discrepancy == 0 else CheckStatus.FAIL
        report.checks.append(CheckResult(name=name, status=status, residual=float(discrepancy), tolerance=0.0))

    @staticmethod
    def _levels(params: Dict[str, Any], R: int, Q: int) -> Tuple[int, int]:
        R = int(params.setdefault("R", R))
        Q = int(params.setdefault("Q", Q))
        return R, Q

    # ------------------------------------------------------------------
    # Finite forms and coefficient tables
    # ------------------------------------------------------------------

    def _thm61(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Finite congruence form against the lattice form of T_N"""
        R, Q = self._levels(params, 5, 3)
        v, u = self._pair(flattened)
        left = forms.finite_form(v, u, R, Q)
        right = forms.lattice_form(v, u, forms.t_n(R * Q), Q)
        self._judge(report, f"thm61[R={R},Q={Q}]", Comparison(left=left, right=right), self._tolerance("thm61", params))
        report.parameters = params

    def _thm72(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Lattice form of T_N against the arithmetic side, plus the odd limit when requested"""
        Q = int(params.setdefault("Q", 3))
        R = int(params.setdefault("R", minimal_R(Q)))
        problems = R_violations(R, Q, settings.BETA, congruence=False)
        if problems:
            raise PreconditionError(f"R={R}, Q={Q}: " + "; ".join(problems))
        v, u = self._pair(flattened)
        tol = self._tolerance("thm72", params)
        left = forms.lattice_form(v, u, forms.t_n(R * Q), Q)
        right = forms.arithmetic_side(v, u, R, Q)
        self._judge(report, f"thm72[R={R},Q={Q}]", Comparison(left=left, right=right), tol)
        if params.setdefault("inf_odd", False):
            left = forms.lattice_form(v, u, series.HALF_INF, Q)
            right = forms.arithmetic_side(v, u, "inf_odd", Q)
            self._judge(report, f"thm72[inf_odd,Q={Q}]", Comparison(left=left, right=right), tol)
        report.parameters = params

    def _lem71(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Closed-form coefficients against the DFT construction, integer-exact"""
        R, Q = self._levels(params, 1, 3)
        samples = params.get("samples")
        self._exact(report, f"lem71[R={R},Q={Q}]", forms.check_lemma71(R, Q, samples, settings.SEED))
        report.parameters = params

    def _thm81(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Reflection symmetry of the coefficients, integer-exact"""
        R, Q = self._levels(params, 1, 3)
        samples = params.get("samples")
        self._exact(report, f"thm81[R={R},Q={Q}]", forms.check_thm81(R, Q, samples, settings.SEED))
        report.parameters = params

    def _eq82(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        R, Q = self._levels(params, 19, 3)
        v, u = self._pair(flattened)
        comparison = forms.check_eq82(v, u, R, Q)
        self._judge(report, f"eq82[R={R},Q={Q}]", comparison, self._tolerance("eq82", params), mode="absolute")
        report.parameters = params

    # ------------------------------------------------------------------
    # Eisenstein pairings
    # ------------------------------------------------------------------

    def _eq320(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Defining sum against the kernel quadrature"""
        nus = _number_list(params.setdefault("nu", [2.2, 2.5, complex(3, 4)]))
        params["nu"] = nus
        v, u = self._pair(flattened)
        tol = self._tolerance("eq320", params)
        for nu in nus:
            nu = complex(nu)
            comparison = Comparison(left=eisenstein.pairing_def31(v, u, nu), right=eisenstein.pairing_kernel320(v, u, nu))
            self._judge(report, f"eq320[nu={nu.real:g}{nu.imag:+g}i]", comparison, tol)
        report.parameters = params

    def _eq314(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Line integral of the pairing against the Dirac comb and against T_N^x"""
        c = float(params.setdefault("c", settings.CONTOUR_C))
        T = float(params.setdefault("T", settings.DEFAULT_HEIGHT))
        levels = _number_list(params.setdefault("N", [None, 15]))
        params["N"] = levels
        v, u = self._pair(flattened)
        tol = self._tolerance("eq314", params)
        for N in levels:
            if isinstance(N, str):
                N = None
            comparison = eisenstein.comb_decomp_check(v, u, c=c, T=T, N=N)
            label = "comb" if N is None else f"T{int(N)}x"
            self._judge(report, f"eq314[{label}]", comparison, tol, mode="absolute")
        report.parameters = params

    def _eq910(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Mellin-fibered reconstruction of the pairing, flattened pair"""
        nus = _number_list(params.setdefault("nu", [2.5, complex(1, 3)]))
        params["nu"] = nus
        v, u = self._mellin_pair(params)
        tol = self._tolerance("eq910", params)
        for nu in nus:
            nu = complex(nu)
            comparison = Comparison(
                left=eisenstein.pairing_mellin910(v, u, nu),
                right=eisenstein.pairing_kernel320(v, u, nu),
            )
            self._judge(report, f"eq910[nu={nu.real:g}{nu.imag:+g}i]", comparison, tol, mode="absolute")
        report.parameters = params

    def _prop32(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Residue at nu = 1 of the defining sum for the pair (u, u)"""
        _, u = self._pair(flattened)
        comparison = eisenstein.residue_check_32(u, u)
        self._judge(report, "prop32[u,u]", comparison, self._tolerance("prop32", params))
        report.parameters = params

    # ------------------------------------------------------------------
    # Zeta and the kernel f
    # ------------------------------------------------------------------

    def _zeta(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        tol = float(params.get("check_tol", ZETA_TOL))
        values, errs = zeta_values([s for s, _ in ZETA_REFERENCE])
        for (s, expected), value, err in zip(ZETA_REFERENCE, values, errs):
            comparison = Comparison(left=Estimate.of(value, err), right=Estimate.of(expected))
            self._judge(report, f"zeta[{s:g}]", comparison, tol, mode="absolute")

        zero, zero_err = zeta_values([FIRST_ZERO])
        report.add_value("zeta.first_zero", Estimate.of(zero[0], zero_err[0]))
        magnitude = float(abs(zero[0]))
        report.checks.append(CheckResult(
            name="zeta[first_zero]",
            status=CheckStatus.PASS if magnitude <= ZERO_TOL else CheckStatus.FAIL,
            residual=magnitude,
            tolerance=ZERO_TOL,
        ))

        sigmas = np.linspace(-1.5, 2.5, 10)
        heights = np.linspace(0.5, 30.0, 10)
        worst = max(zeta_star_residual(complex(a, b)) for a in sigmas for b in heights)
        report.checks.append(CheckResult(
            name="zeta[functional_equation]",
            status=CheckStatus.PASS if worst <= tol else CheckStatus.FAIL,
            residual=worst,
            tolerance=tol,
            detail={"points": int(sigmas.size * heights.size)},
        ))
        report.parameters = params

    def _eq54(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Squarefree odd Dirichlet series against the kernel f, and f(2) against 12/pi^2"""
        theta = complex(params.setdefault("theta", 2.0))
        X = int(params.setdefault("X", 100_000))
        kernel = f_kernel(theta)
        partial = sqfree_odd_dirichlet(theta, X)
        # the partial sum carries its own tail bound; compare values only
        comparison = Comparison(left=Estimate.of(partial.value), right=kernel)
        self._judge(report, f"eq54[X={X}]", comparison, self._tolerance("eq54", params), mode="absolute")
        report.errors[f"eq54[X={X}].left"] = partial.err
        if theta == 2.0:
            closed = Comparison(left=kernel, right=Estimate.of(PRINTED_RESIDUE))
            self._judge(report, "eq54[f(2)]", closed, ZETA_TOL, mode="absolute")
        report.parameters = params

    # ------------------------------------------------------------------
    # Wigner transform
    # ------------------------------------------------------------------

    def _lem21(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Euler-operator identity at sample points, with the observed finite-difference order"""
        v, u = self._pair(flattened)
        h = float(params.setdefault("h", 1e-3))
        tol = self._tolerance("lem21", params)
        for x, xi in LEM21_POINTS:
            residual = euler_apply_check(v, u, x, xi, h)
            report.checks.append(CheckResult(
                name=f"lem21[x={x:g},xi={xi:g}]",
                status=CheckStatus.PASS if residual <= tol else CheckStatus.FAIL,
                residual=residual,
                tolerance=tol,
            ))
        x, xi = LEM21_POINTS[0]
        residuals, order = euler_apply_convergence(v, u, x, xi)
        report.checks.append(CheckResult(
            name="lem21[order]",
            status=CheckStatus.PASS if order >= MIN_FD_ORDER else CheckStatus.FAIL,
            residual=residuals[-1],
            detail={"residuals": residuals, "observed_order": order if math.isfinite(order) else None},
        ))
        report.parameters = params

    # ------------------------------------------------------------------
    # Series
    # ------------------------------------------------------------------

    def _eq416(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """One Q-term of the contour representation against the arithmetic side"""
        Q = int(params.setdefault("Q", 3))
        c = float(params.setdefault("c", settings.CONTOUR_C))
        v, u = self._pair(flattened)
        comparison = series.check_eq416(v, u, Q, c=c)
        self._judge(report, f"eq416[Q={Q}]", comparison, self._tolerance("eq416", params), mode="absolute")
        report.parameters = params

    def _f0(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """F_0 by its series and, unless disabled, by its contour integral"""
        s = complex(params.setdefault("s", 4.0))
        X = int(params.setdefault("X", series.DEFAULT_X))
        v, u = self._pair(flattened)
        partial = series.F0_series(v, u, s, X)
        report.add_value("F0_series", partial)
        if params.setdefault("integral", True):
            c0 = float(params.setdefault("c0", 1.0))
            integral = series.F0_integral(v, u, s, c0=c0)
            self._judge(report, "f0[series~integral]", Comparison(left=partial, right=integral), self._tolerance("f0", params), mode="strict")
        report.parameters = params

    def _feps(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """F_eps by its series and, unless disabled, by its contour integral"""
        s = complex(params.setdefault("s", 4.0))
        eps = float(params.setdefault("eps", 0.5))
        X = int(params.setdefault("X", series.DEFAULT_X))
        v, u = self._pair(flattened)
        partial = series.Feps_series(v, u, s, eps, X)
        report.add_value("Feps_series", partial)
        if params.setdefault("integral", True):
            c = float(params.setdefault("c", 1.5))
            method = str(params.setdefault("method", "auto"))
            integral = series.Feps_integral(v, u, s, eps, c=c, method=method, X=X)
            self._judge(report, "feps[series~integral]", Comparison(left=partial, right=integral), self._tolerance("feps", params), mode="strict")
        report.parameters = params

    def _pairing(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        nu = complex(params.setdefault("nu", 2.5))
        route = PairingRoute(params.setdefault("route", PairingRoute.KERNEL320.value))
        v, u = self._mellin_pair(params) if route == PairingRoute.MELLIN910 else self._pair(flattened)
        result = eisenstein.pairing(v, u, nu, route)
        report.add_value(f"pairing.{route.value}", result.value)
        report.parameters = params

    def _phi(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        nu = complex(params.setdefault("nu", 2.0))
        mu = complex(params.setdefault("mu", 0.0))
        v, u = self._mellin_pair(params)
        report.add_value("phi", eisenstein.phi(v, u, nu, mu))
        report.parameters = params

    def _g0(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """G_0 by both routes and G_eps along a decreasing eps sequence"""
        s = complex(params.setdefault("s", 2.6))
        v, u = self._mellin_pair(params)
        self._judge(report, "g0[routes]", series.check_G0_routes(v, u, s), self._tolerance("g0", params), mode="absolute")
        eps_values = [float(e) for e in _number_list(params.setdefault("eps", [0.4, 0.2, 0.1]))]
        params["eps"] = eps_values
        if eps_values:
            trend = series.G_eps_convergence(v, u, s, eps_values)
            report.checks.append(CheckResult(
                name="g_eps[convergence]",
                status=CheckStatus.REPORT,
                detail={"eps": trend["eps"], "gaps": trend["gaps"]},
            ))
        report.parameters = params

    def _growth(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Growth exponent of the T_inf form over squarefree odd Q"""
        Q_max = int(params.setdefault("Q_max", 201))
        v, u = self._pair(flattened)
        levels = [int(Q) for Q in squarefree_odd_array(Q_max)]
        fit, data = series.growth_fit(v, u, levels)
        for Q, value in data:
            report.add_value(f"form[Q={Q}]", value)
        report.checks.append(CheckResult(name="growth", status=CheckStatus.REPORT, detail=fit.model_dump()))
        report.parameters = params

    # ------------------------------------------------------------------
    # Diagnostic reports
    # ------------------------------------------------------------------

    def _prop94(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Both sides of the Mellin recursion as printed"""
        nu = complex(params.setdefault("nu", 2.0))
        mu = complex(params.setdefault("mu", -2.0))
        v, u = self._mellin_pair(params)
        out = eisenstein.recursion_914_report(v, u, nu, mu)
        report.add_value("prop94.left", out["left"])
        report.add_value("prop94.right", out["right"])
        report.checks.append(CheckResult(
            name="prop94",
            status=CheckStatus.REPORT,
            residual=out["relative"],
            detail={"residual": out["residual"]},
        ))
        report.parameters = params

    def _residue_f(self, report: RunReport, params: Dict[str, Any], flattened: bool) -> None:
        """Residue of f at 1 for both kernel variants next to the printed constant"""
        for variant in ("plus", "minus"):
            report.add_value(f"residue.{variant}", f_residue_at_1(variant))
        report.add_value("residue.printed", Estimate.of(PRINTED_RESIDUE))
        report.add_value("residue.four_over_pi2", Estimate.of(series.SQFREE_ODD_DENSITY))
        report.checks.append(CheckResult(
            name="residue-f",
            status=CheckStatus.REPORT,
            detail={"default_variant": "plus"},
        ))
        report.parameters = params
