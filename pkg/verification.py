"""
Prüf-Suiten für den verify-Command: Referenzwerte aus reference-values/golden.json
sowie Orakel-gegen-geschlossene-Form-Vergleiche für MILC, R_ϖ(D) und die maximale Rate.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from capacity import family_channel, loss_slope_nonnegative, milc_closed_form, milc_numeric
from config import config
from constrained_rate import (PLATEAU, approx_p_bec, approx_p_bsc, family_rate, max_rate,
                              max_rate_numeric, shannon_capacity, solve_loss_equation)
from distortion import DistortionSpec, midf_bernoulli_hamming, midf_numeric, optimal_test_channel
from handlers import UsageError
from mim import ImportanceParam
from optimizer import OptimizerOptions
from oracle import GridSpec, grid_max_loss, grid_max_mi_under_loss, grid_min_rd
from probability import Channel, Distribution, posterior

log = logging.getLogger("mimkit.verification")

GOLDEN_PATH = Path(__file__).resolve().parent / "reference-values" / "golden.json"

@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool

@dataclass
class SuiteReport:
    """Ergebnis einer Suite; passed genau dann, wenn keine Prüfung fehlschlägt."""
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    def expect_close(self, name: str, expected: float, actual: float, tolerance: float) -> None:
        passed = bool(math.isfinite(actual) and abs(actual - expected) <= tolerance)
        self.checks.append(CheckResult(name, float(expected), float(actual), tolerance, passed))

    def expect_at_most(self, name: str, bound: float, actual: float, tolerance: float = 0.0) -> None:
        passed = bool(math.isfinite(actual) and actual <= bound + tolerance)
        self.checks.append(CheckResult(name, float(bound), float(actual), tolerance, passed))

    def expect_true(self, name: str, condition: bool) -> None:
        self.checks.append(CheckResult(name, 1.0, 1.0 if condition else 0.0, 0.0, bool(condition)))

    def extend(self, other: "SuiteReport") -> None:
        self.checks.extend(other.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

def load_golden(path: Optional[Path] = None) -> Dict:
    """Lädt die Referenzwerte aus reference-values/golden.json."""
    with open(path or GOLDEN_PATH, "r", encoding="utf-8") as f:
        return json.load(f)

def suite_golden(opts: OptimizerOptions) -> SuiteReport:
    """Alle Referenzkurven innerhalb von GOLDEN_TOL."""
    report = SuiteReport("golden")
    golden = load_golden()
    tol = config.GOLDEN_TOL

    g = golden["milc_bsc_beta"]
    for beta, expected in zip(g["beta"], g["capacity"]):
        actual = milc_closed_form("bsc", ImportanceParam(g["varpi"]), beta).capacity
        report.expect_close(f"milc bsc ϖ={g['varpi']} β={beta}", expected, actual, tol)

    g = golden["milc_bsc_varpi"]
    for varpi, expected in zip(g["varpi"], g["capacity"]):
        actual = milc_closed_form("bsc", ImportanceParam(varpi), g["beta"]).capacity
        report.expect_close(f"milc bsc ϖ={varpi} β={g['beta']}", expected, actual, tol)

    g = golden["milc_bec_beta"]
    for beta, expected in zip(g["beta"], g["capacity"]):
        actual = milc_closed_form("bec", ImportanceParam(g["varpi"]), beta).capacity
        report.expect_close(f"milc bec ϖ={g['varpi']} β={beta}", expected, actual, tol)

    g = golden["milc_ksym_k"]
    w = ImportanceParam(g["varpi"])
    for k, expected in zip(g["k"], g["capacity"]):
        actual = milc_closed_form("ksym", w, g["beta"], k).capacity
        report.expect_close(f"milc ksym ϖ={g['varpi']} K={k}", expected, actual, tol)
        zero = milc_closed_form("ksym", w, (k - 1) / k, k).capacity
        report.expect_close(f"milc ksym K={k} β=(K-1)/K", 0.0, zero, 1e-10)

    g = golden["midf_bernoulli_p"]
    w = ImportanceParam(g["varpi"])
    for p, expected in zip(g["p"], g["rate"]):
        report.expect_close(f"midf p={p} D={g['d']}", expected, midf_bernoulli_hamming(p, w, g["d"]).rate, tol)
        report.expect_close(f"midf p={p} D=p", 0.0, midf_bernoulli_hamming(p, w, min(p, 1.0 - p)).rate, 1e-12)

    for key, family, plateau_tol in (("maxrate_bsc_beta", "bsc", tol), ("maxrate_bec_beta", "bec", 1e-10)):
        g = golden[key]
        w = ImportanceParam(g["varpi"])
        for beta, turning, plateau in zip(g["beta"], g["turning_point"], g["plateau_rate"]):
            capacity = milc_closed_form(family, w, beta).capacity
            report.expect_close(f"maxrate {family} β={beta} Knickpunkt", turning, capacity, tol)
            result = max_rate(family, w, beta, capacity)
            report.expect_close(f"maxrate {family} β={beta} Plateau", plateau, result.rate, plateau_tol)

    return report

def _random_family(rng: np.random.Generator) -> tuple:
    family = ("bsc", "bec", "ksym")[int(rng.integers(3))]
    k = 3 if family == "ksym" else None
    return family, k

def suite_milc(opts: OptimizerOptions) -> SuiteReport:
    """Orakel und numerischer Maximierer gegen die geschlossenen MILC-Formen."""
    report = SuiteReport("milc")
    rng = np.random.default_rng(opts.seed)

    for i in range(30):
        family, k = _random_family(rng)
        beta = float(rng.uniform(0.0, 1.0 if k is None else (k - 1) / k))
        w = ImportanceParam(float(rng.uniform(0.05, 2.0)))
        ch = family_channel(family, beta, k)
        # 1/300 legt die Gleichverteilung auf drei Symbolen exakt auf das Gitter
        g = GridSpec(resolution=config.GRID_RESOLUTION_1D if ch.rows == 2 else 1.0 / 300, dimension=ch.rows)
        closed = milc_closed_form(family, w, beta, k).capacity
        oracle_value, _ = grid_max_loss(ch, w, g)
        label = f"milc[{i}] {family} β={beta:.4f} ϖ={w.varpi:.4f}"
        report.expect_close(f"{label} Orakel", closed, oracle_value, 1e-3)
        report.expect_at_most(f"{label} Orakel <= geschlossene Form", closed, oracle_value, 1e-9)
        if ch.rows == 2:
            report.expect_true(f"{label} Φ(p) steigt auf [0, 1/2]", loss_slope_nonnegative(ch, w))

    for family, beta, varpi, k in (("bsc", 0.1, 1.0, None), ("bec", 0.3, 0.5, None), ("ksym", 0.2, 1.5, 3)):
        w = ImportanceParam(varpi)
        closed = milc_closed_form(family, w, beta, k).capacity
        numeric = milc_numeric(family_channel(family, beta, k), w, opts)
        report.expect_close(f"milc numerisch {family} β={beta} ϖ={varpi}", closed, numeric.capacity, 1e-6)

    identical = Channel.constant([0.3, 0.7], 2)
    value, _ = grid_max_loss(identical, ImportanceParam(1.0), GridSpec(1e-3, 2))
    report.expect_close("milc identische Zeilen", 0.0, value, 1e-12)
    return report

def suite_rd(opts: OptimizerOptions) -> SuiteReport:
    """R_ϖ(D): Orakel, Monotonie, Konvexität, Testkanal-Posterior und numerischer Löser."""
    report = SuiteReport("rd")
    rng = np.random.default_rng(opts.seed + 1)
    g = GridSpec(config.GRID_RESOLUTION_1D)

    for i in range(20):
        p = float(rng.uniform(0.05, 0.95))
        D = float(rng.uniform(0.0, min(p, 1.0 - p)))
        w = ImportanceParam(float(rng.uniform(0.05, 2.0)))
        closed = midf_bernoulli_hamming(p, w, D).rate
        oracle_value, _, _ = grid_min_rd(p, w, D, g)
        label = f"rd[{i}] p={p:.4f} D={D:.4f} ϖ={w.varpi:.4f}"
        report.expect_close(f"{label} Orakel", closed, oracle_value, 1e-4)
        report.expect_at_most(f"{label} geschlossene Form <= Orakel", oracle_value, closed, 1e-12)

        post = posterior(Distribution.bernoulli(p), optimal_test_channel(p, D))
        errors = [1.0 - post.matrix[j, j] for j in range(2) if post.reachable[j]]
        report.expect_close(f"{label} Posterior-Fehler", D, max(errors, key=lambda e: abs(e - D)), 1e-12)

    w = ImportanceParam(0.2)
    for p in (0.1, 0.3, 0.5):
        grid = np.linspace(0.0, min(p, 1.0 - p), 51)
        values = [midf_bernoulli_hamming(p, w, D).rate for D in grid]
        report.expect_true(f"rd p={p} monoton fallend", bool(np.all(np.diff(values) <= 1e-12)))
        mid = [(values[j] + values[j + 2]) / 2.0 - values[j + 1] for j in range(len(values) - 2)]
        report.expect_true(f"rd p={p} Mittelpunkt-konvex", min(mid) >= -1e-12)

    hamming = DistortionSpec.hamming(2)
    for i in range(5):
        p = float(rng.uniform(0.1, 0.9))
        D = float(rng.uniform(0.05, 0.9)) * min(p, 1.0 - p)
        w_i = ImportanceParam(float(rng.uniform(0.1, 2.0)))
        numeric = midf_numeric(Distribution.bernoulli(p), hamming, D, w_i, opts)
        closed = midf_bernoulli_hamming(p, w_i, D).rate
        label = f"rd numerisch[{i}] p={p:.4f} D={D:.4f} ϖ={w_i.varpi:.4f}"
        report.expect_close(label, closed, numeric.rate, config.RD_NUMERIC_TOL)
        report.expect_at_most(f"{label} D̄ <= D", D, numeric.achieved_distortion, 1e-9)

    return report

def suite_rate(opts: OptimizerOptions) -> SuiteReport:
    """Maximale Rate: Orakel, Plateau, numerischer Löser und Taylor-Näherungen."""
    report = SuiteReport("rate")
    rng = np.random.default_rng(opts.seed + 2)
    g = GridSpec(config.GRID_RESOLUTION_1D)

    for i in range(20):
        family = ("bsc", "bec")[i % 2]
        beta = float(rng.uniform(0.0, 0.45))
        w = ImportanceParam(float(rng.uniform(0.05, 1.5)))
        capacity = milc_closed_form(family, w, beta).capacity
        eps = float(rng.uniform(0.2, 1.2)) * capacity
        result = max_rate(family, w, beta, eps)
        oracle_rate, _ = grid_max_mi_under_loss(family_channel(family, beta), w, eps, g)
        label = f"rate[{i}] {family} β={beta:.4f} ϖ={w.varpi:.4f} ε={eps:.5f}"
        report.expect_close(f"{label} Orakel", result.rate, oracle_rate, 1e-3)
        if result.regime == PLATEAU:
            report.expect_close(f"{label} Plateau = Shannon-Kapazität",
                                shannon_capacity(family, beta), result.rate, 1e-10)
        else:
            root = solve_loss_equation(family, beta, w, eps)
            report.expect_close(f"{label} Residuum", 0.0, root.residual, 1e-12)

    w = ImportanceParam(0.1)
    for family, beta, eps in (("bsc", 0.1, 0.05), ("bec", 0.3, 0.01)):
        closed = max_rate(family, w, beta, eps)
        numeric = max_rate_numeric(family_channel(family, beta), w, eps, opts)
        report.expect_close(f"rate numerisch {family} β={beta} ε={eps}", closed.rate, numeric.rate, 1e-4)

    gaps = approximation_gaps(w)
    log.info(f"Näherung: maximale Ratenabweichung {gaps.rate:.3e} Bit, "
             f"maximale p-Abweichung {gaps.p:.3e} bei ϖ={w.varpi}")
    report.expect_at_most("rate Näherung vs. exakt (Bit)", config.APPROX_RATE_TOL, gaps.rate)
    report.expect_at_most("rate Näherung vs. exakt (p)", config.APPROX_P_TOL, gaps.p)

    return report

@dataclass(frozen=True)
class ApproxGaps:
    """Größte Abweichung der Taylor-Näherungen von der exakten Bisektion."""
    rate: float
    p: float

def approximation_gaps(w: ImportanceParam, betas=(0.1, 0.2, 0.3, 0.4), points: int = 19) -> ApproxGaps:
    """Sweep über ε in (0, MILC) für bsc und bec; Maximum von |ΔRate| und |Δp|."""
    worst_rate = worst_p = 0.0
    for family, approx in (("bsc", approx_p_bsc), ("bec", approx_p_bec)):
        for beta in betas:
            capacity = milc_closed_form(family, w, beta).capacity
            for frac in np.linspace(0.05, 0.95, points):
                eps = float(frac * capacity)
                exact = solve_loss_equation(family, beta, w, eps).p
                estimate = approx(w, beta, eps).p
                worst_p = max(worst_p, abs(estimate - exact))
                worst_rate = max(worst_rate, abs(family_rate(family, beta, estimate) - family_rate(family, beta, exact)))
    return ApproxGaps(rate=worst_rate, p=worst_p)

SUITES: Dict[str, Callable[[OptimizerOptions], SuiteReport]] = {
    "golden": suite_golden,
    "milc": suite_milc,
    "rd": suite_rd,
    "rate": suite_rate,
}

def run_suite(name: str, opts: Optional[OptimizerOptions] = None) -> SuiteReport:
    """Führt eine Suite aus; "all" führt alle nacheinander aus."""
    if opts is None:
        opts = OptimizerOptions.from_config()
    if name == "all":
        report = SuiteReport("all")
        for suite in SUITES.values():
            report.extend(suite(opts))
    elif name in SUITES:
        report = SUITES[name](opts)
    else:
        raise UsageError(f"Unbekannte Suite {name!r}",
                         f"Suite muss eine von {', '.join(list(SUITES) + ['all'])} sein.")

    log.info(f"Suite {name}: {len(report.checks) - len(report.failures)}/{len(report.checks)} bestanden")
    return report
