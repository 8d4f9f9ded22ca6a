"""
Maximale Bitrate unter einem Importance-Loss-Budget ε:
max_{p(x)} I(X;Y) unter L(ϖ, X) - L(ϖ, X|Y) <= ε.

Für binär-symmetrische und Auslöschungskanäle wird die Verlustgleichung exakt per
Bisektion gelöst; die Taylor-Näherungen gibt es nur als ausdrücklich markierte Varianten.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from capacity import family_channel, milc_closed_form
from handlers import DomainError
from mim import ImportanceParam, loss_array
from optimizer import OptimizerOptions, augmented_lagrangian, starting_points
from probability import (Channel, Distribution, _check_unit_interval, binary_entropy,
                         channel_capacity, mutual_information_array)

log = logging.getLogger("mimkit.constrained_rate")

BINARY_FAMILIES = ("bsc", "bec")
PLATEAU = "capacity_plateau"
LOSS_LIMITED = "loss_limited"

@dataclass(frozen=True)
class RateResult:
    """Maximale Rate (Bit) mit optimalem p in [0, 1/2] und Regime."""
    rate: float
    optimal_p: Optional[float]
    regime: str
    p_approx: Optional[float] = None
    approx_fallback: bool = False
    converged: bool = True
    optimal_input: Optional[Distribution] = None

@dataclass(frozen=True)
class LossRoot:
    """Lösung von Φ(p) = ε auf [0, 1/2]; plateau wenn ε >= MILC."""
    p: float
    plateau: bool
    residual: float

@dataclass(frozen=True)
class Approximation:
    """Taylor-Näherung von p; fallback=True wenn exakt per Bisektion gelöst wurde."""
    p: float
    fallback: bool

def _check_family(family: str) -> None:
    if family not in BINARY_FAMILIES:
        raise DomainError(f"Familie {family!r} nicht binär", "Familie muss bsc oder bec sein.")

def _check_rate_params(w: ImportanceParam, eps: float) -> float:
    if w.varpi >= 2.0:
        raise DomainError(f"varpi={w.varpi} >= 2", "Die Bitraten-Lösungen setzen ϖ < 2 voraus.")
    eps = float(eps)
    if not eps > 0.0:
        raise DomainError(f"eps={eps} <= 0", "ε muss positiv sein.")
    return eps

def family_loss(family: str, beta: float, w: ImportanceParam, p: float) -> float:
    """Exakter Importance Loss eines Bernoulli(p)-Eingangs im Familienkanal."""
    ch = family_channel(family, beta)
    return loss_array(np.array([p, 1.0 - p]), ch.matrix, w.varpi)

def family_milc(family: str, beta: float, w: ImportanceParam) -> float:
    _check_family(family)
    return milc_closed_form(family, w, beta).capacity

def shannon_capacity(family: str, beta: float) -> float:
    """1 - H(β_s) bzw. 1 - β_e."""
    _check_family(family)
    beta = _check_unit_interval("beta", beta)
    if family == "bsc":
        return 1.0 - binary_entropy(beta)
    return 1.0 - beta

def family_rate(family: str, beta: float, p: float) -> float:
    """I(X;Y) für Bernoulli(p): H(p(1-β)+(1-p)β) - H(β) bzw. (1-β_e) H(p)."""
    if family == "bsc":
        beta = min(beta, 1.0 - beta)
        return max(binary_entropy(p * (1.0 - beta) + (1.0 - p) * beta) - binary_entropy(beta), 0.0)
    return (1.0 - beta) * binary_entropy(p)

def solve_loss_equation(family: str, beta: float, w: ImportanceParam, eps: float) -> LossRoot:
    """
    Bisektion von Φ(p) = ε auf [0, 1/2]; Φ steigt dort monoton.
    Für ε >= MILC ist das Ergebnis p = 1/2 mit plateau=True.
    """
    _check_family(family)
    eps = float(eps)
    if not eps > 0.0:
        raise DomainError(f"eps={eps} <= 0", "ε muss positiv sein.")

    capacity = family_milc(family, beta, w)
    if eps >= capacity:
        return LossRoot(p=0.5, plateau=True, residual=family_loss(family, beta, w, 0.5) - eps)

    root = bisect(lambda p: family_loss(family, beta, w, p) - eps, 0.0, 0.5,
                  xtol=1e-16, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    return LossRoot(p=float(root), plateau=False, residual=family_loss(family, beta, w, root) - eps)

def approx_p_bsc(w: ImportanceParam, beta_s: float, eps: float) -> Approximation:
    """
    p_s ≐ (1 - √Θ)/2 mit
    Θ = 1 - 4ε/(4ϖ+ϖ²) - 4√((1-2β_s)²ε² + 2(4ϖ+ϖ²)β_s(1-β_s)ε) / ((4ϖ+ϖ²)|1-2β_s|).
    Negatives Θ (oder β_s = 1/2) fällt auf die exakte Bisektion zurück.
    """
    beta_s = _check_unit_interval("beta_s", beta_s)
    eps = float(eps)
    if eps == 0.0:
        return Approximation(p=0.0, fallback=False)

    a = 4.0 * w.varpi + w.varpi ** 2
    gap = abs(1.0 - 2.0 * beta_s)
    if gap > 0.0:
        inner = (1.0 - 2.0 * beta_s) ** 2 * eps ** 2 + 2.0 * a * beta_s * (1.0 - beta_s) * eps
        theta = 1.0 - 4.0 * eps / a - 4.0 * math.sqrt(inner) / (a * gap)
        if theta >= 0.0:
            return Approximation(p=(1.0 - math.sqrt(theta)) / 2.0, fallback=False)

    log.warning(f"Θ-Näherung ungültig für ϖ={w.varpi}, β_s={beta_s}, ε={eps}: exakte Bisektion")
    return Approximation(p=solve_loss_equation("bsc", beta_s, w, eps).p, fallback=True)

def approx_p_bec(w: ImportanceParam, beta_e: float, eps: float) -> Approximation:
    """p_e ≐ (1 - √(1 - 8ε/((1-β_e)(4ϖ+ϖ²))))/2; negative Diskriminante → Bisektion."""
    beta_e = _check_unit_interval("beta_e", beta_e)
    eps = float(eps)
    if eps == 0.0:
        return Approximation(p=0.0, fallback=False)

    scale = (1.0 - beta_e) * (4.0 * w.varpi + w.varpi ** 2)
    if scale > 0.0:
        disc = 1.0 - 8.0 * eps / scale
        if disc >= 0.0:
            return Approximation(p=(1.0 - math.sqrt(disc)) / 2.0, fallback=False)

    log.warning(f"Näherung für p_e ungültig (ϖ={w.varpi}, β_e={beta_e}, ε={eps}): exakte Bisektion")
    return Approximation(p=solve_loss_equation("bec", beta_e, w, eps).p, fallback=True)

def _max_rate_family(family: str, w: ImportanceParam, beta: float, eps: float) -> RateResult:
    beta = _check_unit_interval("beta", beta)
    eps = _check_rate_params(w, eps)
    root = solve_loss_equation(family, beta, w, eps)

    if root.plateau:
        return RateResult(rate=shannon_capacity(family, beta), optimal_p=0.5, regime=PLATEAU,
                          optimal_input=Distribution.uniform(2))

    approx = approx_p_bsc(w, beta, eps) if family == "bsc" else approx_p_bec(w, beta, eps)
    return RateResult(
        rate=family_rate(family, beta, root.p),
        optimal_p=root.p,
        regime=LOSS_LIMITED,
        p_approx=approx.p,
        approx_fallback=approx.fallback,
        optimal_input=Distribution.bernoulli(root.p),
    )

def max_rate_bsc(w: ImportanceParam, beta_s: float, eps: float) -> RateResult:
    """
    BSC: Rate 1 - H(β_s) für ε >= C_{β_s}, sonst H(p_s(1-β_s) + (1-p_s)β_s) - H(β_s).
    β_s > 1/2 wird für die Rate auf 1 - β_s abgebildet.
    """
    return _max_rate_family("bsc", w, beta_s, eps)

def max_rate_bec(w: ImportanceParam, beta_e: float, eps: float) -> RateResult:
    """BEC: Rate 1 - β_e für ε >= C_{β_e}, sonst (1-β_e) H(p_e)."""
    return _max_rate_family("bec", w, beta_e, eps)

def max_rate(family: str, w: ImportanceParam, beta: float, eps: float) -> RateResult:
    _check_family(family)
    return _max_rate_family(family, w, beta, eps)

def _restore_feasibility(x: np.ndarray, matrix: np.ndarray, varpi: float, eps: float) -> np.ndarray:
    """Schiebt x entlang der Strecke zur nächsten Ecke (Φ = 0), bis Φ <= ε gilt."""
    if loss_array(x, matrix, varpi) <= eps:
        return x
    vertex = np.zeros_like(x)
    vertex[int(np.argmax(x))] = 1.0

    def excess(t: float) -> float:
        return loss_array((1.0 - t) * x + t * vertex, matrix, varpi) - eps

    t = bisect(excess, 0.0, 1.0, xtol=1e-15, maxiter=200)
    nudge = 1e-15
    while excess(t) > 0.0 and t < 1.0:
        t = min(1.0, t + nudge)
        nudge *= 2.0
    return (1.0 - t) * x + t * vertex

def max_rate_numeric(ch: Channel, w: ImportanceParam, eps: float,
                     opts: Optional[OptimizerOptions] = None) -> RateResult:
    """
    Maximale Rate unter Loss-Budget für beliebige Kanäle.

    Ist der Verlust im kapazitätserreichenden Eingang (Blahut-Arimoto) höchstens ε,
    liegt das Plateau vor. Sonst Penalty-Verfahren auf -I(X;Y) mit Nebenbedingung Φ <= ε
    aus mehreren Starts, jedes Ergebnis wird auf exakte Zulässigkeit repariert.
    """
    if opts is None:
        opts = OptimizerOptions.from_config()
    eps = float(eps)
    if not eps > 0.0:
        raise DomainError(f"eps={eps} <= 0", "ε muss positiv sein.")

    matrix = ch.matrix
    varpi = w.varpi

    def as_result(x: np.ndarray, regime: str, converged: bool) -> RateResult:
        dist = Distribution(x)
        optimal_p = min(dist.probs[0], dist.probs[1]) if ch.rows == 2 else None
        return RateResult(rate=mutual_information_array(dist.probs, matrix), optimal_p=optimal_p,
                          regime=regime, converged=converged, optimal_input=dist)

    capacity, p_cap, cap_converged = channel_capacity(ch)
    if loss_array(p_cap.probs, matrix, varpi) <= eps:
        return as_result(p_cap.probs, PLATEAU, cap_converged)

    starts = [p_cap.probs.copy()] + starting_points(ch.rows, opts)
    best = None
    for x0 in starts:
        run = augmented_lagrangian(lambda x: -mutual_information_array(x, matrix),
                                   lambda x: loss_array(x, matrix, varpi) - eps,
                                   x0, opts, inequality=True)
        x = _restore_feasibility(run.x, matrix, varpi, eps)
        rate = mutual_information_array(x, matrix)
        if best is None or rate > best[1]:
            best = (x, rate, run.converged)

    x, rate, converged = best
    log.debug(f"max_rate_numeric: Rate {rate:.10g} (Kapazität {capacity:.10g}) bei ε={eps}")
    return as_result(x, LOSS_LIMITED, converged)
