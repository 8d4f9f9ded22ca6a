"""
Message Importance Loss Capacity (MILC): max_{p(x)} Φ_ϖ(X||Y).
Geschlossene Formen für binär-symmetrische, binäre Auslöschungs- und K-när stark
symmetrische Matrizen sowie ein numerischer Maximierer für beliebige Kanäle.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from handlers import DomainError
from mim import ImportanceParam, binary_mim, importance_loss, loss_array
from optimizer import OptimizerOptions, maximize_on_simplex
from probability import Channel, Distribution, _check_unit_interval

log = logging.getLogger("mimkit.capacity")

FAMILIES = ("bsc", "bec", "ksym")
CLOSED_FORM = "closed_form"
NUMERIC = "numeric"

@dataclass(frozen=True)
class MilcResult:
    """MILC-Wert mit maximierender Eingangsverteilung."""
    capacity: float
    argmax_input: Distribution
    method: str
    converged: bool = True

def _check_closed_form_varpi(w: ImportanceParam) -> None:
    # ϖ = 2 ist für die geschlossenen Formen zugelassen (Randfall der K-ären Kurven)
    if w.varpi > 2.0:
        raise DomainError(f"varpi={w.varpi} > 2", "Die geschlossenen MILC-Formen gelten nur für 0 < ϖ <= 2.")

def _check_k(k: int) -> int:
    if k is None or int(k) != k or int(k) < 2:
        raise DomainError(f"K={k} ist keine ganze Zahl >= 2", "K muss eine ganze Zahl >= 2 sein.")
    return int(k)

def milc_binary_symmetric(w: ImportanceParam, beta_s: float) -> MilcResult:
    """C(ϖ, β_s) = e^{ϖ/2} - [β_s e^{ϖ(1-β_s)} + (1-β_s) e^{ϖβ_s}], erreicht bei p = 1/2."""
    beta_s = _check_unit_interval("beta_s", beta_s)
    _check_closed_form_varpi(w)
    capacity = math.exp(w.varpi / 2.0) - binary_mim(beta_s, w)
    return MilcResult(capacity=capacity, argmax_input=Distribution.uniform(2), method=CLOSED_FORM)

def milc_binary_erasure(w: ImportanceParam, beta_e: float) -> MilcResult:
    """C(ϖ, β_e) = (1-β_e)(e^{ϖ/2} - 1), erreicht bei p = 1/2."""
    beta_e = _check_unit_interval("beta_e", beta_e)
    _check_closed_form_varpi(w)
    capacity = (1.0 - beta_e) * (math.exp(w.varpi / 2.0) - 1.0)
    return MilcResult(capacity=capacity, argmax_input=Distribution.uniform(2), method=CLOSED_FORM)

def milc_strongly_symmetric(w: ImportanceParam, beta_k: float, k: int) -> MilcResult:
    """
    C(ϖ, β_k) = e^{ϖ(K-1)/K} - [(1-β_k) e^{ϖβ_k} + β_k e^{ϖ(1-β_k/(K-1))}].

    Konvex in β_k mit Minimum 0 bei β_k = (K-1)/K; Maximierer ist die Gleichverteilung.
    """
    beta_k = _check_unit_interval("beta_k", beta_k)
    k = _check_k(k)
    _check_closed_form_varpi(w)
    varpi = w.varpi
    backward = (1.0 - beta_k) * math.exp(varpi * beta_k) + beta_k * math.exp(varpi * (1.0 - beta_k / (k - 1)))
    capacity = math.exp(varpi * (k - 1) / k) - backward
    return MilcResult(capacity=capacity, argmax_input=Distribution.uniform(k), method=CLOSED_FORM)

def family_channel(family: str, beta: float, k: Optional[int] = None) -> Channel:
    """Vorwärtskanal einer Matrixfamilie (ksym: stark symmetrisch, bei gleichverteiltem Y bijektiv)."""
    if family == "bsc":
        return Channel.bsc(beta)
    if family == "bec":
        return Channel.bec(beta)
    if family == "ksym":
        return Channel.k_ary_symmetric(beta, _check_k(k))
    raise DomainError(f"Unbekannte Familie {family!r}", f"Familie muss eine von {', '.join(FAMILIES)} sein.")

def milc_closed_form(family: str, w: ImportanceParam, beta: float, k: Optional[int] = None) -> MilcResult:
    """Dispatcher auf die geschlossene Form der Familie."""
    if family == "bsc":
        return milc_binary_symmetric(w, beta)
    if family == "bec":
        return milc_binary_erasure(w, beta)
    if family == "ksym":
        return milc_strongly_symmetric(w, beta, k)
    raise DomainError(f"Unbekannte Familie {family!r}", f"Familie muss eine von {', '.join(FAMILIES)} sein.")

def milc_numeric(ch: Channel, w: ImportanceParam, opts: Optional[OptimizerOptions] = None) -> MilcResult:
    """
    Numerische MILC für beliebige Kanäle: Multi-Start projizierter Gradientenaufstieg
    über dem Eingangssimplex mit Gitter-Polish.

    Nicht-Konvergenz liefert das beste gefundene Ergebnis mit converged=False.
    """
    if opts is None:
        opts = OptimizerOptions.from_config()
    if w.varpi > 2.0:
        raise DomainError(f"varpi={w.varpi} > 2", "Die numerische MILC setzt ϖ <= 2 voraus.")
    if w.varpi == 2.0:
        log.warning("ϖ = 2 liegt auf dem Rand des Gültigkeitsbereichs der Konkavitätsaussage")

    matrix = ch.matrix
    varpi = w.varpi
    result = maximize_on_simplex(lambda x: loss_array(x, matrix, varpi), ch.rows, opts)

    argmax = Distribution(result.x)
    capacity = importance_loss(argmax, ch, w).loss
    log.debug(f"MILC numerisch: {capacity:.10g} bei {argmax}")
    return MilcResult(capacity=capacity, argmax_input=argmax, method=NUMERIC, converged=result.converged)

def loss_curve(ch: Channel, w: ImportanceParam, p_grid: Sequence[float]) -> List[Tuple[float, float]]:
    """Importance Loss Φ für Bernoulli(p)-Eingänge eines binären Kanals über einem p-Gitter."""
    if ch.rows != 2:
        raise DomainError(f"Kanal hat {ch.rows} Eingänge", "Verlustkurven gibt es nur für binäre Eingänge.")
    return [(float(p), importance_loss(Distribution.bernoulli(p), ch, w).loss) for p in p_grid]

def loss_slope_nonnegative(ch: Channel, w: ImportanceParam, points: int = 201, tol: float = 1e-12) -> bool:
    """
    Prüft numerisch, dass Φ(p) auf [0, 1/2] nicht fällt.
    Die Vorzeichenstruktur der Ableitung wird pro Instanz geprüft statt vorausgesetzt.
    """
    values = [loss for _, loss in loss_curve(ch, w, np.linspace(0.0, 0.5, points))]
    return bool(np.all(np.diff(values) >= -tol))
