"""
Message Importance Measure (MIM) und abgeleitete Größen:
Self-Scoring-Werte, bedingte MIM (CMIM) und Importance Loss Φ.
Die Array-Varianten (*_array) arbeiten ohne Validierung und werden von den Optimierern benutzt.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from handlers import DomainError
from probability import Channel, Distribution, _check_dims

log = logging.getLogger("mimkit.mim")

@dataclass(frozen=True)
class ImportanceParam:
    """Importance-Koeffizient ϖ > 0."""
    varpi: float

    def __post_init__(self):
        value = float(self.varpi)
        if not math.isfinite(value) or value <= 0.0:
            raise DomainError(f"varpi={self.varpi} ist nicht positiv", "ϖ muss eine positive Zahl sein.")
        object.__setattr__(self, "varpi", value)

    def region_one(self, d: Distribution) -> bool:
        """Arbeitsbereich i: ϖ <= 2 / max_i p(x_i)."""
        return self.varpi <= 2.0 / d.max_prob

@dataclass(frozen=True)
class LossReport:
    """Importance Loss Φ = L(ϖ, X) - L(ϖ, X|Y) mit beiden Summanden."""
    mim_value: float
    cmim_value: float
    loss: float

    @classmethod
    def from_values(cls, mim_value: float, cmim_value: float) -> "LossReport":
        return cls(mim_value=mim_value, cmim_value=cmim_value, loss=mim_value - cmim_value)

def scores(p: np.ndarray, varpi: float) -> np.ndarray:
    """Elementweise Self-Scoring-Werte p·e^{ϖ(1-p)}."""
    return p * np.exp(varpi * (1.0 - p))

def mim_array(p: np.ndarray, varpi: float) -> float:
    return float(scores(p, varpi).sum())

def cmim_array(px: np.ndarray, matrix: np.ndarray, varpi: float) -> float:
    """Σ_j p(y_j) Σ_i p(x_i|y_j) e^{ϖ(1-p(x_i|y_j))}; nicht erreichbare y_j tragen 0 bei."""
    pxy = px[:, None] * matrix
    py = pxy.sum(axis=0)
    reachable = py > 0.0
    pxy = pxy[:, reachable]
    post = pxy / py[reachable]
    return float((pxy * np.exp(varpi * (1.0 - post))).sum())

def loss_array(px: np.ndarray, matrix: np.ndarray, varpi: float) -> float:
    return mim_array(px, varpi) - cmim_array(px, matrix, varpi)

def self_scoring(p_i: float, w: ImportanceParam) -> float:
    """Self-Scoring-Wert eines Ereignisses mit Wahrscheinlichkeit p_i."""
    p_i = float(p_i)
    if not 0.0 <= p_i <= 1.0:
        raise DomainError(f"p_i={p_i} liegt nicht in [0, 1]", "p_i muss in [0, 1] liegen.")
    return p_i * math.exp(w.varpi * (1.0 - p_i))

def mim(d: Distribution, w: ImportanceParam) -> float:
    """L(ϖ, X) = Σ_i p(x_i) e^{ϖ(1-p(x_i))}."""
    return mim_array(d.probs, w.varpi)

def binary_mim(p: float, w: ImportanceParam) -> float:
    """L(ϖ, p) = p e^{ϖ(1-p)} + (1-p) e^{ϖp} für eine Bernoulli(p)-Quelle."""
    return p * math.exp(w.varpi * (1.0 - p)) + (1.0 - p) * math.exp(w.varpi * p)

def mim_second_order(d: Distribution, w: ImportanceParam) -> float:
    """
    Taylor-Näherung zweiter Ordnung von L(ϖ, X):
    1 + ϖ Σ p(1-p) + ϖ²/2 Σ p(1-p)².
    Für Bernoulli(p) ergibt das 1 + (2ϖ + ϖ²/2) p(1-p).
    """
    p = d.probs
    q = 1.0 - p
    return float(1.0 + w.varpi * (p * q).sum() + 0.5 * w.varpi ** 2 * (p * q * q).sum())

def cmim(px: Distribution, ch: Channel, w: ImportanceParam) -> float:
    """L(ϖ, X|Y) über die Bayes-Posterior p(x|y)."""
    _check_dims(px, ch)
    return cmim_array(px.probs, ch.matrix, w.varpi)

def cmim_forward(px: Distribution, ch: Channel, w: ImportanceParam) -> float:
    """L(ϖ, Y|X) = Σ_i p(x_i) Σ_j p(y_j|x_i) e^{ϖ(1-p(y_j|x_i))}, direkt auf den Kanalzeilen."""
    _check_dims(px, ch)
    return float(px.probs @ scores(ch.matrix, w.varpi).sum(axis=1))

def importance_loss(px: Distribution, ch: Channel, w: ImportanceParam) -> LossReport:
    """
    Φ_ϖ(X||Y) = L(ϖ, X) - L(ϖ, X|Y).

    Nichtnegativität ist nur für ϖ <= 2 garantiert; darüber wird gewarnt, nicht abgebrochen.
    """
    _check_dims(px, ch)
    if w.varpi > 2.0:
        log.warning(f"ϖ={w.varpi} > 2: Nichtnegativität des Importance Loss nicht garantiert")
    return LossReport.from_values(mim(px, w), cmim(px, ch, w))
