"""
Message-Importance-Distortion-Funktion R_ϖ(D):
minimaler Importance Loss über alle Übergangsmatrizen mit mittlerer Verzerrung <= D.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config import config
from handlers import DomainError, ShapeError, ValidationError
from mim import ImportanceParam, binary_mim, importance_loss, loss_array
from optimizer import OptimizerOptions, augmented_lagrangian
from probability import Channel, Distribution, binary_entropy, output_marginal

log = logging.getLogger("mimkit.distortion")

CLOSED_FORM = "closed_form"
NUMERIC = "numeric"
ENDPOINT = "endpoint"

@dataclass(frozen=True)
class DistortionSpec:
    """Nichtnegative Verzerrungsmatrix d(x_i, y_j)."""
    matrix: np.ndarray

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("Verzerrungsmatrix muss 2-dimensional und nicht leer sein")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ValidationError("Verzerrungsmatrix muss endlich und nichtnegativ sein")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def hamming(cls, n: int) -> "DistortionSpec":
        """0 auf der Diagonalen, 1 sonst."""
        n = int(n)
        if n < 1:
            raise DomainError(f"Hamming-Größe {n} < 1")
        return cls(1.0 - np.eye(n))

    @property
    def shape(self):
        return self.matrix.shape

@dataclass(frozen=True)
class RdResult:
    rate: float
    argmin_channel: Channel
    achieved_distortion: float
    method: str
    converged: bool = True
    varpi_bound_ok: bool = True

def _check_spec_dims(px: Distribution, d: DistortionSpec, ch: Optional[Channel] = None) -> None:
    if d.shape[0] != px.alphabet_size or (ch is not None and ch.shape != d.shape):
        raise ShapeError(
            f"Verzerrungsmatrix {d.shape} passt nicht zu Quelle ({px.alphabet_size}) bzw. Kanal",
            "Dimension der Verzerrungsmatrix passt nicht.",
        )

def average_distortion(px: Distribution, ch: Channel, d: DistortionSpec) -> float:
    """D̄ = Σ_i Σ_j p(x_i) p(y_j|x_i) d(x_i, y_j)."""
    _check_spec_dims(px, d, ch)
    return float(px.probs @ (ch.matrix * d.matrix).sum(axis=1))

def distortion_domain(px: Distribution, d: DistortionSpec) -> Tuple[float, float]:
    """
    (D_min, D_max) mit D_min = 0 und D_max = min_j Σ_i p(x_i) d(x_i, y_j).

    D_min = 0 setzt eine Verzerrungsmatrix mit einer Null in jeder Zeile voraus (z.B. Hamming);
    die tatsächlich erreichbare Untergrenze liefert achievable_floor.
    """
    _check_spec_dims(px, d)
    return 0.0, float((px.probs @ d.matrix).min())

def achievable_floor(px: Distribution, d: DistortionSpec) -> float:
    """Kleinste erreichbare Verzerrung Σ_i p(x_i) min_j d(x_i, y_j)."""
    _check_spec_dims(px, d)
    return float(px.probs @ d.matrix.min(axis=1))

def varpi_bound(px: Distribution, ch: Channel) -> float:
    """2·min_j p(y_j) / max_i p(x_i), Minimum über die erreichbaren Ausgänge."""
    py = output_marginal(px, ch).probs
    return 2.0 * float(py[py > 0.0].min()) / px.max_prob

def _bound_flag(px: Distribution, ch: Channel, w: ImportanceParam) -> bool:
    ok = w.varpi <= varpi_bound(px, ch) + config.EQ_TOL
    if not ok:
        log.warning(f"ϖ={w.varpi} überschreitet die Schranke {varpi_bound(px, ch):.6g} des gelieferten Kanals")
    return ok

def _check_bernoulli(p: float, D: float) -> Tuple[float, float]:
    p, D = float(p), float(D)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} nicht in (0, 1)", "p muss strikt zwischen 0 und 1 liegen.")
    d_max = min(p, 1.0 - p)
    if D < 0.0 or D > d_max + config.PROB_TOL:
        raise DomainError(f"D={D} außerhalb [0, {d_max}]", f"D muss in [0, min(p, 1-p)] = [0, {d_max:g}] liegen.")
    return p, min(D, d_max)

def alpha_star(p: float, D: float) -> float:
    """Optimales α = p(y_1|x_0) = (1-p-D)D / (p(1-2D))."""
    p, D = _check_bernoulli(p, D)
    if D >= 0.5:
        raise DomainError("D = 0.5: Nenner 1-2D verschwindet")
    return (1.0 - p - D) * D / (p * (1.0 - 2.0 * D))

def optimal_test_channel(p: float, D: float) -> Channel:
    """
    Testkanal der Bernoulli-Hamming-Lösung.
    Die Posterior hat in jeder Ausgabezeile genau Fehlermasse D.
    """
    p, D = _check_bernoulli(p, D)
    if D >= 0.5:
        raise DomainError("D = 0.5: Nenner 1-2D verschwindet", "Für D = 0.5 existiert kein Testkanal.")
    a = alpha_star(p, D)
    b = D * (p - D) / ((1.0 - p) * (1.0 - 2.0 * D))
    return Channel(np.clip([[1.0 - a, a], [b, 1.0 - b]], 0.0, 1.0))

def midf_bernoulli_hamming(p: float, w: ImportanceParam, D: float) -> RdResult:
    """R_ϖ(D) = L(ϖ, p) - L(ϖ, D) für Bernoulli(p) mit Hamming-Verzerrung."""
    p, D = _check_bernoulli(p, D)
    px = Distribution.bernoulli(p)
    rate = binary_mim(p, w) - binary_mim(D, w)

    if D >= 0.5:
        # p = D = 0.5: Unabhängigkeit, kein Testkanal definiert
        ch = Channel.constant([1.0, 0.0], 2)
        method = ENDPOINT
    else:
        ch = optimal_test_channel(p, D)
        method = CLOSED_FORM

    return RdResult(
        rate=rate,
        argmin_channel=ch,
        achieved_distortion=average_distortion(px, ch, DistortionSpec.hamming(2)),
        method=method,
        varpi_bound_ok=_bound_flag(px, ch, w),
    )

def shannon_rd_bernoulli(p: float, D: float) -> float:
    """Shannon-Rate-Distortion H(p) - H(D) für Bernoulli(p), 0 ab D >= min(p, 1-p)."""
    p, D = float(p), float(D)
    if D >= min(p, 1.0 - p):
        return 0.0
    return binary_entropy(p) - binary_entropy(D)

def _min_distortion_channel(d: DistortionSpec) -> np.ndarray:
    """Deterministischer Kanal x -> argmin_j d(x, j)."""
    rows, cols = d.shape
    q0 = np.zeros((rows, cols))
    q0[np.arange(rows), d.matrix.argmin(axis=1)] = 1.0
    return q0

def _rank_one_channel(px: Distribution, d: DistortionSpec) -> np.ndarray:
    """Alle Zeilen auf den Ausgang mit minimaler erwarteter Verzerrung (erreicht D_max)."""
    rows, cols = d.shape
    q = np.zeros((rows, cols))
    q[:, int((px.probs @ d.matrix).argmin())] = 1.0
    return q

def midf_numeric(px: Distribution, d: DistortionSpec, D: float, w: ImportanceParam,
                 opts: Optional[OptimizerOptions] = None) -> RdResult:
    """
    Numerische Lösung von min Φ unter D̄ = D über zeilenstochastische Kanäle.

    Ab D >= D_max wird der unabhängige Rang-1-Kanal geliefert (Rate 0), bei der minimal
    erreichbaren Verzerrung der deterministische Minimalverzerrungs-Kanal.
    """
    if opts is None:
        opts = OptimizerOptions.from_config()
    _check_spec_dims(px, d)
    D = float(D)
    _, d_max = distortion_domain(px, d)
    q0 = _min_distortion_channel(d)
    d_floor = achievable_floor(px, d)

    if D < 0.0 or D < d_floor - config.PROB_TOL:
        raise DomainError(f"D={D} unterhalb der erreichbaren Verzerrung {d_floor}",
                          f"D muss mindestens {d_floor:g} betragen.")

    if D >= d_max - config.PROB_TOL:
        ch = Channel(_rank_one_channel(px, d))
        return RdResult(rate=importance_loss(px, ch, w).loss, argmin_channel=ch,
                        achieved_distortion=average_distortion(px, ch, d), method=ENDPOINT,
                        varpi_bound_ok=_bound_flag(px, ch, w))
    if D <= d_floor + config.PROB_TOL:
        ch = Channel(q0)
        return RdResult(rate=importance_loss(px, ch, w).loss, argmin_channel=ch,
                        achieved_distortion=average_distortion(px, ch, d), method=ENDPOINT,
                        varpi_bound_ok=_bound_flag(px, ch, w))

    p = px.probs
    varpi = w.varpi
    dmat = d.matrix

    def distortion_of(q: np.ndarray) -> float:
        return float(p @ (q * dmat).sum(axis=1))

    # zulässiger Start: Mischung aus Minimalverzerrungs- und Rang-1-Kanal mit D̄ = D
    q_far = _rank_one_channel(px, d)
    t = (D - d_floor) / (d_max - d_floor)
    starts = [(1.0 - t) * q0 + t * q_far]
    rng = np.random.default_rng(opts.seed)
    for _ in range(min(opts.starts - 1, 2)):
        starts.append(rng.dirichlet(np.ones(d.shape[1]), size=d.shape[0]))

    best = None
    for q_start in starts:
        run = augmented_lagrangian(lambda q: loss_array(p, q, varpi), lambda q: distortion_of(q) - D,
                                   q_start, opts)
        q = run.x
        # auf exakte Zulässigkeit D̄ <= D reparieren
        achieved = distortion_of(q)
        if achieved > D:
            s = (achieved - D) / (achieved - d_floor)
            q = (1.0 - s) * q + s * q0
        value = loss_array(p, q, varpi)
        if best is None or (run.converged and not best[2]) or (run.converged == best[2] and value < best[1]):
            best = (q, value, run.converged)

    q, _, converged = best
    ch = Channel(q)
    if not converged:
        log.warning(f"midf_numeric: Penalty-Verfahren für D={D} nicht konvergiert, bestes Ergebnis geliefert")
    return RdResult(
        rate=importance_loss(px, ch, w).loss,
        argmin_channel=ch,
        achieved_distortion=average_distortion(px, ch, d),
        method=NUMERIC,
        converged=converged,
        varpi_bound_ok=_bound_flag(px, ch, w),
    )
