"""
Brute-Force-Orakel: erschöpfende Gittersuchen, gegen die jede geschlossene Form
und jeder Optimierer im Kleinformat geprüft wird.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from config import config
from handlers import DomainError, ValidationError
from mim import ImportanceParam, loss_array
from probability import Channel, mutual_information_array

log = logging.getLogger("mimkit.oracle")

@dataclass(frozen=True)
class GridSpec:
    """Schrittweite resolution in (0, 0.5] auf einem Simplex der Dimension dimension."""
    resolution: float
    dimension: int = 2

    def __post_init__(self):
        resolution = float(self.resolution)
        if not 0.0 < resolution <= 0.5:
            raise ValidationError(f"resolution={resolution} nicht in (0, 0.5]",
                                  "Gitterauflösung muss in (0, 0.5] liegen.")
        if int(self.dimension) < 1:
            raise ValidationError(f"dimension={self.dimension} < 1")
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "dimension", int(self.dimension))

    @classmethod
    def for_channel(cls, ch: Channel, resolution: Optional[float] = None) -> "GridSpec":
        """Default-Auflösung: fein für binäre Eingänge, grob für größere Simplizes."""
        if resolution is None:
            resolution = config.GRID_RESOLUTION_1D if ch.rows == 2 else config.GRID_RESOLUTION_SIMPLEX
        return cls(resolution=resolution, dimension=ch.rows)

    @property
    def steps(self) -> int:
        """Anzahl der Teilintervalle von [0, 1]."""
        return max(1, int(round(1.0 / self.resolution)))

    def point_count(self) -> int:
        return math.comb(self.steps + self.dimension - 1, self.dimension - 1)

def _check_grid(g: GridSpec, ch: Channel) -> None:
    if ch.rows > config.MAX_ORACLE_ALPHABET:
        raise DomainError(f"Alphabet {ch.rows} > {config.MAX_ORACLE_ALPHABET}",
                          f"Orakel nur für Alphabete bis {config.MAX_ORACLE_ALPHABET}.")
    if g.dimension != ch.rows:
        raise DomainError(f"Gitterdimension {g.dimension} passt nicht zu {ch.rows} Eingängen")
    if g.point_count() > config.MAX_GRID_POINTS:
        raise DomainError(f"{g.point_count()} Gitterpunkte > {config.MAX_GRID_POINTS}",
                          "Gitter zu fein für dieses Alphabet.")

def simplex_grid(g: GridSpec) -> Iterator[np.ndarray]:
    """Alle Punkte k/steps des Simplex (Stars and Bars), Koordinaten summieren exakt zu 1."""
    n, dim = g.steps, g.dimension
    for bars in itertools.combinations(range(n + dim - 1), dim - 1):
        edges = (-1,) + bars + (n + dim - 1,)
        counts = np.diff(edges) - 1
        yield counts / n

def grid_max_loss(ch: Channel, w: ImportanceParam, g: GridSpec) -> Tuple[float, np.ndarray]:
    """Maximum von Φ über alle Gitterpunkte des Eingangssimplex."""
    _check_grid(g, ch)
    matrix = ch.matrix
    best_value, best_x = -math.inf, None

    for x in simplex_grid(g):
        value = loss_array(x, matrix, w.varpi)
        if value > best_value:
            best_value, best_x = value, x

    log.debug(f"grid_max_loss: {g.point_count()} Punkte, Maximum {best_value:.10g}")
    return best_value, best_x

def rd_alpha_range(p: float, D: float) -> Tuple[float, float]:
    """Zulässige α = p(y_1|x_0), für die β = (D - pα)/(1-p) in [0, 1] liegt."""
    return max(0.0, 1.0 + (D - 1.0) / p), min(1.0, D / p)

def grid_min_rd(p: float, w: ImportanceParam, D: float, g: GridSpec) -> Tuple[float, float, float]:
    """
    Scan von α auf der Gleichung pα + (1-p)β = D (Bernoulli-Quelle, Hamming).

    Returns:
        (minimales Φ, argmin α, zugehöriges β)
    """
    p, D = float(p), float(D)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} nicht in (0, 1)", "p muss strikt zwischen 0 und 1 liegen.")
    if D < 0.0 or D > 1.0:
        raise DomainError(f"D={D} nicht erreichbar", "D muss in [0, 1] liegen.")

    lo, hi = rd_alpha_range(p, D)
    if lo > hi + config.PROB_TOL:
        raise DomainError(f"Keine Testkanäle mit D̄ = {D}")
    count = max(1, int(math.ceil((hi - lo) / g.resolution))) + 1
    px = np.array([p, 1.0 - p])

    best = (math.inf, lo, 0.0)
    for alpha in np.linspace(lo, hi, count):
        beta = min(max((D - p * alpha) / (1.0 - p), 0.0), 1.0)
        q = np.array([[1.0 - alpha, alpha], [beta, 1.0 - beta]])
        value = loss_array(px, q, w.varpi)
        if value < best[0]:
            best = (value, float(alpha), float(beta))

    return best

def grid_max_mi_under_loss(ch: Channel, w: ImportanceParam, eps: float,
                           g: GridSpec) -> Tuple[float, float]:
    """
    Scan von p über [0, 1/2] für binäre Eingänge; unter allen Punkten mit Φ <= ε
    wird die maximale Transinformation geliefert.
    """
    if ch.rows != 2:
        raise DomainError(f"Kanal hat {ch.rows} Eingänge", "Das Raten-Orakel braucht binäre Eingänge.")
    eps = float(eps)
    matrix = ch.matrix
    count = int(round(0.5 / g.resolution)) + 1

    best_rate, best_p = 0.0, 0.0
    for p in np.linspace(0.0, 0.5, count):
        x = np.array([p, 1.0 - p])
        if loss_array(x, matrix, w.varpi) > eps:
            continue
        rate = mutual_information_array(x, matrix)
        if rate >= best_rate:
            best_rate, best_p = rate, float(p)

    return best_rate, best_p

def lipschitz_gap(w: ImportanceParam, g: GridSpec) -> float:
    """Erlaubte Lücke Gitter vs. Optimum: 10·resolution·ϖ·e^ϖ."""
    return 10.0 * g.resolution * w.varpi * math.exp(w.varpi)
