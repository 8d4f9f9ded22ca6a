"""
Wahrscheinlichkeits-Grundobjekte: Verteilungen, Kanäle, Randverteilungen,
Bayes-Posterior und die Shannon-Größen (in Bit).
Alle Objekte sind nach der Konstruktion unveränderlich.
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from config import config
from handlers import DomainError, ShapeError, ValidationError

log = logging.getLogger("mimkit.probability")

ArrayLike = Union[Sequence[float], np.ndarray]

def _check_unit_interval(name: str, value: float) -> float:
    """Prüft einen Parameter auf [0, 1]."""
    value = float(value)
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise DomainError(f"{name}={value} liegt nicht in [0, 1]", f"{name} muss in [0, 1] liegen.")
    return value

def _normalized_rows(arr: np.ndarray, what: str) -> np.ndarray:
    """
    Validiert Zeilen auf Wahrscheinlichkeitsvektoren.
    Abweichungen der Zeilensumme bis NORMALIZE_TOL werden normalisiert, größere abgelehnt.
    """
    if arr.size == 0:
        raise ValidationError(f"{what} ist leer")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} enthält NaN oder Inf")
    if np.any(arr < -config.PROB_TOL) or np.any(arr > 1.0 + config.PROB_TOL):
        raise ValidationError(f"{what} enthält Einträge außerhalb von [0, 1]")

    arr = np.clip(arr, 0.0, 1.0)
    sums = arr.sum(axis=-1, keepdims=True)
    deviation = np.abs(sums - 1.0)
    if np.any(deviation > config.NORMALIZE_TOL):
        raise ValidationError(
            f"{what} summiert nicht zu 1 (max. Abweichung {deviation.max():.3e})",
            f"{what} muss zu 1 summieren.",
        )
    if np.any(deviation > config.PROB_TOL):
        arr = arr / sums
    return arr

class Distribution:
    """Endliche Wahrscheinlichkeitsverteilung p(x) über einem Alphabet."""

    __slots__ = ("_probs",)

    def __init__(self, probs: ArrayLike):
        arr = np.array(probs, dtype=float).ravel()
        arr = _normalized_rows(arr, "Verteilung")
        arr.setflags(write=False)
        self._probs = arr

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        """Gleichverteilung über size Symbole."""
        if int(size) < 1:
            raise DomainError(f"Alphabetgröße {size} < 1")
        return cls(np.full(int(size), 1.0 / int(size)))

    @classmethod
    def bernoulli(cls, p: float) -> "Distribution":
        """Bernoulli(p)-Quelle als (p, 1-p)."""
        p = _check_unit_interval("p", p)
        return cls([p, 1.0 - p])

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def alphabet_size(self) -> int:
        return int(self._probs.size)

    @property
    def max_prob(self) -> float:
        return float(self._probs.max())

    def __len__(self) -> int:
        return self.alphabet_size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._probs.shape == other._probs.shape and bool(np.all(self._probs == other._probs))

    def __hash__(self) -> int:
        return hash(self._probs.tobytes())

    def __repr__(self) -> str:
        return f"Distribution({np.array2string(self._probs, precision=6, separator=', ')})"

class Channel:
    """Zeilenstochastische Übergangsmatrix p(y|x) mit rows Eingängen und cols Ausgängen."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix: ArrayLike):
        arr = np.array(matrix, dtype=float)
        if arr.ndim != 2:
            raise ValidationError(f"Kanalmatrix muss 2-dimensional sein, hat ndim={arr.ndim}")
        arr = _normalized_rows(arr, "Kanalmatrix")
        arr.setflags(write=False)
        self._matrix = arr

    @classmethod
    def bsc(cls, beta: float) -> "Channel":
        """Binär-symmetrischer Kanal mit Übergangswahrscheinlichkeit beta."""
        beta = _check_unit_interval("beta_s", beta)
        return cls([[1.0 - beta, beta], [beta, 1.0 - beta]])

    @classmethod
    def bec(cls, beta: float) -> "Channel":
        """Binärer Auslöschungskanal; die dritte Ausgabespalte ist das Löschsymbol."""
        beta = _check_unit_interval("beta_e", beta)
        return cls([[1.0 - beta, 0.0, beta], [0.0, 1.0 - beta, beta]])

    @classmethod
    def k_ary_symmetric(cls, beta: float, k: int) -> "Channel":
        """K-närer stark symmetrischer Kanal: Diagonale 1-beta, sonst beta/(K-1)."""
        beta = _check_unit_interval("beta_k", beta)
        k = int(k)
        if k < 2:
            raise DomainError(f"K={k} < 2", "K muss mindestens 2 sein.")
        matrix = np.full((k, k), beta / (k - 1))
        np.fill_diagonal(matrix, 1.0 - beta)
        return cls(matrix)

    @classmethod
    def identity(cls, size: int) -> "Channel":
        """Verzerrungsfreier Kanal."""
        return cls(np.eye(int(size)))

    @classmethod
    def constant(cls, row: ArrayLike, inputs: int) -> "Channel":
        """Kanal mit identischen Zeilen (Ausgang unabhängig vom Eingang)."""
        row_arr = np.asarray(row, dtype=float).ravel()
        return cls(np.tile(row_arr, (int(inputs), 1)))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def rows(self) -> int:
        return int(self._matrix.shape[0])

    @property
    def cols(self) -> int:
        return int(self._matrix.shape[1])

    @property
    def shape(self):
        return self._matrix.shape

    def row(self, i: int) -> Distribution:
        return Distribution(self._matrix[i])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Channel):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._matrix == other._matrix))

    def __hash__(self) -> int:
        return hash(self._matrix.tobytes())

    def __repr__(self) -> str:
        return f"Channel({np.array2string(self._matrix, precision=6, separator=', ')})"

@dataclass(frozen=True)
class Posterior:
    """
    Rückwärtsmatrix p(x|y): Zeile j ist die Verteilung von X gegeben y_j.
    Zeilen nicht erreichbarer Ausgänge (p(y_j) = 0) sind Null und in reachable markiert.
    """
    matrix: np.ndarray
    output_marginal: Distribution
    reachable: np.ndarray

def _check_dims(px: Distribution, ch: Channel) -> None:
    if px.alphabet_size != ch.rows:
        raise ShapeError(
            f"Verteilung hat {px.alphabet_size} Symbole, Kanal {ch.rows} Eingänge",
            "Dimension von Verteilung und Kanal passen nicht zusammen.",
        )

def xlogx(p: np.ndarray) -> np.ndarray:
    """Elementweise p·log2(p) mit 0·log 0 := 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)

def entropy_bits(p: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon-Entropie in Bit entlang axis (ohne Validierung, für Optimierer)."""
    return -xlogx(p).sum(axis=axis)

def binary_entropy(p: float) -> float:
    """H(p) = -[p log p + (1-p) log(1-p)] in Bit."""
    p = _check_unit_interval("p", p)
    return float(entropy_bits(np.array([p, 1.0 - p])))

def mutual_information_array(px: np.ndarray, matrix: np.ndarray) -> float:
    """I(X;Y) = H(Y) - H(Y|X) auf rohen Arrays."""
    py = px @ matrix
    value = float(entropy_bits(py) - px @ entropy_bits(matrix, axis=1))
    return max(value, 0.0)

def channel_capacity(ch: Channel, thresh: float = 1e-12, max_iter: int = 100000):
    """
    Shannon-Kapazität per Blahut-Arimoto.

    Returns:
        (Kapazität in Bit, kapazitätserreichende Eingangsverteilung, konvergiert)
    """
    w = ch.matrix
    r = np.full(ch.rows, 1.0 / ch.rows)
    lower = 0.0

    for _ in range(max_iter):
        q = r @ w
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ratio = np.where(w > 0.0, np.log2(np.where(w > 0.0, w, 1.0) / np.where(q > 0.0, q, 1.0)), 0.0)
        d = (w * log_ratio).sum(axis=1)
        lower = float(np.log2(r @ np.exp2(d)))
        upper = float(d.max())
        if upper - lower < thresh:
            return max(lower, 0.0), Distribution(r), True
        r = r * np.exp2(d)
        r = r / r.sum()

    log.warning(f"Blahut-Arimoto nach {max_iter} Iterationen nicht konvergiert")
    return max(lower, 0.0), Distribution(r), False

def output_marginal(px: Distribution, ch: Channel) -> Distribution:
    """p(y_j) = Σ_i p(x_i) p(y_j|x_i)."""
    _check_dims(px, ch)
    return Distribution(px.probs @ ch.matrix)

def joint(px: Distribution, ch: Channel) -> np.ndarray:
    """Verbundverteilung p(x_i, y_j) als rows×cols-Matrix."""
    _check_dims(px, ch)
    return px.probs[:, None] * ch.matrix

def posterior(px: Distribution, ch: Channel) -> Posterior:
    """Bayes: p(x_i|y_j) = p(x_i) p(y_j|x_i) / p(y_j) für alle erreichbaren y_j."""
    pxy = joint(px, ch)
    py = pxy.sum(axis=0)
    reachable = py > 0.0
    matrix = np.zeros((ch.cols, ch.rows))
    matrix[reachable] = (pxy[:, reachable] / py[reachable]).T
    matrix.setflags(write=False)
    reachable.setflags(write=False)
    return Posterior(matrix=matrix, output_marginal=Distribution(py), reachable=reachable)

def shannon_entropy(d: Distribution) -> float:
    """H(X) in Bit."""
    return float(entropy_bits(d.probs))

def conditional_entropy(px: Distribution, ch: Channel) -> float:
    """H(Y|X) = Σ_x p(x) H(p(·|x)) in Bit."""
    _check_dims(px, ch)
    return float(px.probs @ entropy_bits(ch.matrix, axis=1))

def mutual_information(px: Distribution, ch: Channel) -> float:
    """Transinformation I(X;Y) = H(Y) - H(Y|X) in Bit."""
    _check_dims(px, ch)
    return mutual_information_array(px.probs, ch.matrix)
