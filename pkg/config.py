"""
Zentrale Konfiguration für mimkit.
Alle Konstanten, Defaults und Environment-Variablen werden hier verwaltet.
"""
import os
from typing import Any, Dict
from dotenv import load_dotenv

# Environment laden
load_dotenv()

class MimConfig:
    """Zentrale Konfigurationsklasse für Solver, Oracle und CLI."""

    # Logging
    LOG_LEVEL: str = os.getenv("MIM_LOG_LEVEL", "INFO").upper()

    # Optimierer (OptimizerOptions-Defaults)
    MAX_ITERS: int = int(os.getenv("MIM_MAX_ITERS", "10000"))
    STARTS: int = int(os.getenv("MIM_STARTS", "8"))
    SEED: int = int(os.getenv("MIM_SEED", "0"))
    TOLERANCE: float = float(os.getenv("MIM_TOLERANCE", "1e-9"))
    FD_STEP: float = float(os.getenv("MIM_FD_STEP", "1e-6"))

    # Penalty-Schema für R_ϖ(D) und die Bitrate unter Loss-Budget
    PENALTY_ROUNDS: int = int(os.getenv("MIM_PENALTY_ROUNDS", "6"))
    PENALTY_GROWTH: float = float(os.getenv("MIM_PENALTY_GROWTH", "10"))
    PENALTY_START: float = float(os.getenv("MIM_PENALTY_START", "10"))

    # Ausgabe
    PRECISION: int = int(os.getenv("MIM_PRECISION", "6"))

    # Oracle-Gitter
    GRID_RESOLUTION_1D: float = float(os.getenv("MIM_GRID_RESOLUTION_1D", "1e-4"))
    GRID_RESOLUTION_SIMPLEX: float = float(os.getenv("MIM_GRID_RESOLUTION_SIMPLEX", "1e-2"))
    MAX_GRID_POINTS: int = int(os.getenv("MIM_MAX_GRID_POINTS", "2000000"))
    MAX_ORACLE_ALPHABET: int = 4

    # Toleranzen
    PROB_TOL: float = 1e-12
    NORMALIZE_TOL: float = 1e-9
    EQ_TOL: float = 1e-10
    GOLDEN_TOL: float = 5e-4
    # Näherung vs. exakte Bisektion bei ϖ=0.1: gemessen 2.772e-4 Bit, Toleranz = 2× aufgerundet
    APPROX_RATE_TOL: float = 6e-4
    APPROX_P_TOL: float = 2e-2
    RD_NUMERIC_TOL: float = 1e-5

    @classmethod
    def validate(cls) -> None:
        """Validiert, dass alle Konfigurationswerte brauchbar sind."""
        if cls.MAX_ITERS < 1:
            raise ValueError("MIM_MAX_ITERS muss mindestens 1 sein.")
        if cls.STARTS < 1:
            raise ValueError("MIM_STARTS muss mindestens 1 sein.")
        if cls.TOLERANCE <= 0 or cls.FD_STEP <= 0:
            raise ValueError("MIM_TOLERANCE und MIM_FD_STEP müssen positiv sein.")
        if cls.PENALTY_ROUNDS < 1 or cls.PENALTY_GROWTH <= 1 or cls.PENALTY_START <= 0:
            raise ValueError("Penalty-Schema ungültig (Runden >= 1, Wachstum > 1, Start > 0).")
        if not 1 <= cls.PRECISION <= 17:
            raise ValueError("MIM_PRECISION muss zwischen 1 und 17 liegen.")
        if not 0 < cls.GRID_RESOLUTION_1D <= 0.5 or not 0 < cls.GRID_RESOLUTION_SIMPLEX <= 0.5:
            raise ValueError("Gitterauflösungen müssen in (0, 0.5] liegen.")

    @classmethod
    def optimizer_defaults(cls) -> Dict[str, Any]:
        """Gibt die Default-Werte für OptimizerOptions als Dictionary zurück."""
        return {
            "max_iters": cls.MAX_ITERS,
            "starts": cls.STARTS,
            "seed": cls.SEED,
            "tolerance": cls.TOLERANCE,
            "fd_step": cls.FD_STEP,
            "penalty_rounds": cls.PENALTY_ROUNDS,
            "penalty_growth": cls.PENALTY_GROWTH,
            "penalty_start": cls.PENALTY_START,
        }

# Singleton-Instanz für einfachen Import
config = MimConfig()

# Subcommand-Definitionen für die CLI
COMMANDS = [
    ("mim", "Berechnet L(ϖ, X) für eine Verteilung (optional über ein ϖ-Gitter)"),
    ("milc", "Message Importance Loss Capacity für bsc | bec | ksym"),
    ("midf", "Importance-Distortion-Funktion R_ϖ(D) für eine Bernoulli-Quelle"),
    ("maxrate", "Maximale Bitrate unter Importance-Loss-Budget ε"),
    ("verify", "Oracle- und Referenzwert-Prüfungen (golden | milc | rd | rate | all)"),
]

def get_help_text() -> str:
    """Erstellt den Epilog-Text für alle verfügbaren Subcommands."""
    lines = ["Verfügbare Befehle:"]

    for name, description in COMMANDS:
        lines.append(f"  {name:<8} {description}")

    lines.extend([
        "",
        "Tipps:",
        "  Gitter werden als start:stop:step angegeben (Endpunkte inklusive).",
        "  --format json liefert dieselben Werte wie --format csv.",
    ])

    return "\n".join(lines)
