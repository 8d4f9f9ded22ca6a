"""
Fehler-Hierarchie und Handler-Basisklassen für die mimkit-CLI.
Vereinheitlicht Error-Handling und Exit-Codes aller Subcommands.
"""
import argparse
import logging
import math
import sys
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, List, Optional

log = logging.getLogger("mimkit.handlers")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

class MimError(Exception):
    """Basis-Exception für alle mimkit-spezifischen Fehler."""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message)
        self.user_message = user_message or message

class ValidationError(MimError):
    """Ungültige Verteilung, Kanalmatrix oder Gitterdefinition."""
    pass

class ShapeError(MimError):
    """Dimensionen von Verteilung und Kanal passen nicht zusammen."""
    pass

class DomainError(MimError):
    """Parameter außerhalb des zulässigen Bereichs einer Operation."""
    pass

class UsageError(MimError):
    """Ungültige Kombination von CLI-Flags."""
    pass

def parse_grid(spec: str) -> List[float]:
    """
    Parst ein Gitter im Format start:stop:step (Endpunkte inklusive).

    Ein einzelner Wert ohne Doppelpunkt ergibt ein Gitter mit genau einem Punkt.
    Der letzte Punkt wird auf stop gesnappt, wenn er weniger als 1e-9·step davon entfernt ist.
    """
    parts = spec.split(":")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise UsageError(f"Ungültiges Gitter: {spec!r}", f"Gitter '{spec}' ist nicht im Format start:stop:step.")

    if len(values) == 1:
        return values
    if len(values) != 3:
        raise UsageError(f"Ungültiges Gitter: {spec!r}", f"Gitter '{spec}' ist nicht im Format start:stop:step.")

    start, stop, step = values
    if step <= 0 or stop < start:
        raise UsageError(f"Ungültiges Gitter: {spec!r}", "Gitter braucht step > 0 und stop >= start.")

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = [round(start + i * step, 12) for i in range(count)]
    if abs(grid[-1] - stop) <= 1e-9 * step:
        grid[-1] = stop
    return grid

class BaseCommand(ABC):
    """Basis-Klasse für alle Subcommands mit einheitlichem Error-Handling."""

    def __init__(self, name: str):
        self.name = name
        self.log = logging.getLogger(f"mimkit.handlers.{name}")

    def handle(self, args: argparse.Namespace) -> int:
        """Haupteinstiegspunkt mit Error-Handling, liefert den Exit-Code."""
        try:
            return self.execute(args)
        except MimError as e:
            self.log.error(f"Fehler in {self.name}: {e}")
            self._send_error(e.user_message)
            return EXIT_USAGE
        except Exception as e:
            self.log.exception(f"Unerwarteter Fehler in {self.name}: {e}")
            self._send_error("Ein unerwarteter Fehler ist aufgetreten.")
            return EXIT_USAGE

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> int:
        """Implementiert die eigentliche Command-Logik."""
        pass

    def _send_output(self, text: str, args: argparse.Namespace) -> None:
        """Schreibt das Ergebnis nach stdout oder in die Datei aus --output."""
        output: Optional[str] = getattr(args, "output", None)
        if output:
            Path(output).write_text(text, encoding="utf-8", newline="\n")
            self.log.info(f"Ausgabe geschrieben nach {output}")
        else:
            sys.stdout.write(text)

    def _send_error(self, error_message: str) -> None:
        """Gibt eine Fehlermeldung auf stderr aus."""
        print(f"Fehler: {error_message}", file=sys.stderr)

class SweepCommand(BaseCommand):
    """Handler für Commands, die eine Sweep-Tabelle erzeugen."""

    def __init__(self, name: str, rows_func: Callable[[argparse.Namespace], List[Any]]):
        super().__init__(name)
        self.rows_func = rows_func

    def execute(self, args: argparse.Namespace) -> int:
        from formatters import render_records

        records = self.rows_func(args)
        self.log.debug(f"{len(records)} Zeilen für {self.name} berechnet")
        self._send_output(render_records(records, args.format, args.precision), args)
        return EXIT_OK

class VerifyCommand(BaseCommand):
    """Handler für den verify-Command: Exit 0 nur wenn alle Prüfungen bestehen."""

    def __init__(self, name: str, suite_func: Callable[[argparse.Namespace], Any]):
        super().__init__(name)
        self.suite_func = suite_func

    def execute(self, args: argparse.Namespace) -> int:
        from formatters import fmt_verify_json, fmt_verify_report

        report = self.suite_func(args)
        if args.format == "json":
            self._send_output(fmt_verify_json(report, args.precision), args)
        else:
            self._send_output(fmt_verify_report(report, args.precision), args)

        if not report.passed:
            for check in report.failures:
                self.log.warning(f"FAIL {check.name}: erwartet {check.expected}, erhalten {check.actual}")
            return EXIT_VERIFY_FAILED
        return EXIT_OK
