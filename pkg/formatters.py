"""
Formatierungs-Funktionen für mimkit-Ausgaben.
Sweep-Tabellen (CSV/JSON), Rückwärts-Parser und Verify-Berichte sind hier zentralisiert.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from config import config
from handlers import UsageError

FORMATS = ("csv", "json")

@dataclass
class SweepRecord:
    """Eine Zeile eines Sweeps: Sweep-Variable mit Wert plus Ausgabespalten und Metadaten."""
    sweep_var: str
    sweep_value: float
    columns: Dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> Dict[str, Any]:
        row = {self.sweep_var: self.sweep_value}
        row.update(self.columns)
        return row

def round_sig(value: float, precision: int = None) -> float:
    """Rundet auf precision signifikante Stellen."""
    if precision is None:
        precision = config.PRECISION
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{precision}g}")

def _round_value(value: Any, precision: int) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    return round_sig(float(value), precision)

def round_record(record: SweepRecord, precision: int = None) -> SweepRecord:
    """Kopie mit allen Zahlen auf precision signifikante Stellen gerundet."""
    if precision is None:
        precision = config.PRECISION
    return SweepRecord(
        sweep_var=record.sweep_var,
        sweep_value=_round_value(record.sweep_value, precision),
        columns={k: _round_value(v, precision) for k, v in record.columns.items()},
    )

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)

def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text

def _check_columns(records: List[SweepRecord]) -> List[str]:
    header = list(records[0].as_row().keys())
    for r in records[1:]:
        if list(r.as_row().keys()) != header:
            raise UsageError("Spalten eines Sweeps sind nicht konstant")
    return header

def fmt_csv(records: List[SweepRecord], precision: int = None) -> str:
    """CSV mit Kopfzeile, Komma-getrennt, '.' als Dezimalzeichen, LF-Zeilenenden."""
    if not records:
        return ""
    rounded = [round_record(r, precision) for r in records]
    header = _check_columns(rounded)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rounded:
        writer.writerow([_cell(v) for v in r.as_row().values()])
    return buf.getvalue()

def fmt_json(records: List[SweepRecord], precision: int = None) -> str:
    """JSON-Array aus Objekten mit snake_case-Schlüsseln, gleiche Werte wie fmt_csv."""
    rounded = [round_record(r, precision) for r in records]
    if rounded:
        _check_columns(rounded)
    return json.dumps([r.as_row() for r in rounded], ensure_ascii=False, indent=2) + "\n"

def render_records(records: List[SweepRecord], fmt: str, precision: int = None) -> str:
    if fmt == "csv":
        return fmt_csv(records, precision)
    if fmt == "json":
        return fmt_json(records, precision)
    raise UsageError(f"Unbekanntes Format {fmt!r}", f"Format muss eines von {', '.join(FORMATS)} sein.")

def parse_csv(text: str) -> List[SweepRecord]:
    """Liest eine mit fmt_csv erzeugte Tabelle zurück; die erste Spalte ist die Sweep-Variable."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header, body = rows[0], rows[1:]
    records = []
    for row in body:
        values = [_parse_cell(cell) for cell in row]
        records.append(SweepRecord(sweep_var=header[0], sweep_value=values[0],
                                   columns=dict(zip(header[1:], values[1:]))))
    return records

def parse_json(text: str) -> List[SweepRecord]:
    """Gegenstück zu fmt_json."""
    records = []
    for obj in json.loads(text):
        keys = list(obj.keys())
        records.append(SweepRecord(sweep_var=keys[0], sweep_value=obj[keys[0]],
                                   columns={k: obj[k] for k in keys[1:]}))
    return records

def _num(value: Optional[float], precision: int) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    return f"{value:.{precision}g}"

def fmt_verify_report(report, precision: int = None) -> str:
    """Menschenlesbarer Bericht: eine Zeile pro Prüfung, Zusammenfassung am Ende."""
    if precision is None:
        precision = config.PRECISION
    lines = [f"Suite: {report.suite}"]
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(
            f"  [{status}] {check.name}: erwartet {_num(check.expected, precision)}, "
            f"erhalten {_num(check.actual, precision)} (Toleranz {_num(check.tolerance, 2)})"
        )
    failed = len(report.failures)
    total = len(report.checks)
    if failed:
        lines.append(f"FAIL: {failed} von {total} Prüfungen fehlgeschlagen")
    else:
        lines.append(f"PASS: alle {total} Prüfungen bestanden")
    return "\n".join(lines) + "\n"

def fmt_verify_json(report, precision: int = None) -> str:
    def rounded(v):
        return _round_value(v, precision or config.PRECISION)

    payload = {
        "suite": report.suite,
        "passed": report.passed,
        "checks": [
            {
                "name": c.name,
                "expected": rounded(c.expected),
                "actual": rounded(c.actual),
                "tolerance": c.tolerance,
                "passed": c.passed,
            }
            for c in report.checks
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
