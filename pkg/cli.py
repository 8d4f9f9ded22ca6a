"""
mimkit - Kommandozeile für Message-Importance-Größen.
Subcommands erzeugen Sweep-Tabellen (CSV/JSON) oder führen Prüf-Suiten aus.
"""
import argparse
import logging
import sys
from typing import List, Optional

from config import COMMANDS, config, get_help_text
from formatters import FORMATS, SweepRecord
from handlers import SweepCommand, UsageError, VerifyCommand, parse_grid
from mim import ImportanceParam

log = logging.getLogger("mimkit")

def _values(args: argparse.Namespace, name: str, required: bool = True) -> List[float]:
    """Wert aus --name oder Gitter aus --name-grid; beides zugleich ist ein Usage-Fehler."""
    scalar = getattr(args, name, None)
    grid = getattr(args, f"{name}_grid", None)
    flag = name.replace("_", "-")
    if scalar is not None and grid is not None:
        raise UsageError(f"--{flag} und --{flag}-grid gleichzeitig",
                         f"Entweder --{flag} oder --{flag}-grid angeben, nicht beides.")
    if grid is not None:
        return parse_grid(grid)
    if scalar is not None:
        return [scalar]
    if required:
        raise UsageError(f"--{flag} fehlt", f"--{flag} oder --{flag}-grid ist erforderlich.")
    return []

def _single(args: argparse.Namespace, name: str) -> float:
    values = _values(args, name)
    if len(values) != 1:
        flag = name.replace("_", "-")
        raise UsageError(f"--{flag} muss ein Einzelwert sein", f"Hier ist nur ein Wert für --{flag} erlaubt.")
    return values[0]

def _sweep_var(args: argparse.Namespace, candidates: List[str]) -> str:
    """Die eine Variable, über die gesweept wird (Gitter-Flag oder erste Kandidatin)."""
    gridded = [name for name in candidates if getattr(args, f"{name}_grid", None) is not None]
    if len(gridded) > 1:
        raise UsageError(f"Mehrere Gitter: {gridded}", "Pro Aufruf darf nur über eine Größe gesweept werden.")
    return gridded[0] if gridded else candidates[0]

def _options(args: argparse.Namespace):
    from optimizer import OptimizerOptions

    return OptimizerOptions.from_config(seed=args.seed, starts=args.starts, max_iters=args.max_iters)

def _parse_dist(text: str):
    from probability import Distribution

    try:
        probs = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"Ungültige Verteilung {text!r}", "--dist erwartet kommagetrennte Zahlen, z.B. 0.1,0.9.")
    return Distribution(probs)

def mim_rows(args: argparse.Namespace) -> List[SweepRecord]:
    from mim import mim, mim_second_order
    from probability import Distribution

    if args.dist is not None and args.p is not None:
        raise UsageError("--dist und --p gleichzeitig", "Entweder --dist oder --p angeben.")
    if args.dist is not None:
        d = _parse_dist(args.dist)
    elif args.p is not None:
        d = Distribution.bernoulli(args.p)
    else:
        raise UsageError("Keine Verteilung", "--dist oder --p ist erforderlich.")

    records = []
    for varpi in _values(args, "varpi"):
        w = ImportanceParam(varpi)
        records.append(SweepRecord("varpi", varpi, {
            "mim": mim(d, w),
            "mim_second_order": mim_second_order(d, w),
            "region_one": bool(w.region_one(d)),
        }))
    return records

def milc_rows(args: argparse.Namespace) -> List[SweepRecord]:
    from capacity import family_channel, loss_curve, milc_closed_form, milc_numeric

    family = args.family
    k = args.k
    if family == "ksym" and k is None:
        raise UsageError("--k fehlt", "Für --family ksym ist --k erforderlich.")

    if args.p_grid is not None:
        beta, varpi = _single(args, "beta"), _single(args, "varpi")
        ch = family_channel(family, beta, k)
        return [
            SweepRecord("p", p, {"loss": loss, "family": family, "varpi": varpi, "beta": beta})
            for p, loss in loss_curve(ch, ImportanceParam(varpi), parse_grid(args.p_grid))
        ]

    sweep = _sweep_var(args, ["beta", "varpi"])
    fixed = "varpi" if sweep == "beta" else "beta"
    fixed_value = _single(args, fixed)
    opts = _options(args) if args.numeric else None

    records = []
    for value in _values(args, sweep):
        params = {sweep: value, fixed: fixed_value}
        w = ImportanceParam(params["varpi"])
        result = milc_closed_form(family, w, params["beta"], k)
        columns = {
            "capacity": result.capacity,
            fixed: fixed_value,
            "family": family,
            "k": int(k) if k is not None else None,
            "method": result.method,
        }
        if args.numeric:
            numeric = milc_numeric(family_channel(family, params["beta"], k), w, opts)
            columns["capacity_numeric"] = numeric.capacity
            columns["converged"] = bool(numeric.converged)
        records.append(SweepRecord(sweep, value, columns))
    return records

def midf_rows(args: argparse.Namespace) -> List[SweepRecord]:
    from distortion import (DistortionSpec, alpha_star, midf_bernoulli_hamming, midf_numeric,
                            shannon_rd_bernoulli)
    from handlers import DomainError
    from probability import Distribution

    if args.p is None:
        raise UsageError("--p fehlt", "--p ist für midf erforderlich.")
    p = args.p
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} nicht in (0, 1)", "p muss strikt zwischen 0 und 1 liegen.")
    w = ImportanceParam(_single(args, "varpi"))
    opts = _options(args) if args.numeric else None

    records = []
    for D in _values(args, "d"):
        columns = {"rate": None, "alpha_star": None, "q00": None, "q01": None, "q10": None, "q11": None,
                   "method": None, "feasible": False}
        try:
            result = midf_bernoulli_hamming(p, w, D)
        except DomainError as e:
            log.info(f"D={D} außerhalb des Definitionsbereichs: {e}")
            result = None

        if result is not None:
            q = result.argmin_channel.matrix
            columns.update({
                "rate": result.rate,
                "alpha_star": alpha_star(p, D) if D < 0.5 else None,
                "q00": float(q[0, 0]), "q01": float(q[0, 1]),
                "q10": float(q[1, 0]), "q11": float(q[1, 1]),
                "method": result.method,
                "feasible": True,
            })
        if args.shannon:
            columns["shannon_rate"] = shannon_rd_bernoulli(p, D) if result is not None else None
        if args.numeric:
            numeric = None
            if result is not None:
                numeric = midf_numeric(Distribution.bernoulli(p), DistortionSpec.hamming(2), D, w, opts)
            columns["rate_numeric"] = numeric.rate if numeric else None
            columns["converged"] = bool(numeric.converged) if numeric else None
        columns.update({"p": p, "varpi": w.varpi})
        records.append(SweepRecord("d", D, columns))
    return records

def maxrate_rows(args: argparse.Namespace) -> List[SweepRecord]:
    from capacity import family_channel
    from constrained_rate import max_rate, max_rate_numeric

    family = args.family
    if family not in ("bsc", "bec"):
        raise UsageError(f"Familie {family} für maxrate", "maxrate unterstützt nur --family bsc oder bec.")
    beta = _single(args, "beta")
    w = ImportanceParam(_single(args, "varpi"))
    opts = _options(args) if args.numeric else None

    records = []
    for eps in _values(args, "eps"):
        result = max_rate(family, w, beta, eps)
        columns = {
            "rate": result.rate,
            "regime": result.regime,
            "p_opt": result.optimal_p,
            "p_approx": result.p_approx,
            "approx_fallback": bool(result.approx_fallback),
            "family": family,
            "varpi": w.varpi,
            "beta": beta,
        }
        if args.numeric:
            numeric = max_rate_numeric(family_channel(family, beta), w, eps, opts)
            columns["rate_numeric"] = numeric.rate
            columns["converged"] = bool(numeric.converged)
        records.append(SweepRecord("eps", eps, columns))
    return records

def verify_report(args: argparse.Namespace):
    from verification import run_suite

    return run_suite(args.suite, _options(args))

class MimCli:
    """Argparse-Oberfläche; jedes Subcommand ist an einen Handler gebunden."""

    def __init__(self):
        self.parser = self._build_parser()
        self.commands = {}
        self._register_commands()

    def _register_commands(self) -> None:
        """Registriert alle Subcommand-Handler."""
        self.commands["mim"] = SweepCommand("mim", mim_rows)
        self.commands["milc"] = SweepCommand("milc", milc_rows)
        self.commands["midf"] = SweepCommand("midf", midf_rows)
        self.commands["maxrate"] = SweepCommand("maxrate", maxrate_rows)
        self.commands["verify"] = VerifyCommand("verify", verify_report)

    def _build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--format", choices=FORMATS, default="csv")
        common.add_argument("--precision", type=int, default=config.PRECISION,
                            help="signifikante Stellen der Ausgabe")
        common.add_argument("--seed", type=int, default=None)
        common.add_argument("--starts", type=int, default=None)
        common.add_argument("--max-iters", dest="max_iters", type=int, default=None)
        common.add_argument("--output", default=None, help="Datei statt stdout")

        parser = argparse.ArgumentParser(
            prog="mimkit",
            description="Message Importance Measure: MILC, R_ϖ(D) und maximale Rate unter Importance Loss.",
            epilog=get_help_text(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sub = parser.add_subparsers(dest="command", required=True)
        descriptions = dict(COMMANDS)

        p = sub.add_parser("mim", parents=[common], help=descriptions["mim"])
        p.add_argument("--dist", default=None, help="Verteilung als 0.1,0.2,0.7")
        p.add_argument("--p", type=float, default=None, help="Bernoulli-Parameter")
        self._add_swept(p, "varpi")

        p = sub.add_parser("milc", parents=[common], help=descriptions["milc"])
        p.add_argument("--family", choices=("bsc", "bec", "ksym"), required=True)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--p-grid", dest="p_grid", default=None, help="Verlustkurve über p statt MILC")
        p.add_argument("--numeric", action="store_true", help="zusätzliche Spalte des numerischen Optimierers")
        self._add_swept(p, "varpi")
        self._add_swept(p, "beta")

        p = sub.add_parser("midf", parents=[common], help=descriptions["midf"])
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--shannon", action="store_true", help="Shannon-R(D) als Vergleichsspalte")
        p.add_argument("--numeric", action="store_true")
        self._add_swept(p, "varpi")
        self._add_swept(p, "d")

        p = sub.add_parser("maxrate", parents=[common], help=descriptions["maxrate"])
        p.add_argument("--family", choices=("bsc", "bec"), required=True)
        p.add_argument("--numeric", action="store_true")
        self._add_swept(p, "varpi")
        self._add_swept(p, "beta")
        self._add_swept(p, "eps")

        p = sub.add_parser("verify", parents=[common], help=descriptions["verify"])
        p.add_argument("--suite", choices=("golden", "milc", "rd", "rate", "all"), default="golden")

        return parser

    @staticmethod
    def _add_swept(p: argparse.ArgumentParser, name: str) -> None:
        p.add_argument(f"--{name}", type=float, default=None)
        p.add_argument(f"--{name}-grid", dest=f"{name}_grid", default=None, metavar="START:STOP:STEP")

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        if not 1 <= args.precision <= 17:
            print("Fehler: --precision muss zwischen 1 und 17 liegen.", file=sys.stderr)
            return 2
        log.debug(f"Command {args.command} mit {vars(args)}")
        return self.commands[args.command].handle(args)

def main(argv: Optional[List[str]] = None) -> int:
    """Haupteinstiegspunkt."""
    logging.basicConfig(level=getattr(logging, config.LOG_LEVEL, logging.INFO))
    try:
        config.validate()
    except ValueError as e:
        log.error(f"Ungültige Konfiguration: {e}")
        print(f"Fehler: {e}", file=sys.stderr)
        return 2
    return MimCli().run(argv)

if __name__ == "__main__":
    raise SystemExit(main())
