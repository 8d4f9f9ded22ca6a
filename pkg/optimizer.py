"""
Numerische Optimierer über Wahrscheinlichkeitssimplizes.

- maximize_on_simplex: Multi-Start projizierter Gradientenaufstieg mit
  Finite-Differenzen-Gradienten, Backtracking und anschließendem Gitter-Polish.
- augmented_lagrangian: Penalty-Schema (×growth pro Runde) um eine SLSQP-Innenlösung,
  deren Schranken und Zeilensummen-Gleichungen die Iterierten auf dem Produkt von Simplizes halten.
"""
import logging
from dataclasses import dataclass, fields
from typing import Callable, List, Optional

import numpy as np
from scipy.optimize import minimize

from config import config
from handlers import DomainError

log = logging.getLogger("mimkit.optimizer")

Objective = Callable[[np.ndarray], float]

@dataclass(frozen=True)
class OptimizerOptions:
    """Einstellungen aller numerischen Solver; die Defaults kommen aus config."""
    max_iters: int = 10000
    starts: int = 8
    seed: int = 0
    tolerance: float = 1e-9
    fd_step: float = 1e-6
    penalty_rounds: int = 6
    penalty_growth: float = 10.0
    penalty_start: float = 10.0

    def __post_init__(self):
        if self.max_iters < 1 or self.starts < 1:
            raise DomainError("max_iters und starts müssen >= 1 sein")
        if self.tolerance <= 0 or self.fd_step <= 0:
            raise DomainError("tolerance und fd_step müssen positiv sein")
        if self.penalty_rounds < 1 or self.penalty_growth <= 1 or self.penalty_start <= 0:
            raise DomainError("Penalty-Schema ungültig")

    @classmethod
    def from_config(cls, **overrides) -> "OptimizerOptions":
        """Baut Optionen aus config; Overrides mit Wert None werden ignoriert."""
        values = config.optimizer_defaults()
        names = {f.name for f in fields(cls)}
        values.update({k: v for k, v in overrides.items() if v is not None and k in names})
        return cls(**values)

@dataclass(frozen=True)
class OptimumResult:
    x: np.ndarray
    value: float
    converged: bool
    iterations: int

def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euklidische Projektion jeder Zeile (letzte Achse) auf den Wahrscheinlichkeitssimplex."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    u = np.sort(v, axis=-1)[..., ::-1]
    css = np.cumsum(u, axis=-1) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    # letzter Index mit cond == True
    rho = n - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, np.expand_dims(rho, -1), axis=-1) / (np.expand_dims(rho, -1) + 1.0)
    return np.maximum(v - theta, 0.0)

def starting_points(size: int, opts: OptimizerOptions) -> List[np.ndarray]:
    """Startpunkte: Gleichverteilung, Ecken des Simplex, dann Dirichlet(1)-Zufallspunkte."""
    rng = np.random.default_rng(opts.seed)
    points = [np.full(size, 1.0 / size)]
    for i in range(size):
        if len(points) >= opts.starts:
            break
        vertex = np.zeros(size)
        vertex[i] = 1.0
        points.append(vertex)
    while len(points) < opts.starts:
        points.append(rng.dirichlet(np.ones(size)))
    return points

def fd_gradient(f: Objective, x: np.ndarray, h: float) -> np.ndarray:
    """Zentrale Differenzen; an der Simplexgrenze (x_i < h) einseitig nach innen."""
    grad = np.empty_like(x)
    fx = None
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        if x[i] >= h:
            grad[i] = (f(x + e) - f(x - e)) / (2.0 * h)
        else:
            if fx is None:
                fx = f(x)
            grad[i] = (f(x + e) - fx) / h
    return grad

def projected_gradient_ascent(f: Objective, x0: np.ndarray, opts: OptimizerOptions) -> OptimumResult:
    """Projizierter Gradientenaufstieg mit Armijo-Backtracking auf einem Simplex."""
    x = project_simplex(x0)
    fx = f(x)
    step = 1.0
    stalls = 0

    for it in range(1, opts.max_iters + 1):
        g = fd_gradient(f, x, opts.fd_step)
        if np.linalg.norm(project_simplex(x + g) - x) < opts.tolerance:
            return OptimumResult(x=x, value=fx, converged=True, iterations=it)

        step = min(step * 2.0, 1e3)
        while True:
            x_new = project_simplex(x + step * g)
            f_new = f(x_new)
            if f_new >= fx + 1e-4 * float(g @ (x_new - x)):
                break
            step *= 0.5
            if step < 1e-14:
                # keine Verbesserung mehr messbar
                return OptimumResult(x=x, value=fx, converged=True, iterations=it)

        if f_new - fx <= 1e-15 * max(1.0, abs(fx)):
            stalls += 1
            if stalls >= 5:
                return OptimumResult(x=x_new, value=f_new, converged=True, iterations=it)
        else:
            stalls = 0
        x, fx = x_new, f_new

    return OptimumResult(x=x, value=fx, converged=False, iterations=opts.max_iters)

def grid_polish(f: Objective, x: np.ndarray, fx: float,
                scales=(1e-3, 1e-4, 1e-5, 1e-6, 1e-7), max_sweeps: int = 50):
    """Verfeinert x durch paarweise Massenverschiebungen auf immer feineren Gittern."""
    x = x.copy()
    n = x.size
    for delta in scales:
        for _ in range(max_sweeps):
            improved = False
            for i in range(n):
                for j in range(n):
                    if i == j or x[i] <= 0.0:
                        continue
                    moved = min(delta, x[i])
                    candidate = x.copy()
                    candidate[i] -= moved
                    candidate[j] += moved
                    fc = f(candidate)
                    if fc > fx:
                        x, fx = candidate, fc
                        improved = True
            if not improved:
                break
    return x, fx

def maximize_on_simplex(f: Objective, size: int, opts: OptimizerOptions,
                        extra_starts: Optional[List[np.ndarray]] = None) -> OptimumResult:
    """Multi-Start-Maximierung von f über dem size-dimensionalen Simplex."""
    starts = starting_points(size, opts) + list(extra_starts or [])
    best: Optional[OptimumResult] = None

    for x0 in starts:
        run = projected_gradient_ascent(f, x0, opts)
        if best is None or run.value > best.value:
            best = run

    x, value = grid_polish(f, best.x, best.value)
    log.debug(f"{len(starts)} Starts, bester Wert {value:.12g} nach Polish (vorher {best.value:.12g})")
    if not best.converged:
        log.warning(f"Gradientenaufstieg nach {opts.max_iters} Iterationen nicht konvergiert")
    return OptimumResult(x=x, value=value, converged=best.converged, iterations=best.iterations)

def augmented_lagrangian(objective: Objective, constraint: Objective, x0: np.ndarray,
                         opts: OptimizerOptions, inequality: bool = False,
                         feasibility_tol: float = 1e-6) -> OptimumResult:
    """
    Minimiert objective(X) unter constraint(X) == 0 (bzw. <= 0 bei inequality),
    wobei jede Zeile von X (Form wie x0) auf dem Simplex liegt.
    """
    shape = x0.shape
    rows = shape[0] if len(shape) == 2 else 1
    z = project_simplex(np.asarray(x0, dtype=float)).ravel()
    lam = 0.0
    mu = opts.penalty_start

    def row_sums(v: np.ndarray) -> np.ndarray:
        return v.reshape(rows, -1).sum(axis=1) - 1.0

    simplex_constraint = {"type": "eq", "fun": row_sums}
    bounds = [(0.0, 1.0)] * z.size
    iterations = 0

    for _ in range(opts.penalty_rounds):
        def penalized(v: np.ndarray, lam=lam, mu=mu) -> float:
            X = v.reshape(shape)
            c = constraint(X)
            if inequality:
                return objective(X) + (max(0.0, lam + mu * c) ** 2 - lam ** 2) / (2.0 * mu)
            return objective(X) + lam * c + 0.5 * mu * c * c

        res = minimize(penalized, z, method="SLSQP", bounds=bounds,
                       constraints=[simplex_constraint],
                       options={"maxiter": min(opts.max_iters, 1000), "ftol": 1e-15})
        iterations += int(res.nit)
        z = project_simplex(np.clip(res.x, 0.0, 1.0).reshape(rows, -1)).ravel()

        c = constraint(z.reshape(shape))
        lam = max(0.0, lam + mu * c) if inequality else lam + mu * c
        mu *= opts.penalty_growth

    X = z.reshape(shape)
    violation = max(0.0, constraint(X)) if inequality else abs(constraint(X))
    converged = violation <= feasibility_tol
    if not converged:
        log.warning(f"Penalty-Verfahren: Restverletzung {violation:.3e} nach {opts.penalty_rounds} Runden")
    return OptimumResult(x=X, value=objective(X), converged=converged, iterations=iterations)
