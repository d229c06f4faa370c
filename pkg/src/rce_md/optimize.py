"""BFGS with backtracking (Armijo) line search.

Objectives may return ``inf`` outside their domain; the line search then
shrinks the step until the trial point is feasible again.
"""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class BFGSResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    converged: bool
    message: str
    trace: list = field(default_factory=list)


def minimize_bfgs(fun_and_grad, x0, converged, max_iters=500, shrink=0.5, c1=1e-4,
                  max_backtracks=60):
    """Minimize a smooth function.

    Parameters
    ----------
    fun_and_grad : callable
        ``x -> (f, g)``; must return ``f = inf`` (``g`` ignored) when ``x``
        is infeasible.
    x0 : ndarray
        Feasible starting point.
    converged : callable
        ``(x, f, g) -> bool`` stopping test, evaluated at every accepted iterate.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun_and_grad(x)
    if not np.isfinite(f):
        raise ValueError("starting point is infeasible")
    n = x.size
    H = np.eye(n)
    trace = [f]
    first = True
    for it in range(max_iters):
        if converged(x, f, g):
            return BFGSResult(x, f, g, it, True, "converged", trace)
        p = -H @ g
        slope = float(g @ p)
        if slope >= 0:
            # lost descent; restart from steepest descent
            H = np.eye(n)
            p, slope = -g, -float(g @ g)
        t = 1.0
        # relaxed Armijo: near the optimum f differences sink into rounding noise
        noise = 1e-14 * max(1.0, abs(f))
        for _ in range(max_backtracks):
            xn = x + t * p
            fn, gn = fun_and_grad(xn)
            if np.isfinite(fn) and fn <= f + c1 * t * slope + noise:
                break
            t *= shrink
        else:
            return BFGSResult(x, f, g, it, False, "line search failed", trace)
        s = xn - x
        y = gn - g
        sy = float(s @ y)
        if sy > 1e-300:
            if first:
                H = np.eye(n) * (sy / float(y @ y))
                first = False
            rho = 1.0 / sy
            Hy = H @ y
            H = H - rho * (np.outer(s, Hy) + np.outer(Hy, s)) + (rho * rho * float(y @ Hy) + rho) * np.outer(s, s)
        x, f, g = xn, fn, gn
        trace.append(f)
    done = converged(x, f, g)
    return BFGSResult(x, f, g, max_iters, done, "converged" if done else "max iterations", trace)
