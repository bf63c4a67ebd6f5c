"""Exact damped Jaynes-Cummings populations for a Lorentzian bath.

All quantities are in units of the Markovian decay rate ``gamma``; times are
``gamma * t``.  The excited-state amplitude ``G(t)`` obeys

    dG/dt = -int_0^t f(t - s) G(s) ds,   f(tau) = (gamma*lam/2) exp(-(lam - i*delta) tau)

which, with the auxiliary ``B(t) = int_0^t exp(-(lam - i delta)(t - s)) G(s) ds``,
is the linear system ``G' = -(gamma lam / 2) B``, ``B' = G - (lam - i delta) B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elt import PopulationSeries, Source


@dataclass(frozen=True)
class JCParams:
    lam: float
    delta: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @classmethod
    def strong(cls):
        return cls(lam=0.2)

    @classmethod
    def detuned(cls):
        return cls(lam=0.3, delta=2.4)

    @property
    def k(self) -> complex:
        return complex(self.lam, -self.delta)


REGIMES = {"strong": JCParams.strong, "detuned": JCParams.detuned}


def spectral_density(p: JCParams, x):
    """Lorentzian ``J`` at bath-frequency offset ``x = omega - omega0``."""
    x = np.asarray(x, dtype=float)
    return p.gamma * p.lam ** 2 / (2 * np.pi * ((p.delta + x) ** 2 + p.lam ** 2))


def memory_kernel(p: JCParams, tau):
    tau = np.asarray(tau, dtype=float)
    return 0.5 * p.gamma * p.lam * np.exp(-p.k * tau)


def amplitude_ode(p: JCParams, grid, steps=10_000):
    """``G`` on ``grid`` from RK4 on the two-component system.

    ``steps`` is the step count over ``[0, 10]``; each grid interval gets a
    proportional number of substeps (at least one).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) < 0) or grid[0] < 0:
        raise ValueError("grid must be a nondecreasing 1-D array of times >= 0")
    h_target = 10.0 / steps
    c = 0.5 * p.gamma * p.lam
    k = p.k

    def f(y):
        G, B = y
        return np.array([-c * B, G - k * B])

    y = np.array([1.0 + 0j, 0.0 + 0j])
    t = 0.0
    out = np.empty(grid.size, dtype=np.complex128)
    for idx, target in enumerate(grid):
        span = target - t
        n = max(1, int(np.ceil(span / h_target - 1e-9))) if span > 0 else 0
        if n:
            h = span / n
            for _ in range(n):
                k1 = f(y)
                k2 = f(y + 0.5 * h * k1)
                k3 = f(y + 0.5 * h * k2)
                k4 = f(y + h * k3)
                y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t = target
        out[idx] = y[0]
    return out


def amplitude_closed_form(p: JCParams, grid):
    """``G(t) = exp(-k t/2) [cosh(d t/2) + (k/d) sinh(d t/2)]``, ``d = sqrt(k^2 - 2 gamma lam)``."""
    t = np.asarray(grid, dtype=float)
    k = p.k
    d = np.sqrt(k * k - 2 * p.gamma * p.lam + 0j)
    if abs(d) < 1e-12:
        return np.exp(-k * t / 2) * (1 + k * t / 2)
    return np.exp(-k * t / 2) * (np.cosh(d * t / 2) + (k / d) * np.sinh(d * t / 2))


def exact_populations(p: JCParams, grid, rho11_0=1.0, steps=10_000) -> PopulationSeries:
    """Excited and ground populations ``|G|^2 rho11_0`` and ``1 - |G|^2 rho11_0``."""
    if not 0.0 <= rho11_0 <= 1.0:
        raise ValueError("rho11_0 must lie in [0, 1]")
    grid = np.asarray(grid, dtype=float)
    excited = np.abs(amplitude_ode(p, grid, steps)) ** 2 * rho11_0
    return PopulationSeries(grid, 1.0 - excited, excited, Source.exact())


def markovian_populations(grid, rho11_0) -> PopulationSeries:
    """Closed-form amplitude-damping populations ``rho11(t) = rho11_0 exp(-gamma t)``."""
    grid = np.asarray(grid, dtype=float)
    excited = rho11_0 * np.exp(-grid)
    return PopulationSeries(grid, 1.0 - excited, excited, Source.exact())
