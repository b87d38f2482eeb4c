"""Quench dynamics by spectral decomposition: survival probability with its
correlation hole, time-dependent entanglement entropy and imbalance, and
the analytic dip-ramp-plateau curve.

Time evolution is exact up to eigensolve accuracy: an initial Fock state
|k> has eigenbasis coefficients c_m = V[k, m], and

    S_P(t) = |sum_m |c_m|^2 exp(-i E_m t)|^2 .

Observable traces reconstruct |Psi(t)> in the Fock basis per grid time via
matrix products against the eigenvector matrix, batched over the whole
initial-state ensemble.  The long-time average of S_P equals the inverse
participation ratio IPR = sum_m |c_m|^4; the correlation hole is the dip
below that plateau at intermediate times, with depth |1/S_Pmin - 1/IPR|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import FockBasis
from .diagnostics import (
    NORM_ATOL,
    NotNormalizedError,
    entropy_from_distributions,
    imbalance_diagonal,
    occupation_distributions,
)
from .rmt import b2_form_factor
from .spectrum import DegenerateSpectrumError, SpectralData

__all__ = [
    "TimeGrid",
    "log_time_grid",
    "linear_time_grid",
    "QuenchTrace",
    "SurvivalAnalysis",
    "AnalyticCurveInputs",
    "MissingEigenvectorsError",
    "WindowEmptyError",
    "DEFAULT_SMOOTHING_WINDOW",
    "DEFAULT_HOLE_WINDOW",
    "evolve_amplitudes",
    "ensemble_amplitudes",
    "ensemble_ipr",
    "survival_probability",
    "moving_average",
    "survival_trace",
    "fock_amplitudes_at",
    "observable_trace",
    "correlation_hole_depth",
    "estimate_curve_inputs",
    "ldos_fourier_survival",
    "analytic_survival_curve",
    "write_trace_csv",
]

DEFAULT_SMOOTHING_WINDOW = 9
DEFAULT_HOLE_WINDOW = (20.0, 1.0e3)
RELAXATION_TAIL_POINTS = 10


class MissingEigenvectorsError(ValueError):
    pass


class WindowEmptyError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing times, in units of the inverse hopping."""

    points: np.ndarray
    kind: str = "logarithmic"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("time grid needs at least two points")
        if pts[0] < 0 or (np.diff(pts) <= 0).any():
            raise ValueError("times must be non-negative and strictly increasing")
        if self.kind not in ("logarithmic", "linear"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size


def log_time_grid(t_min: float = 0.1, t_max: float = 1.0e4,
                  n_points: int = 400) -> TimeGrid:
    if t_min <= 0:
        raise ValueError("logarithmic grids need t_min > 0")
    return TimeGrid(np.geomspace(t_min, t_max, n_points), "logarithmic")


def linear_time_grid(t_min: float, t_max: float, n_points: int) -> TimeGrid:
    return TimeGrid(np.linspace(t_min, t_max, n_points), "linear")


# -- amplitudes ------------------------------------------------------------


def evolve_amplitudes(initial, spectral: SpectralData) -> np.ndarray:
    """Eigenbasis coefficients c_m of a Fock initial state."""
    if not spectral.has_vectors:
        raise MissingEigenvectorsError("evolution requires eigenvectors")
    k = spectral.basis.rank(initial)
    return spectral.eigenvectors[k, :].copy()


def ensemble_amplitudes(indices, spectral: SpectralData) -> np.ndarray:
    """Coefficient rows, one per ensemble state (shape n_states x dim)."""
    if not spectral.has_vectors:
        raise MissingEigenvectorsError("evolution requires eigenvectors")
    idx = np.asarray(indices, dtype=np.int64)
    return spectral.eigenvectors[idx, :].copy()


def _weights(coefficients) -> np.ndarray:
    c = np.atleast_2d(np.asarray(coefficients))
    w = np.abs(c) ** 2
    if (np.abs(w.sum(axis=1) - 1.0) > NORM_ATOL).any():
        raise NotNormalizedError("coefficient rows must be normalized")
    return w


def ensemble_ipr(coefficients) -> float:
    """Ensemble mean of sum_m |c_m|^4, the survival-probability plateau."""
    w = _weights(coefficients)
    return float((w ** 2).sum(axis=1).mean())


def survival_probability(coefficients, eigenvalues, times) -> np.ndarray:
    """S_P on a time grid; rows of ``coefficients`` are initial states.

    Returns shape (n_times,) for a single coefficient vector, otherwise
    (n_states, n_times).
    """
    w = _weights(coefficients)
    t = times.points if isinstance(times, TimeGrid) else np.asarray(times)
    phase = np.asarray(eigenvalues)[:, None] * t[None, :]
    re = w @ np.cos(phase)
    im = w @ np.sin(phase)
    sp = re ** 2 + im ** 2
    if np.ndim(coefficients) == 1:
        return sp[0]
    return sp


def moving_average(series, window_points: int) -> np.ndarray:
    """Centered moving mean; windows shrink at the boundaries (no padding)."""
    if window_points < 1 or window_points % 2 == 0:
        raise ValueError("window_points must be odd and >= 1")
    x = np.asarray(series, dtype=np.float64)
    if window_points == 1:
        return x.copy()
    kernel = np.ones(window_points)
    sums = np.convolve(x, kernel, mode="same")
    counts = np.convolve(np.ones_like(x), kernel, mode="same")
    return sums / counts


@dataclass
class QuenchTrace:
    """Sampled observable values for an ensemble of initial states.

    ``relaxation_value`` is the mean of the last 10 smoothed grid points.
    """

    time_grid: TimeGrid
    values: np.ndarray          # (n_states, n_times)
    ensemble_mean: np.ndarray
    smoothed_mean: np.ndarray
    relaxation_value: float
    observable: str
    smoothing_window: int

    @classmethod
    def from_values(cls, time_grid: TimeGrid, values: np.ndarray,
                    observable: str,
                    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
                    ) -> "QuenchTrace":
        values = np.atleast_2d(values)
        mean = values.mean(axis=0)
        smooth = moving_average(mean, smoothing_window)
        tail = min(RELAXATION_TAIL_POINTS, smooth.size)
        return cls(
            time_grid=time_grid,
            values=values,
            ensemble_mean=mean,
            smoothed_mean=smooth,
            relaxation_value=float(smooth[-tail:].mean()),
            observable=observable,
            smoothing_window=smoothing_window,
        )


def survival_trace(coefficients, eigenvalues, time_grid: TimeGrid,
                   smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
                   ) -> QuenchTrace:
    sp = survival_probability(np.atleast_2d(coefficients), eigenvalues, time_grid)
    return QuenchTrace.from_values(time_grid, sp, "survival", smoothing_window)


def fock_amplitudes_at(coefficients, spectral: SpectralData,
                       time: float) -> np.ndarray:
    """Complex Fock-basis amplitudes of evolved states at one time (rows)."""
    if not spectral.has_vectors:
        raise MissingEigenvectorsError("evolution requires eigenvectors")
    c = np.atleast_2d(np.asarray(coefficients, dtype=np.float64))
    phase = spectral.eigenvalues * time
    a_re = c * np.cos(phase)
    a_im = c * (-np.sin(phase))
    vt = spectral.eigenvectors.T
    return (a_re @ vt) + 1j * (a_im @ vt)


def observable_trace(ensemble_indices, spectral: SpectralData,
                     time_grid: TimeGrid, observable: str,
                     smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
                     ) -> QuenchTrace:
    """Site-averaged entanglement entropy or half-chain imbalance in time.

    Both observables are diagonal in the occupation basis, so only the
    Fock-basis probabilities |<k|Psi(t)>|^2 of the evolved states enter.
    """
    if observable not in ("entropy", "imbalance"):
        raise ValueError(f"unknown observable {observable!r}")
    if not spectral.has_vectors:
        raise MissingEigenvectorsError("evolution requires eigenvectors")
    basis = spectral.basis
    coeff = ensemble_amplitudes(ensemble_indices, spectral)
    n_states = coeff.shape[0]
    energies = spectral.eigenvalues
    vt = spectral.eigenvectors.T
    imb_diag = imbalance_diagonal(basis) if observable == "imbalance" else None
    times = time_grid.points
    values = np.empty((n_states, times.size))
    for ti, t in enumerate(times):
        phase = energies * t
        psi_re = (coeff * np.cos(phase)) @ vt
        psi_im = (coeff * np.sin(phase)) @ vt
        probs = psi_re ** 2 + psi_im ** 2
        if observable == "imbalance":
            values[:, ti] = probs @ imb_diag
        else:
            dist = occupation_distributions(probs, basis)
            values[:, ti] = entropy_from_distributions(dist).mean(axis=-1)
    return QuenchTrace.from_values(time_grid, values, observable, smoothing_window)


# -- correlation hole ------------------------------------------------------


@dataclass(frozen=True)
class SurvivalAnalysis:
    """Correlation-hole summary of an ensemble survival-probability trace."""

    ipr: float
    sp_min: float            # minimum of the smoothed ensemble mean in the window
    sp_min_raw: float        # same from the unsmoothed mean, for reference
    hole_depth: float        # |1/sp_min - 1/ipr|
    hole_window: tuple[float, float]


def correlation_hole_depth(trace: QuenchTrace, ipr: float,
                           search_window: tuple[float, float] = DEFAULT_HOLE_WINDOW
                           ) -> SurvivalAnalysis:
    """Depth of the dip below the plateau, measured on inverse quantities."""
    lo, hi = search_window
    mask = (trace.time_grid.points >= lo) & (trace.time_grid.points <= hi)
    if not mask.any():
        raise WindowEmptyError(
            f"no grid times inside the hole search window [{lo}, {hi}]"
        )
    sp_min = float(trace.smoothed_mean[mask].min())
    sp_min_raw = float(trace.ensemble_mean[mask].min())
    depth = abs(1.0 / sp_min - 1.0 / ipr)
    return SurvivalAnalysis(
        ipr=float(ipr),
        sp_min=sp_min,
        sp_min_raw=sp_min_raw,
        hole_depth=depth,
        hole_window=(float(lo), float(hi)),
    )


# -- analytic dip-ramp-plateau curve ----------------------------------------


@dataclass
class AnalyticCurveInputs:
    """Smoothed densities and scalars entering the analytic survival curve.

    ``ldos`` is the smoothed local density of states on ``energy_grid``
    (normalized to unit integral), ``mean_dos`` the mean density of states
    where the state weight lives, ``eta`` the effective number of levels
    and ``ipr`` the ensemble plateau.
    """

    energy_grid: np.ndarray
    ldos: np.ndarray
    mean_dos: float
    eta: float
    ipr: float

    def __post_init__(self):
        grid = np.asarray(self.energy_grid, dtype=np.float64)
        rho = np.asarray(self.ldos, dtype=np.float64)
        if grid.shape != rho.shape or grid.ndim != 1:
            raise ValueError("energy_grid and ldos must be matching 1-D arrays")
        norm = np.trapezoid(rho, grid)
        if norm <= 0:
            raise ValueError("ldos must have positive integral")
        self.ldos = rho / norm
        self.energy_grid = grid
        if self.mean_dos <= 0:
            raise ValueError("mean_dos must be positive")
        if self.eta <= 1.0:
            raise ValueError(f"eta must exceed 1, got {self.eta}")
        if not 0.0 < self.ipr <= 1.0:
            raise ValueError(f"ipr must lie in (0, 1], got {self.ipr}")


def _gaussian_kde(grid: np.ndarray, centers: np.ndarray,
                  weights: np.ndarray, bandwidth: float,
                  chunk: int = 512) -> np.ndarray:
    out = np.zeros_like(grid)
    norm = 1.0 / (np.sqrt(2.0 * np.pi) * bandwidth)
    for a in range(0, centers.size, chunk):
        b = min(a + chunk, centers.size)
        z = (grid[:, None] - centers[None, a:b]) / bandwidth
        out += (np.exp(-0.5 * z ** 2) @ weights[a:b])
    return out * norm


def estimate_curve_inputs(coefficients, eigenvalues, *,
                          grid_points: int = 2048,
                          ldos_bandwidth: float | None = None,
                          dos_bandwidth: float | None = None) -> AnalyticCurveInputs:
    """Kernel-smoothed densities and scalars from ensemble coefficients.

    Bandwidths default to a Silverman-style rule on the (weighted) sample,
    floored at twice the mean level spacing around the weight center so the
    smoothed densities do not resolve individual levels.
    """
    w_rows = _weights(coefficients)
    weights = w_rows.mean(axis=0)
    ipr = float((w_rows ** 2).sum(axis=1).mean())
    energies = np.asarray(eigenvalues, dtype=np.float64)
    span = energies.max() - energies.min()
    if span <= 0:
        raise DegenerateSpectrumError("spectrum has zero width")

    w_mean = float(weights @ energies)
    w_sd = float(np.sqrt(max(weights @ energies ** 2 - w_mean ** 2, 0.0)))
    central = energies[np.abs(energies - w_mean) <= 2.0 * max(w_sd, 1e-12 * span)]
    if central.size < 2:
        central = energies
    floor = 2.0 * (central.max() - central.min()) / max(central.size - 1, 1)
    floor = max(floor, 1e-12 * span)

    if ldos_bandwidth is None:
        n_eff = 1.0 / (weights ** 2).sum()
        ldos_bandwidth = max(0.9 * w_sd * n_eff ** (-0.2), floor)
    if dos_bandwidth is None:
        dos_bandwidth = max(0.9 * energies.std() * energies.size ** (-0.2), floor)

    pad = 4.0 * max(ldos_bandwidth, dos_bandwidth)
    grid = np.linspace(energies.min() - pad, energies.max() + pad, grid_points)
    rho = _gaussian_kde(grid, energies, weights, ldos_bandwidth)
    level_weights = np.full(energies.size, 1.0)
    dos = _gaussian_kde(grid, energies, level_weights, dos_bandwidth)
    dos = np.maximum(dos, 1e-300)

    rho_norm = np.trapezoid(rho, grid)
    rho = rho / rho_norm
    eta = float(1.0 / np.trapezoid(rho ** 2 / dos, grid))
    mean_dos = float(np.trapezoid(rho * dos, grid))
    return AnalyticCurveInputs(grid, rho, mean_dos, eta, ipr)


def ldos_fourier_survival(inputs: AnalyticCurveInputs, times) -> np.ndarray:
    """|integral rho(E) exp(-i E t) dE|^2 by trapezoid quadrature."""
    t = times.points if isinstance(times, TimeGrid) else np.asarray(times)
    grid = inputs.energy_grid
    quad = np.empty_like(grid)
    quad[1:-1] = 0.5 * (grid[2:] - grid[:-2])
    quad[0] = 0.5 * (grid[1] - grid[0])
    quad[-1] = 0.5 * (grid[-1] - grid[-2])
    rho_w = inputs.ldos * quad
    rho_w = rho_w / rho_w.sum()  # exact unit mass so the curve starts at 1
    amp = np.exp(-1j * t[:, None] * grid[None, :]) @ rho_w
    return np.abs(amp) ** 2


def analytic_survival_curve(inputs: AnalyticCurveInputs, times) -> np.ndarray:
    """Dip-ramp-plateau prediction for the ensemble survival probability:

        (1 - IPR)/(eta - 1) [eta S_bc(t) - b2(t / (2 pi nu))] + IPR

    with S_bc the squared Fourier transform of the smoothed LDOS and b2 the
    GOE two-level form factor.  Equals 1 at t = 0 and IPR as t -> infinity.
    """
    t = times.points if isinstance(times, TimeGrid) else np.asarray(times)
    spbc = ldos_fourier_survival(inputs, t)
    tau = t / (2.0 * np.pi * inputs.mean_dos)
    prefactor = (1.0 - inputs.ipr) / (inputs.eta - 1.0)
    return prefactor * (inputs.eta * spbc - b2_form_factor(tau)) + inputs.ipr


def write_trace_csv(path, trace: QuenchTrace,
                    metadata: dict | None = None) -> None:
    """CSV with columns (time, raw_mean, smoothed_mean)."""
    with open(path, "w") as fh:
        for key, val in (metadata or {}).items():
            fh.write(f"# {key}={val}\n")
        fh.write("time,raw_mean,smoothed_mean\n")
        for t, raw, smooth in zip(trace.time_grid.points, trace.ensemble_mean,
                                  trace.smoothed_mean):
            fh.write(f"{t!r},{raw!r},{smooth!r}\n")
