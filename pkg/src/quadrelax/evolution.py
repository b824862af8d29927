"""Multiexponential evolution of density-matrix elements and magnetization synthesis.

Element trajectories follow the per-order mode sum

    rho_{q+n, n}(t) = rho_eq_{q+n, n} + sum_p w_bar[n, p] exp(-R_p t) amp_p,
    amp_p           = sum_n w[p, n] (rho - rho_eq)_{q+n, n}(0),

i.e. the deviation from the supplied equilibrium is decomposed into modes,
each decaying at its own rate, and the equilibrium is added back.  For
coherence orders q >= 1 a diagonal equilibrium contributes nothing and the
deviation equals the raw elements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import DecayCurve
from .phys_params import QuadrupolarConstant, SpectralDensities
from .redfield_core import BlockEigensystem, assemble_block, numeric_eigensystem
from .spin_algebra import SpinSystem, make_quadrupole_operators, make_spin_operators

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class DensityState:
    """8x8 Hermitian density matrix in the Zeeman basis (descending m).

    Element (q, n) of coherence order q sits at matrix[q + n, n] for
    n = 0..7-q (zero-based; the adjoint element is its conjugate).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > _HERM_TOL * scale:
            raise ValueError("density matrix is not Hermitian within 1e-12")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_unit_trace(self, tol: float = _HERM_TOL) -> bool:
        return abs(self.trace - 1.0) <= tol

    def coherence_vector(self, q: int) -> np.ndarray:
        """Elements rho_{q+n, n} for n = 0..dim-1-q."""
        d = self.dim
        if not 0 <= q < d:
            raise ValueError(f"coherence order q={q} outside 0..{d - 1}")
        return np.array([self.matrix[q + n, n] for n in range(d - q)])

    def element(self, row: int, col: int) -> complex:
        """Entry by one-based (row, column) index, matching the usual display."""
        return complex(self.matrix[row - 1, col - 1])

    # -- common preparations -------------------------------------------------
    @classmethod
    def pure_top(cls, dim: int = 8) -> "DensityState":
        m = np.zeros((dim, dim), dtype=complex)
        m[0, 0] = 1.0
        return cls(m)

    @classmethod
    def uniform(cls, dim: int = 8) -> "DensityState":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def noon(cls, dim: int = 8) -> "DensityState":
        """Equal superposition of the extreme Zeeman states: corner populations
        and the two highest-order coherences at 0.5."""
        m = np.zeros((dim, dim), dtype=complex)
        m[0, 0] = m[-1, -1] = m[0, -1] = m[-1, 0] = 0.5
        return cls(m)


@dataclass(frozen=True)
class ModeAmplitudes:
    """Initial mode coordinates of one coherence order (length 8 - q)."""

    q: int
    values: np.ndarray


@dataclass(frozen=True)
class MagnetizationModel:
    """Mode description of a normalized magnetization decay signal.

    signal(t) = scale * (equilibrium_term + sum_n amplitudes[n] exp(-rates[n] t))

    scale is the data-normalization factor, prep_efficiency the pulse
    efficiency absorbed into the amplitudes at construction.  The
    longitudinal flavour has 8 modes, one with zero rate; the transverse
    flavour has 7 and no equilibrium term.
    """

    scale: float
    prep_efficiency: float
    amplitudes: np.ndarray
    equilibrium_term: float
    rates: np.ndarray

    def evaluate(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        decay = np.exp(-np.outer(times, self.rates)) @ self.amplitudes
        return self.scale * (self.equilibrium_term + decay)


def initial_mode_amplitudes(q: int, w: np.ndarray, rho0: DensityState) -> ModeAmplitudes:
    """amp = w . (elements of rho0 at order q); w is the forward transformation."""
    vec = rho0.coherence_vector(q)
    if w.shape[1] != vec.size:
        raise ValueError(f"transformation is {w.shape} but order {q} has {vec.size} elements")
    return ModeAmplitudes(q=q, values=w @ vec)


def evolve_block(eigensystem: BlockEigensystem, rho0: DensityState, rho_eq: DensityState,
                 t: float) -> np.ndarray:
    """Element values rho_{q+n, n}(t) of one coherence order."""
    if t < 0:
        raise ValueError(f"elapsed time must be non-negative, got {t}")
    q = eigensystem.q
    eq_vec = rho_eq.coherence_vector(q)
    dev = rho0.coherence_vector(q) - eq_vec
    amps = eigensystem.w @ dev
    return eq_vec + eigensystem.w_bar @ (np.exp(-eigensystem.rates * t) * amps)


def all_eigensystems(j: SpectralDensities, c: QuadrupolarConstant,
                     two_i: int = 7) -> dict[int, BlockEigensystem]:
    """Numeric eigensystems for every coherence order 0..two_i."""
    quads = make_quadrupole_operators(SpinSystem(two_i))
    return {q: numeric_eigensystem(assemble_block(q, quads, j), c) for q in range(two_i + 1)}


def propagate(rho0: DensityState, rho_eq: DensityState, j: SpectralDensities,
              c: QuadrupolarConstant, times) -> list[DensityState]:
    """Full density-matrix trajectory over sorted times.

    Orders q = 0..7 are evolved independently; elements above the diagonal are
    filled by Hermitian conjugation (the negative-order blocks are identical
    real matrices, so this loses nothing).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending")
    d = rho0.dim
    systems = all_eigensystems(j, c, two_i=d - 1)
    states = []
    for t in times:
        m = np.zeros((d, d), dtype=complex)
        for q in range(d):
            vals = evolve_block(systems[q], rho0, rho_eq, float(t))
            for n, v in enumerate(vals):
                m[q + n, n] = v
                if q > 0:
                    m[n, q + n] = np.conj(v)
        states.append(DensityState(m))
    return states


# -- magnetization models ----------------------------------------------------

def _mode_amplitudes_for_observable(eigensystem: BlockEigensystem, weights: np.ndarray,
                                    dev: np.ndarray) -> np.ndarray:
    """Per-mode amplitude A_n = (w dev)_n * sum_k weights_k w_bar[k, n]."""
    return (eigensystem.w @ dev) * (weights @ eigensystem.w_bar)


def build_longitudinal_model(eigensystem: BlockEigensystem, scale: float,
                             prep_efficiency: float,
                             equilibrium_deviation: np.ndarray | None = None) -> MagnetizationModel:
    """Longitudinal (<Iz>) model from the q = 0 eigensystem.

    The preparation is the inverted equilibrium, -prep_efficiency * Iz, and the
    default equilibrium deviation is +Iz (both in the traceless high-temperature
    convention; the overall polarization sits in ``scale``).
    """
    if eigensystem.q != 0:
        raise ValueError("longitudinal model requires the q=0 eigensystem")
    d = eigensystem.dim
    iz = np.diag(make_spin_operators(d - 1).iz).real
    eq = iz if equilibrium_deviation is None else np.diag(np.asarray(equilibrium_deviation)).real
    dev = -prep_efficiency * iz - eq
    amps = _mode_amplitudes_for_observable(eigensystem, iz, dev)
    return MagnetizationModel(scale=scale, prep_efficiency=prep_efficiency,
                              amplitudes=amps, equilibrium_term=float(iz @ eq),
                              rates=eigensystem.rates)


def build_transverse_model(eigensystem: BlockEigensystem, scale: float,
                           prep_efficiency: float) -> MagnetizationModel:
    """Transverse (<Ix>) model from the q = 1 eigensystem; preparation is
    prep_efficiency * Ix and there is no equilibrium term."""
    if eigensystem.q != 1:
        raise ValueError("transverse model requires the q=1 eigensystem")
    d = eigensystem.dim + 1
    ix = make_spin_operators(d - 1).ix.real
    prep = np.array([prep_efficiency * ix[n + 1, n] for n in range(d - 1)])
    weights = np.array([2 * ix[k, k + 1] for k in range(d - 1)])
    amps = _mode_amplitudes_for_observable(eigensystem, weights, prep)
    return MagnetizationModel(scale=scale, prep_efficiency=prep_efficiency,
                              amplitudes=amps, equilibrium_term=0.0,
                              rates=eigensystem.rates)


def longitudinal_signal(model: MagnetizationModel, times) -> DecayCurve:
    times = np.asarray(times, dtype=float)
    return DecayCurve(times, model.evaluate(times))


def transverse_signal(model: MagnetizationModel, times) -> DecayCurve:
    times = np.asarray(times, dtype=float)
    return DecayCurve(times, model.evaluate(times))
