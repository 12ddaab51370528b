"""Two-qubit tomography of a noisy teleportation resource.

Werner states are measured with the usual 16 product projectors, counts are
drawn from Poisson distributions, and the state is reconstructed by maximum
likelihood over physical density matrices.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, InfeasibleError
from .linkbudget import (LossFactors, OpticalTerminal, SourceSpec,
                         entangled_one_channel_rate, link_efficiency)
from .seeding import cell_rng

_S2 = 1.0 / math.sqrt(2.0)
KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_S2, _S2], dtype=complex),
    "A": np.array([_S2, -_S2], dtype=complex),
    "R": np.array([_S2, 1j * _S2], dtype=complex),
    "L": np.array([_S2, -1j * _S2], dtype=complex),
}
SETTINGS = ("HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
            "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL")


def _projector(setting: str) -> np.ndarray:
    ket = np.kron(KETS[setting[0]], KETS[setting[1]])
    return np.outer(ket, ket.conj())


PROJECTORS = np.array([_projector(s) for s in SETTINGS])
PHI_PLUS = np.array([_S2, 0.0, 0.0, _S2], dtype=complex)

_PAULI1 = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]),
           np.diag([1.0, -1.0])]
_PAULI2 = np.array([np.kron(a, b) for a in _PAULI1 for b in _PAULI1], dtype=complex)
# Tr(sigma_k Pi_s) / 4, rows indexed by setting
_LINEAR = np.real(np.einsum("kij,sji->sk", _PAULI2, PROJECTORS)) / 4.0


@dataclass(frozen=True)
class DensityMatrix4:
    elements: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.elements, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"expected a 4x4 matrix, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=1e-12, rtol=0):
            raise DomainError("density matrix must be Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise DomainError("density matrix must have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise DomainError("density matrix must be positive semidefinite")
        object.__setattr__(self, "elements", rho)

    @classmethod
    def from_unnormalized(cls, m: np.ndarray) -> "DensityMatrix4":
        m = 0.5 * (m + m.conj().T)
        return cls(m / np.trace(m).real)

    @classmethod
    def pure(cls, ket: np.ndarray) -> "DensityMatrix4":
        ket = np.asarray(ket, dtype=complex)
        return cls.from_unnormalized(np.outer(ket, ket.conj()))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.elements)


@dataclass(frozen=True)
class TomographyRun:
    counts: np.ndarray
    n_total: float
    settings: tuple = SETTINGS

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if len(self.settings) != 16 or counts.shape != (16,):
            raise DomainError("a run holds exactly 16 settings")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise DomainError("counts must be finite and non-negative")
        object.__setattr__(self, "counts", counts)


def werner_state(p: float) -> DensityMatrix4:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Werner parameter must lie in [0, 1], got {p}")
    bell = np.outer(PHI_PLUS, PHI_PLUS.conj())
    return DensityMatrix4(p * bell + (1.0 - p) * np.eye(4) / 4.0)


def state_fidelity(rho: DensityMatrix4, target: DensityMatrix4) -> float:
    """<psi|rho|psi> for a pure target."""
    t = target.elements
    if abs(np.trace(t @ t).real - 1.0) > 1e-9:
        raise DomainError("target state must be pure")
    return float(np.trace(rho.elements @ t).real)


def expectations(rho: DensityMatrix4) -> np.ndarray:
    return np.real(np.einsum("ij,sji->s", rho.elements, PROJECTORS))


def simulate_tomography(rho: DensityMatrix4, n_total: float, seed,
                        normalization: Literal["total", "per_setting"] = "total"
                        ) -> TomographyRun:
    """Poisson counts for the 16 settings.

    ``total``: expected counts over all settings sum to ``n_total``.
    ``per_setting``: each setting gets n_total/16 trials (equal dwell time),
    so fewer than ``n_total`` events are recorded.
    """
    if not n_total > 0:
        raise DomainError("expected number of events must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else cell_rng(seed)
    e = np.clip(expectations(rho), 0.0, None)
    if normalization == "per_setting":
        mu = n_total / 16.0 * e
    elif normalization == "total":
        mu = n_total * e / e.sum()
    else:
        raise DomainError(f"unknown normalization {normalization!r}")
    return TomographyRun(rng.poisson(mu), float(n_total))


def linear_inversion(counts: np.ndarray) -> np.ndarray:
    """Unconstrained Hermitian estimate, trace-normalized (may be unphysical)."""
    c, *_ = np.linalg.lstsq(_LINEAR, np.asarray(counts, dtype=float), rcond=None)
    m = np.einsum("k,kij->ij", c, _PAULI2) / 4.0
    tr = np.trace(m).real
    return m / tr if tr > 0 else np.eye(4, dtype=complex) / 4.0


def _nearest_positive(m: np.ndarray, floor: float = 0.01) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        w = np.ones(4)
    rho = (v * (w / w.sum())) @ v.conj().T
    # keep it full rank so the Cholesky factor exists
    return (1.0 - floor) * rho + floor * np.eye(4) / 4.0


_TRI = np.triu_indices(4)
_OFF = np.triu_indices(4, 1)


def _unpack(x: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    t[_TRI] = x[:10]
    t[_OFF] += 1j * x[10:]
    return t


def _pack(t: np.ndarray) -> np.ndarray:
    return np.concatenate([t[_TRI].real, t[_OFF].imag])


def _neg_loglik(x: np.ndarray, n: np.ndarray) -> tuple[float, np.ndarray]:
    # Poisson likelihood with the overall intensity profiled out; invariant to
    # the scale of T, so no explicit trace normalization is needed.
    t = _unpack(x)
    m = t.conj().T @ t
    p = np.maximum(np.real(np.einsum("ij,sji->s", m, PROJECTORS)), 1e-300)
    total = n.sum()
    psum = p.sum()
    used = n > 0
    f = np.sum(n[used] * np.log(p[used])) - total * math.log(psum)
    g_rho = (np.einsum("s,sij->ij", n / p, PROJECTORS)
             - total / psum * PROJECTORS.sum(axis=0))
    grad_t = 2.0 * (t @ g_rho)
    grad = np.concatenate([grad_t[_TRI].real, grad_t[_OFF].imag])
    return -f, -grad


@dataclass(frozen=True)
class MLEFit:
    state: DensityMatrix4
    log_likelihood: float
    iterations: int
    converged: bool


def mle_fit(run: TomographyRun, max_iter: int = 5000, tol: float = 1e-10) -> MLEFit:
    n = np.asarray(run.counts, dtype=float)
    if not n.sum() > 0:
        raise DomainError("cannot reconstruct from an empty run")
    rho0 = _nearest_positive(linear_inversion(n))
    x0 = _pack(np.linalg.cholesky(rho0).conj().T)
    f0, _ = _neg_loglik(x0, n)
    res = minimize(_neg_loglik, x0, args=(n,), jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "ftol": tol / max(1.0, abs(f0)),
                            "gtol": 1e-9})
    t = _unpack(res.x)
    state = DensityMatrix4.from_unnormalized(t.conj().T @ t)
    # a line-search stop at a flat optimum still counts as converged
    converged = bool(res.success or (res.nit < max_iter and "LNSRCH" in str(res.message)))
    return MLEFit(state, -float(res.fun), int(res.nit), converged)


def mle_reconstruct(run: TomographyRun) -> DensityMatrix4:
    return mle_fit(run).state


@dataclass(frozen=True)
class FidelityMap:
    p_values: np.ndarray
    n_values: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    max_iterations: np.ndarray = field(repr=False)
    all_converged: np.ndarray = field(repr=False)

    def long_table(self) -> dict:
        p, n = np.meshgrid(self.p_values, self.n_values, indexing="ij")
        return {"p": p.ravel(), "N": n.ravel(),
                "mean_fidelity": self.mean.ravel(), "stddev_fidelity": self.std.ravel()}


def fidelity_samples(p: float, n_total: float, reps: int, seed: int,
                     index: tuple = (), normalization: str = "total"
                     ) -> tuple[np.ndarray, int, bool]:
    """Fidelities of ``reps`` independent reconstructions for one map cell."""
    target = DensityMatrix4.pure(PHI_PLUS)
    rho = werner_state(p)
    out = np.empty(reps)
    iters, ok = 0, True
    for r in range(reps):
        run = simulate_tomography(rho, n_total, cell_rng(seed, *index, r), normalization)
        fit = mle_fit(run)
        out[r] = state_fidelity(fit.state, target)
        iters = max(iters, fit.iterations)
        ok = ok and fit.converged
    return out, iters, ok


def _cell(args):
    i, j, p, n, reps, seed, norm = args
    return fidelity_samples(p, n, reps, seed, (i, j), norm)


def fidelity_map(p_values: Sequence[float], n_values: Sequence[float], reps: int = 10,
                 seed: int = 0, workers: int = 1,
                 normalization: str = "total") -> FidelityMap:
    p_values = np.asarray(p_values, dtype=float)
    n_values = np.asarray(n_values, dtype=float)
    if p_values.size == 0 or n_values.size == 0 or reps < 1:
        raise DomainError("grids must be non-empty and reps >= 1")
    jobs = [(i, j, float(p), float(n), reps, seed, normalization)
            for i, p in enumerate(p_values) for j, n in enumerate(n_values)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_cell(job) for job in jobs]
    shape = (p_values.size, n_values.size)
    mean = np.array([r[0].mean() for r in results]).reshape(shape)
    std = np.array([r[0].std(ddof=1) if reps > 1 else 0.0 for r in results]).reshape(shape)
    iters = np.array([r[1] for r in results]).reshape(shape)
    conv = np.array([r[2] for r in results]).reshape(shape)
    return FidelityMap(p_values, n_values, mean, std, iters, conv)


@dataclass(frozen=True)
class TeleportRate:
    events_per_s: float

    def time_for_counts(self, n: float) -> float:
        if not self.events_per_s > 0:
            raise InfeasibleError("no events are delivered")
        return n / self.events_per_s


@dataclass(frozen=True)
class TeleportScenario:
    source: SourceSpec
    tx: OpticalTerminal
    rx: OpticalTerminal
    wavelength: float
    range_: float
    losses: LossFactors = LossFactors.from_db(10.0)


def teleport_scenario_rate(sc: TeleportScenario) -> TeleportRate:
    """One-channel event rate for the teleportation link."""
    eta = link_efficiency(sc.tx, sc.rx, sc.range_, sc.wavelength, sc.losses)
    return TeleportRate(entangled_one_channel_rate(sc.source, eta))


def noise_requirement(signal_rate: float, purity_target: float,
                      dt_r: Optional[float] = None) -> float:
    """Largest noise rate keeping noise:signal at (1 - P) / P.

    With ``dt_r`` the result is rejected when the noise would fill the
    detection window.
    """
    if not signal_rate >= 0:
        raise DomainError("signal rate must be non-negative")
    if not 0.0 < purity_target <= 1.0:
        raise DomainError("purity target must lie in (0, 1]")
    noise = signal_rate * (1.0 - purity_target) / purity_target
    if dt_r is not None:
        if not dt_r > 0:
            raise DomainError("detection window must be positive")
        if noise * dt_r >= 1.0:
            raise InfeasibleError("required noise budget saturates the detection window")
    return noise
