"""Electron plus two nuclear spins: Hamiltonians, piecewise-constant propagation, spectra.

Units: Hamiltonians in MHz (ordinary frequency), times in ns, evolution
``exp(-i 2 pi H t)``. Spin operators are half the Pauli matrices and the
tensor order is ``electron ⊗ nucleus1 ⊗ nucleus2``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import kernels
from .errors import InvalidArgument

TWO_PI_NS_MHZ = 2e-3 * np.pi  # 2 pi * (1 MHz * 1 ns)
SECULAR_RATIO = 3.0
PEAK_SIGMAS = 5.0

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128) / 2
_SP = np.array([[0, 1], [0, 0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def spin_op(single: np.ndarray, site: int) -> np.ndarray:
    factors = [_I2, _I2, _I2]
    factors[site] = single
    return reduce(np.kron, factors)


S = {axis: spin_op(m, 0) for axis, m in zip("xyz", (_SX, _SY, _SZ))}
I1 = {axis: spin_op(m, 1) for axis, m in zip("xyz", (_SX, _SY, _SZ))}
I2 = {axis: spin_op(m, 2) for axis, m in zip("xyz", (_SX, _SY, _SZ))}
RAISING = tuple(spin_op(_SP, site) for site in range(3))


@dataclass(frozen=True)
class SpinSystemSpec:
    """``gamma_e`` in GHz/T, ``gamma_n`` in MHz/T, fields in T, couplings in MHz."""

    gamma_e: float
    gamma_n: float
    b0: float
    a1: float
    a2: float
    b1_max: float

    def __post_init__(self):
        vals = (self.gamma_e, self.gamma_n, self.b0, self.a1, self.a2, self.b1_max)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidArgument("spin spec has non-finite entries")
        if self.b0 <= 0 or self.b1_max <= 0:
            raise InvalidArgument("b0 and b1_max must be positive")
        if abs(self.electron_zeeman) < SECULAR_RATIO * max(abs(self.a1), abs(self.a2)):
            warnings.warn("electron Zeeman splitting is not large compared with the hyperfine "
                          "couplings", RuntimeWarning, stacklevel=3)

    @property
    def gamma_e_mhz(self) -> float:
        return 1e3 * self.gamma_e

    @property
    def electron_zeeman(self) -> float:
        """Electron Zeeman splitting in MHz (taken positive)."""
        return abs(self.gamma_e_mhz) * self.b0

    @property
    def nuclear_zeeman(self) -> float:
        return self.gamma_n * self.b0

    @property
    def combination_line(self) -> float:
        return self.a1 + self.a2 + self.nuclear_zeeman

    @classmethod
    def desk(cls) -> SpinSystemSpec:
        """Scaled system whose fastest precession is tens of MHz."""
        return cls(gamma_e=-0.02797, gamma_n=1.723, b0=1.33, a1=9.5, a2=0.9, b1_max=0.1)

    @classmethod
    def lab(cls) -> SpinSystemSpec:
        """Laboratory-scale parameters (needs ~10 ps slots)."""
        return cls(gamma_e=-27.97, gamma_n=17.23, b0=1.33, a1=95.0, a2=9.0, b1_max=0.04)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("gamma_e", "gamma_n", "b0", "a1", "a2", "b1_max")}


def _dot(a: dict, b: dict) -> np.ndarray:
    return sum(a[k] @ b[k] for k in "xyz")


def drift_hamiltonian(spec: SpinSystemSpec) -> np.ndarray:
    """Lab-frame drift with isotropic hyperfine couplings (MHz)."""
    h = (
        -spec.electron_zeeman * S["z"]
        - spec.nuclear_zeeman * (I1["z"] + I2["z"])
        + spec.a1 * _dot(S, I1)
        + spec.a2 * _dot(S, I2)
    )
    return 0.5 * (h + h.conj().T)


def ising_hamiltonian(spec: SpinSystemSpec) -> np.ndarray:
    """Drift with the hyperfine terms truncated to ``S_z I_z``; diagonal."""
    return (
        -spec.electron_zeeman * S["z"]
        - spec.nuclear_zeeman * (I1["z"] + I2["z"])
        + spec.a1 * S["z"] @ I1["z"]
        + spec.a2 * S["z"] @ I2["z"]
    )


@dataclass(frozen=True)
class Control:
    operator: np.ndarray
    carrier: float | None = None  # MHz
    name: str = ""


def control_operators(spec: SpinSystemSpec, modulated: bool = False, carriers=None) -> list[Control]:
    """Control Hamiltonians per tesla of applied field (MHz/T).

    Unmodulated: independent x and y fields on the electron and on both
    nuclei. Modulated: one y-directed field coupling to all spins, driven at
    each carrier frequency (defaults to the single-flip lines of the drift).
    """
    ge, gn = spec.gamma_e_mhz, spec.gamma_n
    nuc = {k: I1[k] + I2[k] for k in "xyz"}
    if not modulated:
        return [
            Control(ge * S["x"], None, "electron_x"),
            Control(ge * S["y"], None, "electron_y"),
            Control(gn * nuc["x"], None, "nuclear_x"),
            Control(gn * nuc["y"], None, "nuclear_y"),
        ]
    if carriers is None:
        lines = transition_frequencies(drift_hamiltonian(spec))
        carriers = sorted({round(t.frequency, 9) for t in lines if t.single_flip})
    op = ge * S["y"] + gn * nuc["y"]
    return [Control(op, float(f), f"y@{f:.6g}MHz") for f in carriers]


@dataclass(frozen=True)
class Transition:
    levels: tuple[int, int]
    frequency: float
    strength: float
    single_flip: bool


def transition_frequencies(h: np.ndarray, threshold: float = 0.25) -> list[Transition]:
    """Every eigenvalue gap, tagged by overlap with single-spin raising operators."""
    h = np.asarray(h, dtype=np.complex128)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise InvalidArgument("Hamiltonian is not Hermitian")
    lam, vecs = np.linalg.eigh(h)
    overlaps = np.max([np.abs(vecs.conj().T @ r @ vecs) for r in RAISING], axis=0)
    strength = np.maximum(overlaps, overlaps.T)
    out = []
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            s = float(strength[i, j])
            out.append(Transition((i, j), float(lam[j] - lam[i]), s, s >= threshold))
    out.sort(key=lambda t: (t.frequency, t.levels))
    return out


@dataclass(frozen=True)
class PulseSchedule:
    """Piecewise-constant field amplitudes (T), shape ``(n_controls, n_slots)``."""

    dt: float
    amplitudes: np.ndarray
    carriers: tuple | None = None
    b1_max: float | None = None

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.float64)
        if amp.ndim == 1:
            amp = amp[None, :]
        if amp.ndim != 2 or amp.shape[1] < 1:
            raise InvalidArgument(f"amplitudes must be (n_controls, n_slots), got {amp.shape}")
        if not np.all(np.isfinite(amp)):
            raise InvalidArgument("non-finite amplitude")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgument(f"slot length must be positive, got {self.dt!r}")
        if self.b1_max is not None and np.max(np.abs(amp)) > self.b1_max * (1 + 1e-12):
            raise InvalidArgument(f"amplitude {np.max(np.abs(amp)):.4g} exceeds bound {self.b1_max}")
        if self.carriers is not None:
            car = tuple(None if c is None else float(c) for c in self.carriers)
            if len(car) != amp.shape[0]:
                raise InvalidArgument("need one carrier entry per control")
            object.__setattr__(self, "carriers", car)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_controls(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_slots(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def total_time(self) -> float:
        return self.n_slots * self.dt

    @property
    def times(self) -> np.ndarray:
        """Slot midpoints (ns)."""
        return (np.arange(self.n_slots) + 0.5) * self.dt

    def modulation(self) -> np.ndarray:
        """Per-slot carrier factor ``cos(2 pi f t)``; ones for unmodulated controls."""
        out = np.ones_like(self.amplitudes)
        if self.carriers is not None:
            for k, f in enumerate(self.carriers):
                if f is not None:
                    out[k] = np.cos(TWO_PI_NS_MHZ * f * self.times)
        return out

    def field(self) -> np.ndarray:
        """Applied field per control and slot (envelope times carrier)."""
        return self.amplitudes * self.modulation()

    def split(self, at: int) -> tuple[PulseSchedule, PulseSchedule]:
        """Two schedules covering slots ``[0, at)`` and ``[at, n)``; carriers keep absolute time.

        Only valid for unmodulated schedules or for checking composition on the
        sampled fields, since carrier phase depends on absolute time.
        """
        if not 0 < at < self.n_slots:
            raise InvalidArgument("split point out of range")
        f = self.field()
        return (
            PulseSchedule(self.dt, f[:, :at], None, None),
            PulseSchedule(self.dt, f[:, at:], None, None),
        )


def _operators(controls) -> list[np.ndarray]:
    return [c.operator if isinstance(c, Control) else np.asarray(c, dtype=np.complex128) for c in controls]


def slot_hamiltonians(drift: np.ndarray, controls, schedule: PulseSchedule) -> np.ndarray:
    ops = np.stack(_operators(controls))
    if ops.shape[0] != schedule.n_controls:
        raise InvalidArgument(f"{ops.shape[0]} control operators for {schedule.n_controls} amplitude rows")
    field = schedule.field()
    return drift[None] + np.einsum("kj,kab->jab", field, ops)


def slot_eigensystem(hams: np.ndarray):
    lam, vecs = np.linalg.eigh(hams)
    return lam, vecs


def slot_propagators(hams: np.ndarray, dt: float, eig=None) -> np.ndarray:
    lam, vecs = slot_eigensystem(hams) if eig is None else eig
    phase = np.exp(-1j * TWO_PI_NS_MHZ * dt * lam)
    return np.einsum("jam,jm,jbm->jab", vecs, phase, vecs.conj())


def propagate(drift: np.ndarray, controls, schedule: PulseSchedule) -> np.ndarray:
    """Total propagator, later slots multiplied on the left."""
    drift = np.asarray(drift, dtype=np.complex128)
    hams = slot_hamiltonians(drift, controls, schedule)
    return kernels.prefix_products(slot_propagators(hams, schedule.dt))[-1]


def evolve(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i 2 pi H t)`` for a constant Hamiltonian (MHz) over ``t`` ns."""
    lam, vecs = np.linalg.eigh(np.asarray(h, dtype=np.complex128))
    return (vecs * np.exp(-1j * TWO_PI_NS_MHZ * t * lam)) @ vecs.conj().T


@dataclass
class Spectrum:
    frequencies: np.ndarray  # MHz
    magnitude: np.ndarray
    peaks: list  # (frequency, magnitude)
    resolution: float  # MHz


def spectrum_of(samples: np.ndarray, dt: float, sigmas: float = PEAK_SIGMAS) -> Spectrum:
    """One-sided DFT magnitude of real samples taken every ``dt`` ns.

    The DC bin is dropped. Peaks are local maxima (the first bin of a flat
    top) above ``mean + sigmas * std`` of the remaining magnitudes.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 16:
        raise InvalidArgument("need at least 16 samples for a spectrum")
    mag = np.abs(np.fft.rfft(x))[1:]
    freqs = np.fft.rfftfreq(x.size, d=dt)[1:] * 1e3
    threshold = mag.mean() + sigmas * mag.std()
    padded = np.concatenate([[-np.inf], mag, [-np.inf]])
    is_max = (mag > padded[:-2]) & (mag >= padded[2:]) & (mag > threshold)
    peaks = [(float(freqs[i]), float(mag[i])) for i in np.flatnonzero(is_max)]
    return Spectrum(freqs, mag, peaks, 1e3 / (x.size * dt))


def pulse_spectrum(schedule: PulseSchedule, control: int | None = None) -> Spectrum:
    """Spectrum of one control's applied field, or of their sum if ``control`` is None."""
    field = schedule.field()
    samples = field.sum(axis=0) if control is None else field[control]
    return spectrum_of(samples, schedule.dt)
