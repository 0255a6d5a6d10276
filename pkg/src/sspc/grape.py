"""Gradient ascent pulse engineering for piecewise-constant spin controls.

Gate fidelity is ``|Tr(W^dag U)|**2 / d**2``. Its gradient with respect to
every slot amplitude is exact: each slot propagator is differentiated through
the eigendecomposition of the slot Hamiltonian, so there is no step-size
error in the derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .channels import unitarity_residual
from .errors import InvalidArgument
from .spin import (
    TWO_PI_NS_MHZ,
    PulseSchedule,
    SpinSystemSpec,
    control_operators,
    drift_hamiltonian,
)

DEGENERATE_GAP = 1e-9  # MHz


@dataclass(frozen=True)
class GrapeOptions:
    n_slots: int = 600
    dt: float = 10.0  # ns
    max_iter: int = 500
    tol: float = 0.99  # target fidelity
    b1_max: float | None = None  # T; defaults to the spec's bound
    modulated: bool = False
    seed: int = 0
    init_scale: float = 1e-3  # fraction of b1_max for the random start; 0 starts from zero
    method: str = "lbfgsb"  # or "ascent"

    def __post_init__(self):
        if self.n_slots < 1 or self.dt <= 0 or self.max_iter < 0:
            raise InvalidArgument("n_slots and dt must be positive and max_iter non-negative")
        if not 0 < self.tol <= 1:
            raise InvalidArgument("target fidelity must lie in (0, 1]")
        if self.method not in ("lbfgsb", "ascent"):
            raise InvalidArgument(f"unknown optimiser {self.method!r}")


@dataclass
class GrapeResult:
    schedule: PulseSchedule
    fidelity: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)  # best-so-far fidelity per iteration


class GateProblem:
    """Fidelity of a fixed drift plus modulated controls against a target gate."""

    def __init__(self, target, drift, operators, modulation, dt):
        self.target = np.asarray(target, dtype=np.complex128)
        self.drift = np.asarray(drift, dtype=np.complex128)
        self.ops = np.stack([np.asarray(o, dtype=np.complex128) for o in operators])
        self.modulation = np.asarray(modulation, dtype=np.float64)
        self.dt = float(dt)
        d = self.target.shape[0]
        if self.target.shape != (d, d) or self.drift.shape != (d, d) or self.ops.shape[1:] != (d, d):
            raise InvalidArgument("target, drift and controls must share one square dimension")
        if self.modulation.shape[0] != self.ops.shape[0]:
            raise InvalidArgument("modulation needs one row per control")
        self.dim = d
        self.theta = TWO_PI_NS_MHZ * self.dt

    def _slots(self, amps):
        hams = self.drift[None] + np.einsum("kj,kab->jab", amps * self.modulation, self.ops)
        lam, vecs = np.linalg.eigh(hams)
        phase = np.exp(-1j * self.theta * lam)
        props = np.einsum("jam,jm,jbm->jab", vecs, phase, vecs.conj())
        return lam, vecs, phase, props

    def propagator(self, amps) -> np.ndarray:
        return kernels.prefix_products(self._slots(amps)[3])[-1]

    def fidelity(self, amps) -> float:
        tr = np.trace(self.target.conj().T @ self.propagator(amps))
        return float(abs(tr) ** 2 / self.dim**2)

    def fidelity_and_gradient(self, amps):
        amps = np.asarray(amps, dtype=np.float64)
        lam, vecs, phase, props = self._slots(amps)
        d = self.dim
        prefix = kernels.prefix_products(props)
        suffix = kernels.suffix_products(props)
        tr = np.trace(self.target.conj().T @ prefix[-1])

        eye = np.eye(d, dtype=np.complex128)[None]
        left = np.concatenate([eye, prefix[:-1]])  # U_{j-1} ... U_0
        right = np.concatenate([suffix[1:], eye])  # U_{n-1} ... U_{j+1}
        env = left @ self.target.conj().T[None] @ right
        env_eig = np.conj(np.swapaxes(vecs, 1, 2)) @ env @ vecs

        # divided differences of exp(-i theta lambda)
        gap = lam[:, :, None] - lam[:, None, :]
        diff = phase[:, :, None] - phase[:, None, :]
        degenerate = np.abs(gap) < DEGENERATE_GAP
        g = np.where(
            degenerate,
            -1j * self.theta * phase[:, :, None],
            diff / np.where(degenerate, 1.0, gap),
        )
        weight = np.swapaxes(env_eig, 1, 2) * g
        ops_eig = np.einsum("jam,kab,jbn->jkmn", vecs.conj(), self.ops, vecs)
        dtr = np.einsum("jmn,jkmn->kj", weight, ops_eig) * self.modulation
        grad = 2 * np.real(np.conj(tr) * dtr) / d**2
        return float(abs(tr) ** 2 / d**2), grad


def finite_difference_gradient(problem: GateProblem, amps, step: float = 1e-7, probes=None):
    """Central differences at ``probes`` (list of (control, slot)); all entries if None."""
    amps = np.asarray(amps, dtype=np.float64)
    if probes is None:
        probes = [(k, j) for k in range(amps.shape[0]) for j in range(amps.shape[1])]
    out = []
    for k, j in probes:
        up, down = amps.copy(), amps.copy()
        up[k, j] += step
        down[k, j] -= step
        out.append((problem.fidelity(up) - problem.fidelity(down)) / (2 * step))
    return np.array(out)


def build_problem(target, spec: SpinSystemSpec, opts: GrapeOptions, carriers=None):
    controls = control_operators(spec, opts.modulated, carriers)
    t = (np.arange(opts.n_slots) + 0.5) * opts.dt
    modulation = np.ones((len(controls), opts.n_slots))
    for k, c in enumerate(controls):
        if c.carrier is not None:
            modulation[k] = np.cos(TWO_PI_NS_MHZ * c.carrier * t)
    problem = GateProblem(target, drift_hamiltonian(spec), [c.operator for c in controls], modulation, opts.dt)
    return problem, controls


def _ascent(objective, x0, max_iter, target, record):
    """Projected gradient ascent on the unit box with backtracking."""
    x = x0.copy()
    f, g = objective(x)
    record(f)
    step = 1.0 / max(np.max(np.abs(g)), 1e-12)
    it = 0
    while it < max_iter and f < target:
        it += 1
        accepted = False
        for _ in range(40):
            trial = np.clip(x + step * g, -1.0, 1.0)
            f_new, g_new = objective(trial)
            if f_new > f:
                x, f, g = trial, f_new, g_new
                step *= 1.5
                accepted = True
                break
            step *= 0.5
        record(f)
        if not accepted:
            break
    return x, it


def grape_optimize(target, spec: SpinSystemSpec, opts: GrapeOptions | None = None, carriers=None) -> GrapeResult:
    """Search for a control schedule that realises ``target`` on the spin system."""
    opts = opts or GrapeOptions()
    target = np.asarray(target, dtype=np.complex128)
    if target.shape != (8, 8):
        raise InvalidArgument(f"target must be 8x8, got {target.shape}")
    if unitarity_residual(target) > 1e-10:
        raise InvalidArgument("target is not unitary")
    bound = spec.b1_max if opts.b1_max is None else opts.b1_max
    if bound <= 0:
        raise InvalidArgument("control bound must be positive")
    problem, controls = build_problem(target, spec, opts, carriers)
    shape = (len(controls), opts.n_slots)

    rng = np.random.default_rng(opts.seed)
    x0 = opts.init_scale * rng.uniform(-1.0, 1.0, size=shape)

    best = {"f": -np.inf, "x": x0.copy()}
    history: list[float] = []

    def objective(x):
        x = np.asarray(x).reshape(shape)
        f, g = problem.fidelity_and_gradient(bound * x)
        if f > best["f"]:
            best["f"], best["x"] = f, x.copy()
        return f, g * bound

    def record(_f):
        history.append(best["f"])

    if opts.method == "ascent":
        _, iterations = _ascent(objective, x0, opts.max_iter, opts.tol, record)
    else:
        objective(x0)
        record(None)
        iterations = 0

        def neg(x):
            f, g = objective(x)
            return -f, -g.reshape(-1)

        def callback(intermediate_result):
            nonlocal iterations
            iterations += 1
            record(None)
            if best["f"] >= opts.tol:
                raise StopIteration

        if best["f"] < opts.tol and opts.max_iter > 0:
            minimize(
                neg, x0.reshape(-1), jac=True, method="L-BFGS-B",
                bounds=[(-1.0, 1.0)] * x0.size, callback=callback,
                options={"maxiter": opts.max_iter, "ftol": 1e-15, "gtol": 1e-12, "maxcor": 20},
            )

    carriers_out = tuple(c.carrier for c in controls) if opts.modulated else None
    schedule = PulseSchedule(opts.dt, np.clip(bound * best["x"], -bound, bound), carriers_out, bound)
    fid = problem.fidelity(schedule.amplitudes)
    return GrapeResult(schedule, fid, iterations, fid >= opts.tol, history)
