"""Pseudospectral reference solver for KdV on the circle and the Airy
(linear) flow, with conserved-quantity monitors and the isospectrality
oracle.

PDE states live on R/Z with modes e^{2 pi i k x}; the spectral modules use
R/2Z with modes e^{i pi k x}, so PDE mode k corresponds to spectral even mode
2k with the same coefficient value.  potential_to_pde_state /
pde_state_to_potential own that bridge.

Equation: u_t = -u_xxx + 6 u u_x.  The linear symbol on mode k is
i (2 pi k)^3; it is handled exactly by an integrating factor, and the
nonlinearity 3 (u^2)_x is evaluated pseudospectrally with 2/3-rule
de-aliasing, stepped with classical RK4.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .operator import Potential


class InstabilityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PDEState:
    """Fourier coefficients u_hat[k], |k| <= K, stored with u_hat[i] holding
    k = i - K; time t; real fields satisfy u_hat(-k) = conj(u_hat(k)) and
    KdV preserves the zero mean exactly."""
    u_hat: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u_hat, dtype=complex)
        if u.ndim != 1 or u.size % 2 == 0:
            raise ValueError("u_hat must be 1-D with odd length")
        object.__setattr__(self, "u_hat", u)

    @property
    def K(self):
        return (self.u_hat.size - 1) // 2

    def __getitem__(self, k):
        K = self.K
        if -K <= k <= K:
            return complex(self.u_hat[k + K])
        return 0j

    def ks(self):
        K = self.K
        return np.arange(-K, K + 1)

    def is_real_field(self, tol=1e-10):
        return bool(np.max(np.abs(self.u_hat - np.conj(self.u_hat[::-1]))) <= tol)

    @staticmethod
    def from_modes(pairs, K=None, t=0.0):
        pairs = [(int(k), complex(v)) for k, v in pairs]
        if K is None:
            K = max((abs(k) for k, _ in pairs), default=1)
        u = np.zeros(2 * K + 1, dtype=complex)
        for k, v in pairs:
            u[k + K] = v
        return PDEState(u, t=t)

    @staticmethod
    def cosine(a, k=1, K=32, t=0.0):
        """u(x) = a cos(2 pi k x)."""
        return PDEState.from_modes([(k, a / 2.0), (-k, a / 2.0)], K=K, t=t)


def potential_to_pde_state(q):
    """Spectral even mode 2k -> PDE mode k, identical coefficient."""
    n_max = q.half_range // 2
    K = max(n_max, 1)
    u = np.zeros(2 * K + 1, dtype=complex)
    for k in range(-n_max, n_max + 1):
        u[k + K] = q.coeff(2 * k)
    u[K] = 0.0
    return PDEState(u)


def pde_state_to_potential(u, s=0.0, weight=None):
    """PDE mode k -> spectral even mode 2k."""
    K = u.K
    pairs = [(k, u[k]) for k in range(-K, K + 1) if k != 0 and u[k] != 0]
    return Potential.from_even_pairs(pairs, n_max=K, s=s, weight=weight)


def _airy_symbol(ks):
    # u_t = -u_xxx  =>  d/dt u_hat(k) = i (2 pi k)^3 u_hat(k)
    return 1j * (2.0 * math.pi * ks) ** 3


def evolve_airy(u0, t):
    """Exact per-mode phases u_hat(k) -> e^{i (2 pi k)^3 t} u_hat(k)."""
    ks = u0.ks()
    u = u0.u_hat * np.exp(_airy_symbol(ks) * t)
    return PDEState(u, t=u0.t + t)


def default_dt(K, umax):
    """Accuracy-driven default step: the linear part is exact, so the
    constraint is the advective scale 6|u| * (2 pi K)."""
    speed = 6.0 * max(float(umax), 1e-12) * 2.0 * math.pi * max(K, 1)
    return min(1e-3, 0.2 / speed)


def _nonlinear(u_hat, ks, mask):
    """N(u_hat) for 6 u u_x = 3 (u^2)_x, de-aliased by the 2/3 rule."""
    v = np.where(mask, u_hat, 0.0)
    n = v.size
    grid = np.fft.ifft(np.fft.ifftshift(v)) * n
    w_hat = np.fft.fftshift(np.fft.fft(grid * grid)) / n
    out = 3.0 * (2j * math.pi * ks) * w_hat
    return np.where(mask, out, 0.0)


def evolve_kdv(u0, t_end, dt=None, blowup_factor=1e6):
    """Integrating-factor RK4 for u_t = -u_xxx + 6 u u_x, from u0.t to
    u0.t + t_end (t_end may be negative for backward evolution).

    The linear phase is applied exactly; the mean is preserved exactly (the
    k = 0 symbol and nonlinear derivative both vanish there).  Raises
    InstabilityError if the coefficient sup grows by more than blowup_factor.
    """
    if t_end == 0.0:
        return u0
    K = u0.K
    ks = u0.ks()
    if dt is None:
        n_grid = 2 * K + 1
        umax = float(np.max(np.abs(np.fft.ifft(np.fft.ifftshift(u0.u_hat))
                                   * n_grid)))
        dt = default_dt(K, umax)
    n_steps = max(1, int(math.ceil(abs(t_end) / dt - 1e-12)))
    h = t_end / n_steps
    L = _airy_symbol(ks)
    E = np.exp(L * h / 2.0)
    E2 = E * E
    cutoff = (2.0 * K) / 3.0
    mask = np.abs(ks) <= cutoff
    u = u0.u_hat.copy()
    sup0 = max(float(np.max(np.abs(u))), 1e-300)
    for _ in range(n_steps):
        k1 = _nonlinear(u, ks, mask)
        k2 = _nonlinear(E * (u + (h / 2.0) * k1), ks, mask)
        k3 = _nonlinear(E * u + (h / 2.0) * k2, ks, mask)
        k4 = _nonlinear(E2 * u + h * E * k3, ks, mask)
        u = E2 * u + (h / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)
        if np.max(np.abs(u)) > blowup_factor * sup0:
            raise InstabilityError("coefficient growth exceeded blow-up factor")
    return PDEState(u, t=u0.t + t_end)


def conserved(u):
    """(mean, L2, hamiltonian): mean = u_hat(0), L2 = sum |u_hat|^2 (equals
    the squared L^2([0,1]) norm by Parseval), H = int (1/2 u_x^2 + u^3) dx
    with the cubic term on an alias-free padded grid."""
    K = u.K
    ks = u.ks()
    mean = u[0]
    l2 = float(np.sum(np.abs(u.u_hat) ** 2))
    quad = 0.5 * float(np.sum((2.0 * math.pi * ks) ** 2 * np.abs(u.u_hat) ** 2))
    # cubic term: evaluate on >= 3K+1 points so u^3 has no aliasing
    n_grid = 4 * K + 5
    pad = np.zeros(n_grid, dtype=complex)
    for k in range(-K, K + 1):
        pad[k % n_grid] = u[k]
    grid = np.fft.ifft(pad) * n_grid
    cubic = float(np.mean(grid ** 3).real)
    ham = quad + cubic
    return mean, l2, ham


def isospectral_check(q0, t, K_spec, dt=None, K_pde=None):
    """Evolve q0 under KdV and compare the periodic/Dirichlet spectra at both
    endpoints.  The periodic spectrum (and the gap lengths) should drift only
    by integrator error; the Dirichlet eigenvalues genuinely move and are
    reported as expected-to-move.
    """
    from .galerkin import full_spectrum, gaps_and_midpoints
    state0 = potential_to_pde_state(q0)
    if K_pde is not None and K_pde > state0.K:
        pad = K_pde - state0.K
        state0 = PDEState(np.pad(state0.u_hat, (pad, pad)), t=state0.t)
    state1 = evolve_kdv(state0, t, dt=dt)
    q1 = pde_state_to_potential(state1, s=q0.s, weight=q0.weight)
    spec0 = full_spectrum(q0, K_spec)
    # keep the spectral truncation identical at both endpoints
    q1b = Potential(q1.seq.truncated(max(q1.half_range, q0.half_range)),
                    s=q0.s, weight=q0.weight)
    spec1 = full_spectrum(q1b, K_spec)
    trust = min(spec0.trust, spec1.trust)
    n = np.arange(1, trust + 1)
    lam_drift = np.maximum(
        np.abs(spec0.periodic[2 * n] - spec1.periodic[2 * n]),
        np.abs(spec0.periodic[2 * n - 1] - spec1.periodic[2 * n - 1]))
    g0, _, _ = gaps_and_midpoints(spec0)
    g1, _, _ = gaps_and_midpoints(spec1)
    m = min(g0.size, g1.size)
    gap_drift = np.abs(g0[:m] - g1[:m])
    mu_motion = np.abs(spec0.dirichlet[:trust] - spec1.dirichlet[:trust])
    c0 = conserved(state0)
    c1 = conserved(state1)
    return {
        "t": float(t),
        "trust": int(trust),
        "lambda_drift": lam_drift.real.tolist(),
        "max_lambda_drift": float(np.max(lam_drift.real, initial=0.0)),
        "gap_drift": gap_drift.real.tolist(),
        "max_gap_drift": float(np.max(gap_drift.real, initial=0.0)),
        "mu_motion_expected_to_move": mu_motion.real.tolist(),
        "hamiltonian_rel_drift": abs(c1[2] - c0[2]) / max(abs(c0[2]), 1e-300),
        "l2_rel_drift": abs(c1[1] - c0[1]) / max(abs(c0[1]), 1e-300),
        "final_state": state1,
    }
