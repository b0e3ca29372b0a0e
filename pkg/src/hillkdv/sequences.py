"""Weighted sequence spaces on the Fourier side.

A FourierSeq is a doubly indexed coefficient vector f = (f_k), |k| <= K,
representing f(x) = sum_k f_k e_k(x) with e_k(x) = exp(i pi k x) on [0, 2].
Norms are the weighted Fourier Lebesgue norms

    ||f||_{w,s,p} = ( sum_k  w_k^p <k>^{sp} |f_k|^p )^{1/p},   <k> = 1 + |k|,

with the sup norm at p = infinity.  Weights come from the class of normalized,
symmetric, monotone, submultiplicative weights, stored as closed forms so that
arbitrarily large indices are well defined.
"""

from dataclasses import dataclass, field, replace
import json
import math

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve


class InvalidSequenceError(ValueError):
    pass


class WeightError(ValueError):
    pass


def bracket(n):
    """<n> = 1 + |n|, elementwise on arrays."""
    return 1.0 + np.abs(n)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """Closed-form weight w_n = min(<n>^exponent, e^{cap |n|}).

    exponent >= 0 gives the polynomial family, exponent == 0 the trivial
    weight; cap is None for uncapped weights.  All members are >= 1,
    symmetric and monotone in |n|; submultiplicativity is checked by
    sampling in check_weight / cap_weight.
    """
    exponent: float = 0.0
    cap: float | None = None

    def __post_init__(self):
        if self.exponent < 0:
            raise WeightError("polynomial weight exponent must be >= 0")
        if self.cap is not None and self.cap <= 0:
            raise WeightError("exponential cap must be > 0")

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        vals = bracket(n) ** self.exponent
        if self.cap is not None:
            vals = np.minimum(vals, np.exp(self.cap * np.abs(n)))
        if vals.ndim == 0:
            return float(vals)
        return vals

    @staticmethod
    def trivial():
        return Weight(0.0)

    @staticmethod
    def polynomial(a):
        return Weight(float(a))


def check_weight(w, radius=512, samples=2000, rng=None):
    """Sampled verification of the weight-class invariants.

    Checks w_n >= 1, symmetry, monotonicity in |n| and submultiplicativity
    w_{n+m} <= w_n w_m on random pairs with |n|, |m| <= radius.  Raises
    WeightError on the first violation.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    idx = np.arange(0, radius + 1)
    vals = w(idx)
    if np.any(vals < 1.0 - 1e-12):
        raise WeightError("weight takes values below 1")
    if np.any(np.abs(w(-idx) - vals) > 1e-12 * np.abs(vals)):
        raise WeightError("weight is not symmetric")
    if np.any(np.diff(vals) < -1e-12 * vals[:-1]):
        raise WeightError("weight is not monotone in |n|")
    n = rng.integers(-radius, radius + 1, size=samples)
    m = rng.integers(-radius, radius + 1, size=samples)
    lhs = w(n + m)
    rhs = w(n) * w(m)
    bad = lhs > rhs * (1.0 + 1e-10)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise WeightError(
            "submultiplicativity fails at n=%d, m=%d: w(n+m)=%g > %g"
            % (n[i], m[i], lhs[i], rhs[i]))
    return True


def cap_weight(w, eps):
    """Exponentially capped weight w^eps_n = min(w_n, e^{eps|n|}).

    The capped weight is validated by sampling; a violation raises
    WeightError.
    """
    if eps <= 0:
        raise WeightError("eps must be positive")
    new_cap = eps if w.cap is None else min(w.cap, eps)
    capped = replace(w, cap=new_cap)
    check_weight(capped)
    return capped


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierSeq:
    """Complex coefficients f_k for k in {-K..K}; coeffs[i] holds k = i - K.

    The coefficient array is treated as immutable.  Flags record structural
    properties: real (f_{-k} = conj(f_k)), zero_mean (f_0 = 0) and
    one_periodic (all odd-index coefficients vanish).
    """
    coeffs: np.ndarray
    real: bool = False
    zero_mean: bool = False
    one_periodic: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise InvalidSequenceError("coeffs must be 1-D with odd length")
        object.__setattr__(self, "coeffs", c)

    @property
    def half_range(self):
        return (self.coeffs.size - 1) // 2

    def index(self, k):
        return k + self.half_range

    def __getitem__(self, k):
        K = self.half_range
        if -K <= k <= K:
            return complex(self.coeffs[k + K])
        return 0j

    def ks(self):
        K = self.half_range
        return np.arange(-K, K + 1)

    def validate(self, tol=1e-12):
        K = self.half_range
        if self.zero_mean and self.coeffs[K] != 0:
            raise InvalidSequenceError("zero_mean set but f_0 != 0")
        if self.one_periodic:
            odd = self.coeffs[(self.ks() % 2) != 0]
            if np.any(odd != 0):
                raise InvalidSequenceError("one_periodic set but odd modes present")
        if self.real:
            if np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) > tol:
                raise InvalidSequenceError("real set but f_{-k} != conj(f_k)")
        return True

    def nonzero_ks(self):
        K = self.half_range
        return np.flatnonzero(self.coeffs) - K

    @staticmethod
    def zeros(K, **flags):
        return FourierSeq(np.zeros(2 * K + 1, dtype=complex), **flags)

    @staticmethod
    def unit(k, K, amplitude=1.0):
        """Unit mass at index k within half range K."""
        if abs(k) > K:
            raise InvalidSequenceError("unit index outside half range")
        c = np.zeros(2 * K + 1, dtype=complex)
        c[k + K] = amplitude
        return FourierSeq(c)

    @staticmethod
    def from_pairs(pairs, K=None, **flags):
        """Build from (k, value) pairs."""
        pairs = list(pairs)
        if K is None:
            K = max((abs(int(k)) for k, _ in pairs), default=0)
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in pairs:
            c[int(k) + K] = v
        return FourierSeq(c, **flags)

    def extended(self, K_new):
        """Same sequence in a larger (or equal) half range."""
        K = self.half_range
        if K_new < K:
            raise InvalidSequenceError("use truncated() to shrink")
        pad = K_new - K
        c = np.pad(self.coeffs, (pad, pad))
        return FourierSeq(c, real=self.real, zero_mean=self.zero_mean,
                          one_periodic=self.one_periodic)

    def truncated(self, K_new):
        K = self.half_range
        if K_new >= K:
            return self.extended(K_new)
        c = self.coeffs[K - K_new:K + K_new + 1].copy()
        return FourierSeq(c, real=self.real, zero_mean=self.zero_mean,
                          one_periodic=self.one_periodic)

    def to_json_obj(self):
        ks = self.nonzero_ks()
        return {
            "half_range": int(self.half_range),
            "real": bool(self.real),
            "zero_mean": bool(self.zero_mean),
            "one_periodic": bool(self.one_periodic),
            "coeffs": [[int(k), float(self[k].real), float(self[k].imag)]
                       for k in ks],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @staticmethod
    def from_json_obj(obj):
        K = int(obj["half_range"])
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, re, im in obj["coeffs"]:
            c[int(k) + K] = re + 1j * im
        return FourierSeq(c, real=bool(obj.get("real", False)),
                          zero_mean=bool(obj.get("zero_mean", False)),
                          one_periodic=bool(obj.get("one_periodic", False)))

    @staticmethod
    def from_json(text):
        return FourierSeq.from_json_obj(json.loads(text))


def _ordered_indices(K):
    # index order 0, +1, -1, +2, -2, ... as positions into the coeff array
    ks = np.empty(2 * K + 1, dtype=int)
    ks[0] = 0
    ks[1::2] = np.arange(1, K + 1)
    ks[2::2] = -np.arange(1, K + 1)
    return ks + K


def weight_profile(f, w, s, shift=0):
    """Array w(k+shift) <k+shift>^s |f_k| in ascending-k order."""
    ks = f.ks() + shift
    wv = np.ones(ks.size) if w is None else w(ks)
    return wv * bracket(ks) ** s * np.abs(f.coeffs)


def norm(f, w, s, p):
    """Weighted norm ||f||_{w,s,p}; w=None means the trivial weight.

    Finite-p summation runs in the fixed order |k| ascending, +k before -k,
    so results are reproducible bit for bit.
    """
    if p < 1:
        raise ValueError("p must be in [1, inf]")
    prof = weight_profile(f, w, s)
    if math.isinf(p):
        return float(prof.max(initial=0.0))
    ordered = prof[_ordered_indices(f.half_range)]
    return float(np.add.reduce(ordered ** p) ** (1.0 / p))


def shifted_norm(f, w, s, l):
    """sup_k w_{k+l} <k+l>^s |f_k|  (the norm of f e_l)."""
    return float(weight_profile(f, w, s, shift=l).max(initial=0.0))


def tail(f, N):
    """Zero out coefficients with |k| < N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    c = f.coeffs.copy()
    ks = f.ks()
    c[np.abs(ks) < N] = 0
    return FourierSeq(c, real=f.real, zero_mean=True,
                      one_periodic=f.one_periodic)


_SPARSE_CONV_NNZ = 64


def _convolve_arrays(a, b):
    """Full linear convolution; ascending-index shift-and-add when one side
    has small support, FFT otherwise."""
    nza = np.flatnonzero(a)
    nzb = np.flatnonzero(b)
    out = np.zeros(a.size + b.size - 1, dtype=complex)
    if nza.size == 0 or nzb.size == 0:
        return out
    if min(nza.size, nzb.size) > _SPARSE_CONV_NNZ:
        return fftconvolve(a, b)
    # loop over the sparser operand, ascending index
    if nzb.size <= nza.size:
        for j in nzb:
            out[j:j + a.size] += a * b[j]
    else:
        for j in nza:
            out[j:j + b.size] += b * a[j]
    return out


def convolve(a, b):
    """(a*b)_n = sum_m a_{n-m} b_m, truncated to half range max(K_a, K_b)."""
    Ka, Kb = a.half_range, b.half_range
    K = max(Ka, Kb)
    full = _convolve_arrays(a.coeffs, b.coeffs)  # indices -(Ka+Kb) .. Ka+Kb
    mid = Ka + Kb
    out = full[mid - K:mid + K + 1]
    return FourierSeq(out.copy(),
                      real=a.real and b.real,
                      one_periodic=a.one_periodic and b.one_periodic)


def hilbert_sum(n, sigma, cutoff=1_000_000):
    """S(n, sigma) = sum over |m| != n of 1/|m^2 - n^2|^sigma.

    Direct summation up to the cutoff plus a midpoint integral estimate of
    both tails; relative accuracy ~1e-8 for sigma in the convergent range.
    Raises ValueError for sigma <= 1/2 (divergent).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma <= 0.5:
        raise ValueError("sum diverges for sigma <= 1/2")
    M = max(int(cutoff), 4 * n)
    m = np.arange(1, M + 1, dtype=float)
    terms = np.abs(m * m - float(n) * n)
    terms[n - 1] = np.inf  # excluded index m = n
    body = 2.0 * np.sum(np.sort(terms ** (-sigma))) + float(n) ** (-2.0 * sigma)

    # tail integral of (x^2 - n^2)^{-sigma}, substituted x = 1/u so the
    # domain is finite and quad converges cleanly for all sigma > 1/2
    b = 1.0 / (M + 0.5)
    tail_val, _ = quad(lambda u: (1.0 / (u * u) - float(n) * n) ** (-sigma)
                       / (u * u), 0.0, b)
    return float(body + 2.0 * tail_val)


def weakstar_converged(seqs, limit, s, component_tol):
    """Desk-scale test of 'norm bounded + componentwise convergent'.

    Boundedness rule: max ||.||_{s,inf} over the final third of the list must
    not exceed twice the max over the first third (plus component_tol) --
    a finite list is always bounded, so the rule detects growth trends
    instead.  Componentwise convergence is checked on the final third only.
    Returns (bool, report).
    """
    if not seqs:
        return True, {"norms": [], "sup_norm": 0.0, "max_component_dev": 0.0}
    norms = [norm(f, None, s, math.inf) for f in seqs]
    third = max(1, len(norms) // 3)
    bounded = max(norms[-third:]) <= 2.0 * max(norms[:third]) + component_tol
    Kmax = max(max(f.half_range for f in seqs), limit.half_range)
    dev = 0.0
    for f in seqs[-third:]:
        g = f.extended(Kmax).coeffs - limit.extended(Kmax).coeffs
        dev = max(dev, float(np.max(np.abs(g))))
    converged = dev <= component_tol
    report = {
        "norms": norms,
        "sup_norm": max(norms),
        "norm_bounded": bool(bounded),
        "max_component_dev": dev,
        "componentwise": bool(converged),
    }
    return bool(bounded and converged), report
