"""Receiver DSP: Volterra equalization, noise whitening, trellis detection.

The intended receive chain for dispersive intensity links: a least-squares
Volterra equalizer flattens the channel (leaving the residual noise
colored), a short monic prediction-error filter whitens that residual, and
because the same filter re-introduces known ISI, the detector runs a
symbol-wise BCJR over exactly those whitener taps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

VOLTERRA_TAPS = (41, 7, 5)


def _window_view(x: np.ndarray, sps: int, span: int) -> np.ndarray:
    """Centered length-`span` sample windows at each symbol instant."""
    x = np.asarray(x, dtype=np.float64).ravel()
    nsym = x.size // sps
    half = span // 2
    padded = np.concatenate([np.zeros(half), x, np.zeros(span)])
    view = np.lib.stride_tricks.sliding_window_view(padded, span)
    return view[np.arange(nsym) * sps]


def volterra_features(x: np.ndarray, sps: int = 1, taps=VOLTERRA_TAPS) -> np.ndarray:
    """Feature matrix of a memory-polynomial (Volterra) equalizer.

    Per output symbol: the linear window of taps[0] samples, all unordered
    pair products from the centered taps[1] sub-window, and all unordered
    triple products from the centered taps[2] sub-window. Kernel symmetry is
    enforced by construction (only i <= j <= k index combinations appear).
    """
    l1, l2, l3 = taps
    if l2 > l1 or l3 > l1 or not all(t % 2 == 1 for t in (l1, l2, l3)):
        raise ValueError(f"tap lengths must be odd and nested, got {taps}")
    if sps not in (1, 2):
        raise ValueError(f"sps must be 1 or 2, got {sps}")
    w1 = _window_view(x, sps, l1)
    c = l1 // 2
    w2 = w1[:, c - l2 // 2 : c + l2 // 2 + 1]
    w3 = w1[:, c - l3 // 2 : c + l3 // 2 + 1]
    iu, ju = np.triu_indices(l2)
    f2 = w2[:, iu] * w2[:, ju]
    trip = np.array(
        list(itertools.combinations_with_replacement(range(l3), 3)), dtype=np.int64
    )
    f3 = w3[:, trip[:, 0]] * w3[:, trip[:, 1]] * w3[:, trip[:, 2]]
    return np.hstack([w1, f2, f3])


@dataclass(frozen=True)
class VolterraEqualizer:
    sps: int
    taps: tuple
    theta: np.ndarray  # (n_features,) LS weights, bias last

    @property
    def n_features(self) -> int:
        return self.theta.size - 1


def volterra_train(
    x: np.ndarray,
    reference: np.ndarray,
    sps: int = 1,
    taps=VOLTERRA_TAPS,
    ridge: float = 1e-6,
) -> VolterraEqualizer:
    """Fit equalizer weights by ridge-regularized least squares.

    x holds sps * len(reference) received samples aligned so that symbol m
    is centered on sample m*sps; reference is the known transmitted
    amplitude sequence.
    """
    feats = volterra_features(x, sps, taps)
    ref = np.asarray(reference, dtype=np.float64).ravel()
    if feats.shape[0] != ref.size:
        raise ValueError(
            f"{feats.shape[0]} feature rows vs {ref.size} reference symbols"
        )
    f = np.hstack([feats, np.ones((feats.shape[0], 1))])
    gram = f.T @ f + ridge * np.eye(f.shape[1])
    theta = np.linalg.solve(gram, f.T @ ref)
    return VolterraEqualizer(sps=sps, taps=tuple(taps), theta=theta)


def volterra_apply(x: np.ndarray, eq: VolterraEqualizer) -> np.ndarray:
    feats = volterra_features(x, eq.sps, eq.taps)
    return feats @ eq.theta[:-1] + eq.theta[-1]


def design_whitener(residual: np.ndarray, order: int = 3):
    """Monic prediction-error filter for the equalizer residual.

    Solves the Yule-Walker equations for an AR(order - 1) model; the
    returned filter has `order` taps [1, -a_1, ..., -a_p] with p =
    order - 1. Returns (taps, prediction_error_variance). Convolving the
    equalized signal with taps whitens the noise while re-coloring the
    symbols, which is what the trellis detector is then matched to.
    """
    e = np.asarray(residual, dtype=np.float64).ravel()
    p = order - 1
    if p < 0 or e.size <= order:
        raise ValueError("residual too short for the requested order")
    if p == 0:
        return np.array([1.0]), float(np.mean(e * e))
    r = np.array([np.dot(e[: e.size - lag], e[lag:]) / e.size for lag in range(p + 1)])
    toe = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            toe[i, j] = r[abs(i - j)]
    a = np.linalg.solve(toe, r[1:])
    var = float(r[0] - a @ r[1:])
    return np.concatenate([[1.0], -a]), var


@dataclass(frozen=True)
class Trellis:
    """Branch bookkeeping for a 6-ary (or general Q-ary) ISI trellis.

    State encodes the last `memory` symbol indices base Q; a branch is
    (prev_state, symbol) with id b = prev_state*Q + symbol, next state
    (Q*prev_state + symbol) mod Q^memory. The channel is assumed quiescent
    (level-0 amplitude) before the burst, so the initial state is 0; the
    terminal distribution is left uniform.
    """
    taps: np.ndarray
    levels: np.ndarray
    memory: int
    n_states: int
    branch_mean: np.ndarray = field(repr=False)
    branch_sym: np.ndarray = field(repr=False)
    next_state: np.ndarray = field(repr=False)
    in_order: np.ndarray = field(repr=False)  # branches sorted by next state


def make_trellis(taps: np.ndarray, levels: np.ndarray) -> Trellis:
    taps = np.asarray(taps, dtype=np.float64).ravel()
    levels = np.asarray(levels, dtype=np.float64).ravel()
    q = levels.size
    memory = taps.size - 1
    n_states = q**memory
    b = np.arange(n_states * q)
    prev = b // q
    sym = b % q
    mean = taps[0] * levels[sym]
    digits = prev
    for i in range(1, memory + 1):
        mean = mean + taps[i] * levels[digits % q]
        digits = digits // q
    nxt = (q * prev + sym) % n_states
    in_order = np.argsort(nxt, kind="stable")
    return Trellis(
        taps=taps, levels=levels, memory=memory, n_states=n_states,
        branch_mean=mean, branch_sym=sym, next_state=nxt, in_order=in_order,
    )


def bcjr_app(
    y: np.ndarray,
    trellis: Trellis,
    noise_var: float,
    log_priors: np.ndarray = None,
):
    """Exact symbol-wise log-APPs over an ISI trellis (log-domain BCJR).

    y are the observations after any whitening, noise_var the white-noise
    variance, log_priors an optional (T, Q) or (Q,) array of symbol log
    priors. Returns a (T, Q) array of log posteriors normalized per symbol.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    q = trellis.levels.size
    t_len = y.size
    ns = trellis.n_states
    if log_priors is None:
        lp = np.zeros((t_len, q))
    else:
        lp = np.asarray(log_priors, dtype=np.float64)
        lp = np.broadcast_to(lp, (t_len, q)) if lp.ndim == 1 else lp
        if lp.shape != (t_len, q):
            raise ValueError(f"log_priors shape {lp.shape} != ({t_len}, {q})")
    prev = np.arange(ns * q) // q
    gamma_gain = -0.5 / noise_var
    # branch metrics per step: gaussian log-likelihood plus symbol prior
    alphas = np.empty((t_len + 1, ns))
    alphas[0] = -np.inf
    alphas[0, 0] = 0.0
    sym = trellis.branch_sym
    mean = trellis.branch_mean
    in_order = trellis.in_order
    metrics = np.empty((t_len, ns * q))
    for t in range(t_len):
        g = gamma_gain * (y[t] - mean) ** 2 + lp[t, sym]
        metrics[t] = g
        m = alphas[t, prev] + g
        grouped = m[in_order].reshape(ns, q)
        mx = grouped.max(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = mx + np.log(np.exp(grouped - mx[:, None]).sum(axis=1))
        nxt[~np.isfinite(mx)] = -np.inf
        alphas[t + 1] = nxt
    beta = np.zeros(ns)
    out = np.empty((t_len, q))
    nxt_state = trellis.next_state
    for t in range(t_len - 1, -1, -1):
        joint = alphas[t, prev] + metrics[t] + beta[nxt_state]
        by_sym = joint.reshape(ns, q)  # branch id = prev*q + sym
        mx = by_sym.max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            post = mx + np.log(np.exp(by_sym - mx[None, :]).sum(axis=0))
        post[~np.isfinite(mx)] = -np.inf
        norm = post.max()
        norm = norm + np.log(np.exp(post - norm).sum())
        out[t] = post - norm
        # step beta: beta_prev[s] = lse over branches out of s
        m = metrics[t] + beta[nxt_state]
        grouped = m.reshape(ns, q)
        mx = grouped.max(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            newb = mx + np.log(np.exp(grouped - mx[:, None]).sum(axis=1))
        newb[~np.isfinite(mx)] = -np.inf
        beta = newb
    return out
