"""Achievable-rate estimation and operating-point solvers.

Rates are reported in bits per 1D channel use (one PAM-6 level on the
wire); two-dimensional formats divide their per-point information by two.
Peak SNR is 1/noise_var since the peak amplitude is normalized to 1.

Symbol-metric rates are Monte Carlo mutual information estimates
H(X) - E[-log2 P(x|y)]; bit-metric rates use the standard mismatched
(bitwise) decoding bound [H(X) - sum_j E log2(1 + e^{-/+ LLR_j})]+, which
for independent uniform label bits equals the familiar per-bit form
sum_j (1 - E log2(1 + e^{-/+ LLR_j})).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import shaping
from .channel import ChannelSpec, sigma_for_peak_snr, transmit
from .constellation import bit_llrs, build_constellation, symbol_posteriors
from .dsp import bcjr_app, make_trellis

SCHEMES = ("cross_qam32", "framed_cross_qam32", "dm_pam6")
METRICS = ("symbol_metric", "bit_metric")
MAX_RATE_1D = math.log2(6.0)
SNR_CAP_DB = 60.0
_SYMBOL_STREAM = 1000  # rng substream for data; noise uses stream 0
_HW_FLOOR = 1e-12  # keeps reported confidence strictly positive when the
                   # per-sample information is constant (noise-free regime)


@dataclass(frozen=True)
class RateEstimate:
    scheme: str
    metric: str
    snr_db: float
    rate: float
    half_width: float
    num_symbols: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.rate <= MAX_RATE_1D + 1e-9:
            raise ValueError(f"rate {self.rate} outside [0, log2 6]")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")


def _constellation_for(scheme: str):
    if scheme == "dm_pam6":
        return build_constellation("pam6_label")
    if scheme in ("cross_qam32", "framed_cross_qam32"):
        return build_constellation(scheme)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _simulate(scheme: str, snr_db: float, num_symbols: int, seed: int, taps=None):
    """Draw symbols, push them through the channel, return (const, idx, y, nv).

    num_symbols counts 1D channel uses; 2D formats emit num_symbols//2
    points. With `taps` the link has residual ISI and detection must use a
    trellis; otherwise the channel is memoryless AWGN.
    """
    c = _constellation_for(scheme)
    if num_symbols < 10**4:
        raise ValueError(f"need at least 1e4 symbols, got {num_symbols}")
    nv = sigma_for_peak_snr(snr_db)
    if taps is None:
        spec = ChannelSpec(kind="awgn", noise_var=nv, seed=seed)
    else:
        spec = ChannelSpec(kind="fir_isi", noise_var=nv, taps=tuple(taps), seed=seed)
    groups = num_symbols // c.dimension
    idx = spec.rng(_SYMBOL_STREAM).integers(0, c.num_points, size=groups)
    amps = c.amplitudes[idx].ravel()
    return c, idx, nv, spec, amps


def estimate_mi(
    scheme: str,
    snr_db: float,
    num_symbols: int = 10**6,
    seed: int = 0,
    taps=None,
) -> RateEstimate:
    """Symbol-metric Monte Carlo rate per 1D use.

    With ISI taps the posteriors come from the exact trellis detector run
    per level; 2D formats then score each point by the product of its two
    level posteriors (a mismatched but achievable metric).
    """
    c, idx, nv, spec, amps = _simulate(scheme, snr_db, num_symbols, seed, taps)
    y = transmit(amps, spec)
    h_x = math.log2(c.num_points)
    if taps is None:
        post = symbol_posteriors(y, c, nv)
        p_true = post[np.arange(len(idx)), idx]
        samples = np.log2(np.maximum(p_true, np.finfo(np.float64).tiny))
    else:
        levels = np.arange(6) / 5.0
        trellis = make_trellis(np.asarray(taps, dtype=np.float64), levels)
        app = bcjr_app(y, trellis, nv)
        lev_idx = np.rint(c.points[idx].ravel()).astype(np.int64)
        lp = app[np.arange(lev_idx.size), lev_idx] / math.log(2.0)
        samples = lp.reshape(-1, c.dimension).sum(axis=1)
    mi_point = h_x + samples.mean()
    rate = max(0.0, mi_point / c.dimension)
    hw = max(1.96 * samples.std(ddof=1) / math.sqrt(samples.size) / c.dimension,
             _HW_FLOOR)
    return RateEstimate(
        scheme=scheme, metric="symbol_metric", snr_db=float(snr_db),
        rate=float(min(rate, MAX_RATE_1D)), half_width=float(hw),
        num_symbols=num_symbols, seed=seed,
    )


def estimate_gmi(
    scheme: str,
    snr_db: float,
    num_symbols: int = 10**6,
    seed: int = 0,
    taps=None,
) -> RateEstimate:
    """Bit-metric Monte Carlo rate per 1D use (bitwise-LLR decoding bound)."""
    c, idx, nv, spec, amps = _simulate(scheme, snr_db, num_symbols, seed, taps)
    y = transmit(amps, spec)
    nbits = c.bits_per_point
    if taps is None:
        llr = bit_llrs(y, c, nv).reshape(-1, nbits)
    else:
        levels = np.arange(6) / 5.0
        trellis = make_trellis(np.asarray(taps, dtype=np.float64), levels)
        app = bcjr_app(y, trellis, nv)
        llr = _llrs_from_level_logposts(app, c).reshape(-1, nbits)
    b = c.labels[idx].astype(np.float64)
    # penalty log2(1 + exp(-(1-2b) * llr)) per bit, summed per point
    signed = (1.0 - 2.0 * b) * llr
    penalties = np.logaddexp(0.0, -signed) / math.log(2.0)
    per_point = penalties.sum(axis=1)
    gmi_point = math.log2(c.num_points) - per_point.mean()
    rate = max(0.0, gmi_point / c.dimension)
    hw = max(1.96 * per_point.std(ddof=1) / math.sqrt(per_point.size) / c.dimension,
             _HW_FLOOR)
    return RateEstimate(
        scheme=scheme, metric="bit_metric", snr_db=float(snr_db),
        rate=float(min(rate, MAX_RATE_1D)), half_width=float(hw),
        num_symbols=num_symbols, seed=seed,
    )


def _llrs_from_level_logposts(app: np.ndarray, c) -> np.ndarray:
    """Bitwise LLRs for label bits given per-level log posteriors.

    app has shape (num_levels_rx, 6). For 1D labelings this marginalizes
    directly; for 2D formats consecutive level pairs are combined with a
    product metric before marginalizing over the 32 points.
    """
    if c.dimension == 1:
        lev_order = np.rint(c.points.ravel()).astype(np.int64)
        logm = app[:, lev_order]
    else:
        a = app[0::2]
        bpost = app[1::2]
        l0 = np.rint(c.points[:, 0]).astype(np.int64)
        l1 = np.rint(c.points[:, 1]).astype(np.int64)
        logm = a[:, l0] + bpost[:, l1]
    m = logm.max(axis=1, keepdims=True)
    w = np.exp(logm - m)
    out = np.empty((logm.shape[0], c.bits_per_point))
    tiny = np.finfo(np.float64).tiny
    for j in range(c.bits_per_point):
        mask0 = c.labels[:, j] == 0
        s0 = w[:, mask0].sum(axis=1)
        s1 = w[:, ~mask0].sum(axis=1)
        out[:, j] = np.log(np.maximum(s0, tiny)) - np.log(np.maximum(s1, tiny))
    return out


def matcher_rate_loss(n: int = shaping.DEFAULT_MATCHER_N) -> float:
    """Entropy lost to the finite-length fixed-composition matcher (bits/amp)."""
    comp = shaping.Composition.near_uniform(n)
    k = shaping.ccdm_input_length(comp)
    return math.log2(3.0) - k / n


def snr_at_rate(
    scheme: str,
    metric: str,
    target_rate: float = 2.0,
    num_symbols: int = 10**6,
    seed: int = 0,
    tol_bpcu: float = 0.005,
    matcher_n: int = shaping.DEFAULT_MATCHER_N,
    taps=None,
) -> float:
    """Peak SNR (dB) where the scheme's estimated rate meets target_rate.

    Bisection with common random numbers (same seed at every SNR), bracket
    auto-expansion capped at 60 dB. For dm_pam6 the target is feasibility
    of the full shaped construction: the finite-length matcher redeems
    k/n < log2(3) bits per amplitude, so the solver finds the SNR where
    the ideal rate exceeds the target by that loss. Pass matcher_n=None
    for the asymptotic (infinite-n) threshold.
    """
    if metric == "symbol_metric":
        est = estimate_mi
    elif metric == "bit_metric":
        est = estimate_gmi
    else:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    offset = 0.0
    if scheme == "dm_pam6" and matcher_n is not None:
        offset = matcher_rate_loss(matcher_n)
    want = target_rate + offset

    def rate_at(snr):
        return est(scheme, snr, num_symbols, seed, taps=taps).rate

    lo, hi = -5.0, 25.0
    r_lo = rate_at(lo)
    if r_lo >= want:
        raise ValueError(f"target {target_rate} bpcu already met at {lo} dB")
    r_hi = rate_at(hi)
    while r_hi < want:
        hi += 10.0
        if hi > SNR_CAP_DB:
            raise ValueError(
                f"target {target_rate} bpcu unreachable for {scheme}/{metric} "
                f"below {SNR_CAP_DB} dB"
            )
        r_hi = rate_at(hi)
    if not r_lo < r_hi:
        raise AssertionError("rate not increasing over the bracket")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        r = rate_at(mid)
        if abs(r - want) < tol_bpcu:
            return mid
        if r < want:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-4:
            return mid
    raise AssertionError("bisection failed to converge")


@dataclass(frozen=True)
class FerPoint:
    rate: float
    snr_db: float
    fer: float
    half_width: float
    frames: int
    errors: int


def rate_at_fer(
    scheme: str,
    channel: ChannelSpec,
    fer_target: float = 1e-2,
    codec: str = "ldpc",
    rate_grid=(1.80, 1.90, 2.00, 2.10),
    frame_symbols: int = 1000,
    max_frames: int = 1000,
    min_errors: int = 100,
    seed: int = 0,
):
    """Largest grid rate whose coded FER meets fer_target on the channel.

    Scans the grid from the top; each point runs until min_errors frame
    errors or max_frames frames (whichever first), so clearly failing
    rates abort early. Returns (achieved_rate, [FerPoint...]); raises if
    no grid rate meets the target.
    """
    from .link import coded_fer

    points = []
    achieved = None
    for rate in sorted(rate_grid, reverse=True):
        fer, hw, frames, errors = coded_fer(
            scheme, rate, channel, codec=codec, frame_symbols=frame_symbols,
            max_frames=max_frames, min_errors=min_errors, seed=seed,
        )
        snr = -10.0 * math.log10(channel.noise_var)
        points.append(FerPoint(rate=rate, snr_db=snr, fer=fer,
                               half_width=hw, frames=frames, errors=errors))
        if fer <= fer_target:
            achieved = rate
            break
    if achieved is None:
        raise ValueError(
            f"no rate in {sorted(rate_grid)} meets FER {fer_target} for {scheme}"
        )
    return achieved, points
