"""Built-in oracle suite behind the ``selfcheck`` CLI subcommand.

Each check is small, seeded, and independent; together they catch the
failure modes that silently corrupt results: a damaged base-graph file, a
tampered label table, a broken matcher round trip, or a detector that no
longer agrees with exhaustive enumeration. Check names are stable so
failures can be grepped and individual suites rerun.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import constellation as cst
from . import shaping
from .dsp import bcjr_app, make_trellis
from .fec.bch import bch_build, bch_decode, bch_encode
from .fec.ldpc import ldpc_build, ldpc_decode, ldpc_encode, load_basegraph


def _check_basegraph(basegraph_path=None):
    """Parse the base-graph file and re-verify its structural contract."""
    where = basegraph_path if basegraph_path is not None else "packaged basegraph_v1.txt"
    try:
        bg = load_basegraph(basegraph_path)
    except (ValueError, OSError) as e:
        return False, f"{where}: {e}"
    s = bg.shifts
    ncols = bg.kb + bg.mb
    for r1 in range(bg.mb):
        for r2 in range(r1 + 1, bg.mb):
            both = [c for c in range(ncols) if s[r1, c] >= 0 and s[r2, c] >= 0]
            for i, c1 in enumerate(both):
                for c2 in both[i + 1:]:
                    delta = int(s[r1, c1] - s[r1, c2] + s[r2, c2] - s[r2, c1])
                    if delta == 0 or abs(delta) >= bg.zmin:
                        return False, (
                            f"{where}: rows {r1},{r2} cols {c1},{c2} close a "
                            f"4-cycle (shift sum {delta}) for lifts >= {bg.zmin}")
    return True, f"kb={bg.kb} mb={bg.mb} zmin={bg.zmin} v{bg.version}, 4-cycle free"


def _check_gray(name, expect_violations):
    c = cst.build_constellation(name)
    viol = cst.check_unit_distance_gray(c)
    if expect_violations:
        ok = len(viol) >= 1
        return ok, (f"{len(viol)} unit-distance label violations (wanted >= 1)"
                    if ok else "labeling is Gray but must not be")
    ok = len(viol) == 0
    if ok:
        return True, "unit-distance Gray, 0 violations"
    p1, p2 = viol[0][:2]
    return False, f"{len(viol)} violations, first at points {p1} / {p2}"


def _check_ccdm():
    comp = shaping.Composition.near_uniform(1000)
    k = shaping.ccdm_input_length(comp)
    if not 1.565 <= k / 1000 <= 1.585:
        return False, f"matcher rate {k / 1000:.4f} outside [1.565, 1.585]"
    rng = np.random.default_rng(123)
    for _ in range(100):
        d = rng.integers(0, 2, size=k).astype(np.uint8)
        a = shaping.ccdm_encode(d, comp)
        counts = np.bincount(a, minlength=3)
        if tuple(counts) != comp.counts:
            return False, f"composition {tuple(counts)} != {comp.counts}"
        if not np.array_equal(shaping.ccdm_decode(a, comp), d):
            return False, "round trip mismatch"
    return True, f"k={k}, 100 round trips exact"


def _check_bcjr():
    rng = np.random.default_rng(7)
    taps = np.array([1.0, 0.35])
    tr = make_trellis(taps, np.arange(6) / 5.0)
    nv = 0.05
    x = rng.integers(0, 6, size=6)
    y = np.convolve(x / 5.0, taps)[: len(x)] + 0.1 * rng.standard_normal(len(x))
    app = bcjr_app(y, tr, nv)
    # exhaustive-enumeration posterior with the same level-0 history start
    logp = np.full((len(x), 6), -np.inf)
    for seq in itertools.product(range(6), repeat=len(x)):
        z = np.convolve(np.array(seq) / 5.0, taps)[: len(x)]
        ll = -np.sum((y - z) ** 2) / (2 * nv)
        for t, v in enumerate(seq):
            logp[t, v] = np.logaddexp(logp[t, v], ll)
    logp -= np.max(logp, axis=1, keepdims=True)
    ref = logp - np.log(np.sum(np.exp(logp), axis=1, keepdims=True))
    err = float(np.max(np.abs(np.exp(app) - np.exp(ref))))
    ok = err < 1e-9
    return ok, f"max |posterior - enumeration| = {err:.2e}"


def _check_ldpc(basegraph_path=None):
    bg = load_basegraph(basegraph_path) if basegraph_path else None
    rng = np.random.default_rng(5)
    code = ldpc_build(2500, 0.8, basegraph=bg)
    u = rng.integers(0, 2, size=code.k).astype(np.uint8)
    cw = ldpc_encode(u, code)
    llrs = (1.0 - 2.0 * cw[code.tx_index].astype(np.float64)) * 8.0
    got, conv, _ = ldpc_decode(llrs, code)
    ok = conv and np.array_equal(got, u)
    return ok, "noiseless encode/decode identity" if ok else "decode mismatch"


def _check_bch():
    rng = np.random.default_rng(9)
    code = bch_build(400, t=4)
    u = rng.integers(0, 2, size=code.systematic_length).astype(np.uint8)
    cw = bch_encode(u, code)
    word = cw.copy()
    word[rng.choice(len(word), size=4, replace=False)] ^= 1
    got, ok = bch_decode(word, code)
    ok = ok and np.array_equal(got, u)
    return ok, "t=4 errors corrected at length 400" if ok else "decode mismatch"


CHECKS = (
    ("basegraph_file", _check_basegraph, True),
    ("gray_framed_cross_qam32", lambda: _check_gray("framed_cross_qam32", False), False),
    ("gray_pam6", lambda: _check_gray("pam6_label", False), False),
    ("gray_cross_qam32_violations", lambda: _check_gray("cross_qam32", True), False),
    ("ccdm_round_trip", _check_ccdm, False),
    ("bcjr_brute_force", _check_bcjr, False),
    ("ldpc_round_trip", _check_ldpc, True),
    ("bch_round_trip", _check_bch, False),
)


def run_selfcheck(basegraph_path=None):
    """Run every check; returns [(name, ok, detail)].

    A check that raises is reported as failed with the exception text, so
    one broken table cannot take down the whole report.
    """
    results = []
    for name, fn, takes_path in CHECKS:
        try:
            ok, detail = fn(basegraph_path) if takes_path else fn()
        except Exception as e:  # noqa: BLE001 -- report, never crash the suite
            ok, detail = False, f"{type(e).__name__}: {e}"
        results.append((name, bool(ok), detail))
    return results
