#!/usr/bin/env python3
"""FER-vs-SNR waterfalls for the coded schemes at a fixed transmission rate.

Emits one CSV row per (scheme, snr) point; pipe into any plotting tool.
Frames use per-index noise substreams, so rerunning with the same seed
reproduces every row exactly.

Usage:
    python scripts/coded_waterfall.py --rate 2.0 --snr-start 26 \
        --snr-stop 28.5 --snr-step 0.25 --frames 500
"""
import argparse
import sys

import numpy as np

from pam6link.channel import ChannelSpec, sigma_for_peak_snr
from pam6link.link import coded_fer
from pam6link.rates import SCHEMES


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--rate", type=float, default=2.0, help="bpcu")
    ap.add_argument("--codec", choices=("ldpc", "bch"), default="ldpc")
    ap.add_argument("--frame-symbols", type=int, default=1000)
    ap.add_argument("--frames", type=int, default=500)
    ap.add_argument("--min-errors", type=int, default=50)
    ap.add_argument("--snr-start", type=float, default=25.5)
    ap.add_argument("--snr-stop", type=float, default=28.5)
    ap.add_argument("--snr-step", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scheme", choices=SCHEMES, action="append",
                    default=None, help="repeatable (default: all three)")
    args = ap.parse_args(argv)

    schemes = args.scheme or list(SCHEMES)
    grid = np.arange(args.snr_start, args.snr_stop + 1e-9, args.snr_step)
    print("scheme,snr_db,fer,half_width,frames,errors")
    for scheme in schemes:
        for snr in grid:
            chan = ChannelSpec(noise_var=sigma_for_peak_snr(float(snr)),
                               seed=args.seed)
            try:
                fer, hw, frames, errors = coded_fer(
                    scheme, args.rate, chan, codec=args.codec,
                    frame_symbols=args.frame_symbols,
                    max_frames=args.frames, min_errors=args.min_errors,
                    seed=args.seed)
            except ValueError as e:
                print(f"# {scheme}: {e}", file=sys.stderr)
                break
            print(f"{scheme},{snr:g},{fer!r},{hw!r},{frames},{errors}",
                  flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
