#!/usr/bin/env python3
"""Print the resource analytics for the standard strategy lineup and the
channel sweep on the built-in device profiles.

Usage: python scripts/resource_report.py [--orig-shape 3x350x350] [--out-shape 32x32]
"""

import argparse

from dexkit import Strategy, get_profile, info_utilization, processor_utilization, strategy_info_ratio
from dexkit.accel import percent

LINEUP = [
    (Strategy.DOWNSAMPLE, lambda c_in: c_in),
    (Strategy.COORDCONV, lambda c_in: c_in + 2),
    (Strategy.COORDCONV_R, lambda c_in: c_in + 3),
    (Strategy.REPETITION, lambda c_in: 64),
    (Strategy.ROTATION, lambda c_in: 64),
    (Strategy.TILE, lambda c_in: 64),
    (Strategy.PATCH_SEQUENTIAL, lambda c_in: 64),
    (Strategy.PATCH_RANDOM, lambda c_in: 64),
    (Strategy.DEX, lambda c_in: 64),
]

SWEEP = (3, 6, 18, 36, 64)


def parse_shape(text, parts):
    values = tuple(int(p) for p in text.lower().split("x"))
    assert len(values) == parts, f"expected {parts} components in {text}"
    return values


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orig-shape", default="3x350x350")
    ap.add_argument("--out-shape", default="32x32")
    ap.add_argument("--profile", default="max78000")
    args = ap.parse_args()

    c_in, h_in, w_in = parse_shape(args.orig_shape, 3)
    h_out, w_out = parse_shape(args.out_shape, 2)
    profile = get_profile(args.profile)

    print(f"strategy lineup, {args.orig_shape} -> {h_out}x{w_out} on {profile.name}")
    print(f"{'strategy':<18}{'chan':>6}{'info_ratio':>12}{'proc_util%':>12}")
    for strategy, chan_rule in LINEUP:
        chans = chan_rule(c_in)
        ratio = strategy_info_ratio(strategy, c_in, chans)
        util = percent(processor_utilization(chans, profile))
        print(f"{strategy.value:<18}{chans:>6}{round(ratio, 1):>12}{util:>12}")

    print()
    print(f"channel sweep on {profile.name}")
    print(f"{'channels':<10}{'info_util%':>12}{'proc_util%':>12}")
    for chans in SWEEP:
        info = percent(info_utilization(c_in, h_in, w_in, chans, h_out, w_out))
        util = percent(processor_utilization(chans, profile))
        print(f"{chans:<10}{info:>12}{util:>12}")


if __name__ == "__main__":
    main()
