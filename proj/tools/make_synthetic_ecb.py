#!/usr/bin/env python3
"""Generate the bundled synthetic Svensson parameter history.

Daily (weekday) rows from 1997-12-31 to 2007-12-31, betas in percent and
taus in years, mimicking the layout of the ECB yield curve data product.
The path is an Ornstein-Uhlenbeck process pinned to a fixed curve on the
last date. Output is deterministic for a given seed.
"""
import argparse
import datetime as dt

import numpy as np

ANCHOR = np.array([4.30, -0.30, -0.50, 0.80, 1.50, 8.00])
START = np.array([5.00, -1.00, -0.50, 0.80, 1.60, 8.50])
DAILY_VOL = np.array([0.030, 0.040, 0.060, 0.060, 0.004, 0.010])
REVERSION_PER_YEAR = 0.5


def weekdays(first, last):
    day = first
    while day <= last:
        if day.weekday() < 5:
            yield day
        day += dt.timedelta(days=1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=20071231)
    parser.add_argument("--out", default="data/ecb_svensson_synthetic.csv")
    args = parser.parse_args()

    dates = list(weekdays(dt.date(1997, 12, 31), dt.date(2007, 12, 31)))
    rng = np.random.default_rng(args.seed)
    k = REVERSION_PER_YEAR / 260.0
    path = np.empty((len(dates), 6))
    x = START.copy()
    for i in range(len(dates)):
        path[i] = x
        x = x + k * (ANCHOR - x) + DAILY_VOL * rng.standard_normal(6)

    # pin the last row to the anchor curve
    ramp = np.linspace(0.0, 1.0, len(dates))[:, None]
    path += ramp * (ANCHOR - path[-1])
    path[:, 4:] = np.maximum(path[:, 4:], 0.05)

    with open(args.out, "w") as f:
        f.write("date,beta0,beta1,beta2,beta3,tau1,tau2\n")
        for day, row in zip(dates, path):
            f.write(day.isoformat() + "," + ",".join(f"{v:.6f}" for v in row) + "\n")


if __name__ == "__main__":
    main()
