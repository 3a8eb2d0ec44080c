"""How often does a 200-sample noisy bench recover (k, T_f) within 3 %?

Repeats the synthetic calibration over many seeds and reports error
statistics and the pass rate of the 3 % bound.
"""

import argparse

import numpy as np

from kneexo.actuation import PUBLISHED_MODEL, calibrate, synthetic_calibration_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=2000)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--sigma", type=float, default=0.05)
    args = ap.parse_args()
    m = PUBLISHED_MODEL
    errs = []
    for seed in range(args.seeds):
        fit, _ = calibrate(synthetic_calibration_samples(m, args.n, args.sigma, seed))
        errs.append((fit.k / m.k - 1, fit.T_f / m.T_f - 1))
    e = np.array(errs)
    ok = np.all(np.abs(e) <= 0.03, axis=1)
    print(f"seeds={args.seeds} pass_rate={ok.mean():.3f}")
    print(f"k:   bias={e[:, 0].mean():+.5f} sd={e[:, 0].std():.5f}")
    print(f"T_f: bias={e[:, 1].mean():+.5f} sd={e[:, 1].std():.5f}")


if __name__ == "__main__":
    main()
