"""Regenerate the shipped synthetic calibration bench file.

Planted actuator: k = 0.62 Nm/A, T_f = 0.5 Nm; 200 samples, currents
uniform in +/-10 A, Gaussian torque noise sigma = 0.05 Nm, seed 0.
"""

from pathlib import Path

from kneexo.actuation import TorqueCurrentModel, synthetic_calibration_samples
from kneexo.cli import BENCH_PLANTED

OUT = Path(__file__).resolve().parents[1] / "src" / "kneexo" / "data" / "synthetic_bench.csv"


def main():
    p = BENCH_PLANTED
    samples = synthetic_calibration_samples(TorqueCurrentModel(p["k_nm_per_a"], p["t_f_nm"]),
                                            p["n"], p["noise_sigma_nm"], p["seed"])
    lines = [
        f"# synthetic bench: k={p['k_nm_per_a']} Nm/A, T_f={p['t_f_nm']} Nm, "
        f"sigma={p['noise_sigma_nm']} Nm, n={p['n']}, seed={p['seed']}\n",
        "current_a,torque_nm\n",
    ]
    lines += [f"{s.current_I!r},{s.torque_T!r}\n" for s in samples]
    OUT.write_text("".join(lines))
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
