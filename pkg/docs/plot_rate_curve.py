"""Plot a rate-curve CSV. Not part of the package; needs matplotlib.

    shapedbmd rate-curve --m 5 --out curve.csv
    python docs/plot_rate_curve.py curve.csv curve.png
"""

import csv
import sys

import matplotlib.pyplot as plt


def main(src: str, dst: str) -> None:
    with open(src) as fh:
        rows = list(csv.DictReader(fh))
    snr = [float(r["snr_db"]) for r in rows]
    for col in rows[0]:
        if col != "snr_db":
            plt.plot(snr, [float(r[col]) for r in rows], label=col.replace("_", " "))
    plt.xlabel("SNR [dB]")
    plt.ylabel("bits / channel use")
    plt.grid(True, alpha=0.3)
    plt.legend()
    plt.savefig(dst, dpi=150, bbox_inches="tight")


if __name__ == "__main__":
    main(*sys.argv[1:3])
