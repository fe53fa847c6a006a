"""Closed forms, high-SNR asymptotes and Monte Carlo for both designs, 0..50 dB."""
import sys

from _common import OUT, run

if __name__ == "__main__":
    samples = sys.argv[1] if len(sys.argv) > 1 else "100000"
    out = OUT / "metrics_snr.csv"
    run("metrics", "--sweep", "snr", "--from", "0", "--to", "50", "--step", "5",
        "--samples", samples, "-o", str(out))
    print(out)
