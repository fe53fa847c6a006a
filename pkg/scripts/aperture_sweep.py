"""Metrics versus transmit aperture length from 5 to 20 wavelengths at 50 dB."""
import sys

from _common import OUT, run

if __name__ == "__main__":
    extra = [] if "--mc" in sys.argv else ["--no-mc"]
    out = OUT / "metrics_aperture.csv"
    run("metrics", "--sweep", "aperture", "--from", "5", "--to", "20", "--step", "1",
        *extra, "-o", str(out))
    print(out)
