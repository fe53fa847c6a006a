"""Eigenvalue polarization of the sinc kernel at the default 10-wavelength aperture."""
import csv

from _common import OUT, run

if __name__ == "__main__":
    out = OUT / "spectrum.csv"
    run("spectrum", "--modes", "40", "-o", str(out))
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    big = sum(float(r["epsilon_n"]) > 0.5 for r in rows)
    print(f"{out}: {len(rows)} modes, {big} with epsilon > 0.5")
