"""SPDA at half- and one-wavelength pitch plus a 50/50 FDSAC split, 0..50 dB."""
from _common import OUT, run

if __name__ == "__main__":
    out = OUT / "baselines.csv"
    run("baselines", "--spacing", "0.0625", "--spacing", "0.125", "--spacing", "0.015625",
        "-o", str(out))
    print(out)
