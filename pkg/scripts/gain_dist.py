"""Analytic PDF/CDF of the communication gain against a histogram of channel draws."""
from _common import OUT, run

if __name__ == "__main__":
    out = OUT / "gain_dist.csv"
    run("gain-dist", "--points", "400", "--bins", "80", "-o", str(out))
    print(out, out.with_name("gain_dist_hist.csv"))
