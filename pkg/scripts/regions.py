"""SR-CR regions: CAPA-ISAC Pareto boundary, FDSAC and SPDA-ISAC at one-wavelength pitch."""
import csv
from collections import Counter

from _common import OUT, run

if __name__ == "__main__":
    out = OUT / "regions.csv"
    run("pareto", "--taus", "101", "--splits", "21", "-o", str(out))
    with open(out) as fh:
        counts = Counter(r["scheme"] for r in csv.DictReader(fh))
    print(out, dict(counts))
