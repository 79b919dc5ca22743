"""Download the UCI Mushroom data and write it as a CSV with a header row.

Usage::

    python3 scripts/fetch_mushroom.py [--out data/mushroom.csv]

The raw file has no header; column names follow the UCI attribute list and
the class column is called ``class``. Missing values stay as ``?``.
"""
import argparse
import csv
import io
import urllib.request
from pathlib import Path

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/mushroom/agaricus-lepiota.data"
COLUMNS = [
    "class", "cap-shape", "cap-surface", "cap-color", "bruises", "odor", "gill-attachment",
    "gill-spacing", "gill-size", "gill-color", "stalk-shape", "stalk-root",
    "stalk-surface-above-ring", "stalk-surface-below-ring", "stalk-color-above-ring",
    "stalk-color-below-ring", "veil-type", "veil-color", "ring-number", "ring-type",
    "spore-print-color", "population", "habitat",
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--url", default=URL)
    ap.add_argument("--out", default="data/mushroom.csv")
    args = ap.parse_args(argv)
    with urllib.request.urlopen(args.url, timeout=60) as resp:
        text = resp.read().decode("ascii")
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    bad = [i for i, r in enumerate(rows, 1) if len(r) != len(COLUMNS)]
    if bad:
        raise SystemExit(f"unexpected column count on lines {bad[:5]}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        w.writerows(rows)
    print(f"wrote {out}: {len(rows)} rows")


if __name__ == "__main__":
    main()
