#!/usr/bin/env python3
"""Fetch the two UCI benchmark datasets into data/.

Downloads the original Wisconsin Breast Cancer file (699 rows, 11 columns:
id, nine 1-10 integer attributes, class 2=benign/4=malignant, missing
values marked '?') and the Ionosphere file (351 rows, 34 real features
plus a g/b class column), verifies their shape, and writes them verbatim
to data/wbc.csv and data/ionosphere.csv.

Tests and the bundled wbc/ionosphere experiment configs use these files;
they are never downloaded at test time. Run once:

    python3 scripts/fetch_datasets.py [--dest data/]
"""

import argparse
import csv
import io
import os
import sys
import urllib.request

SOURCES = {
    "wbc.csv": {
        "urls": [
            "https://archive.ics.uci.edu/ml/machine-learning-databases/"
            "breast-cancer-wisconsin/breast-cancer-wisconsin.data",
            "https://raw.githubusercontent.com/jbrownlee/Datasets/master/"
            "breast-cancer-wisconsin.csv",
        ],
        "columns": 11,
        "rows": 699,
    },
    "ionosphere.csv": {
        "urls": [
            "https://archive.ics.uci.edu/ml/machine-learning-databases/"
            "ionosphere/ionosphere.data",
            "https://raw.githubusercontent.com/jbrownlee/Datasets/master/"
            "ionosphere.csv",
        ],
        "columns": 35,
        "rows": 351,
    },
}


def fetch(urls: list) -> str:
    last_error = None
    for url in urls:
        try:
            with urllib.request.urlopen(url, timeout=60) as response:
                return response.read().decode("utf-8")
        except Exception as exc:  # noqa: BLE001 - report and try the mirror
            print(f"  failed: {url} ({exc})", file=sys.stderr)
            last_error = exc
    raise SystemExit(f"all sources failed; last error: {last_error}")


def verify(name: str, text: str, spec: dict) -> None:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) != spec["rows"]:
        raise SystemExit(f"{name}: expected {spec['rows']} rows, got {len(rows)}")
    bad = [r for r in rows if len(r) != spec["columns"]]
    if bad:
        raise SystemExit(f"{name}: {len(bad)} rows with wrong column count")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data")
    args = parser.parse_args()
    os.makedirs(args.dest, exist_ok=True)
    for name, spec in SOURCES.items():
        dest = os.path.join(args.dest, name)
        if os.path.exists(dest):
            print(f"{dest} already present, skipping")
            continue
        print(f"fetching {name} ...")
        text = fetch(spec["urls"])
        verify(name, text, spec)
        with open(dest, "w", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        print(f"wrote {dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
