#!/usr/bin/env python3
"""Fetch the MovieLens 100k files (u.user, u.item, u.data) into a directory.

Tries the GroupLens distribution first. If that host is unreachable, the
same tables are rebuilt from the copy bundled in the `pytorch-widedeep`
wheel on PyPI and written back out in the raw ml-100k layout.

Usage: fetch_movielens.py [DEST]   (default: data/ml-100k next to this script's repo)
"""

import io
import math
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL_PACKAGE = "pytorch-widedeep==1.7.0"
WHEEL_PREFIX = "pytorch_widedeep/datasets/data/MovieLens100k_"
NEEDED = ("u.user", "u.item", "u.data")

GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def from_grouplens(dest):
    with urllib.request.urlopen(GROUPLENS_URL, timeout=30) as resp:
        blob = resp.read()
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        for name in NEEDED:
            with open(os.path.join(dest, name), "wb") as f:
                f.write(z.read("ml-100k/" + name))


def cell(v):
    if v is None:
        return ""
    if isinstance(v, float) and math.isnan(v):
        return ""
    return str(v)


def from_wheel(dest):
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             WHEEL_PACKAGE, "-d", tmp],
            check=True,
        )
        wheel = next(os.path.join(tmp, f) for f in os.listdir(tmp) if f.endswith(".whl"))
        with zipfile.ZipFile(wheel) as z:
            def table(name):
                return pd.read_parquet(io.BytesIO(z.read(WHEEL_PREFIX + name + ".parquet.brotli")))

            users, items, data = table("users"), table("items"), table("data")

    with open(os.path.join(dest, "u.user"), "w", encoding="latin-1", newline="\n") as f:
        for r in users.itertuples(index=False):
            f.write("|".join(cell(v) for v in (r.user_id, r.age, r.gender, r.occupation, r.zip_code)) + "\n")

    cols = ["movie_id", "movie_title", "release_date", "video_release_date", "IMDb_URL"] + GENRES
    with open(os.path.join(dest, "u.item"), "w", encoding="latin-1", newline="\n") as f:
        for r in items[cols].itertuples(index=False):
            f.write("|".join(cell(v) for v in r) + "\n")

    with open(os.path.join(dest, "u.data"), "w", newline="\n") as f:
        for r in data.itertuples(index=False):
            f.write(f"{r.user_id}\t{r.movie_id}\t{r.rating}\t{r.timestamp}\n")


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    dest = sys.argv[1] if len(sys.argv) > 1 else os.path.join(root, "data", "ml-100k")
    os.makedirs(dest, exist_ok=True)
    if all(os.path.exists(os.path.join(dest, n)) for n in NEEDED):
        print(f"ml-100k already present in {dest}")
        return
    try:
        from_grouplens(dest)
        print(f"fetched ml-100k from GroupLens into {dest}")
    except Exception as e:  # noqa: BLE001
        print(f"GroupLens unavailable ({e}); rebuilding from {WHEEL_PACKAGE}", file=sys.stderr)
        from_wheel(dest)
        print(f"rebuilt ml-100k from {WHEEL_PACKAGE} into {dest}")


if __name__ == "__main__":
    main()
