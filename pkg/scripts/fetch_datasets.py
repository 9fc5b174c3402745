#!/usr/bin/env python3
"""Download the four UCI benchmark datasets and convert them to the CSV
layouts declared in datasets/manifest.ini, then record SHA-256 checksums
in the manifest.

Requires network access to archive.ics.uci.edu. The concrete dataset ships
as a legacy .xls workbook, so `pip install xlrd` first.
"""
import configparser
import hashlib
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

import pandas as pd

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "datasets"
MANIFEST = DATA_DIR / "manifest.ini"


def fetch(url: str) -> bytes:
    print(f"downloading {url}")
    with urllib.request.urlopen(url) as resp:
        return resp.read()


def write_csv(frame: pd.DataFrame, path: Path):
    frame.to_csv(path, index=False, header=False)
    print(f"wrote {path} ({frame.shape[0]} rows, {frame.shape[1]} cols)")


def convert_airfoil(entry):
    raw = fetch(entry["source"])
    frame = pd.read_csv(io.BytesIO(raw), sep=r"\s+", header=None)
    write_csv(frame, DATA_DIR / entry["path"])


def convert_concrete(entry):
    raw = fetch(entry["source"])
    frame = pd.read_excel(io.BytesIO(raw), header=0)
    write_csv(frame, DATA_DIR / entry["path"])


def convert_naval(entry):
    raw = fetch(entry["source"])
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        name = next(n for n in zf.namelist() if n.endswith("data.txt"))
        frame = pd.read_csv(io.BytesIO(zf.read(name)), sep=r"\s+", header=None)
    # column 0 is the lever position target; 1-15 are plant measurements;
    # 16-17 are decay-state coefficients, not used here
    out = pd.concat([frame.iloc[:, 1:16], frame.iloc[:, 0]], axis=1)
    write_csv(out, DATA_DIR / entry["path"])


def convert_wine(entry):
    raw = fetch(entry["source"])
    frame = pd.read_csv(io.BytesIO(raw), sep=";", header=0)
    write_csv(frame, DATA_DIR / entry["path"])


CONVERTERS = {
    "airfoil": convert_airfoil,
    "concrete": convert_concrete,
    "naval": convert_naval,
    "wine": convert_wine,
}


def main() -> int:
    parser = configparser.ConfigParser()
    parser.read(MANIFEST)
    for name in parser.sections():
        entry = dict(parser[name])
        CONVERTERS[name](entry)
        digest = hashlib.sha256((DATA_DIR / entry["path"]).read_bytes()).hexdigest()
        parser[name]["sha256"] = digest
    with open(MANIFEST, "w") as fh:
        parser.write(fh)
    print("updated checksums in", MANIFEST)
    return 0


if __name__ == "__main__":
    sys.exit(main())
