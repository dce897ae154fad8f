#!/usr/bin/env python3
"""Assemble KEEL-format dataset files from the PyPI wheels that bundle them.

The `keel_ds` and `common_datasets` wheels ship copies of the KEEL/UCI
benchmark sets. This script downloads both (pip download, no install),
normalizes every file to KEEL `.dat` with a full header and writes them to
an output directory.

    tools/make_fixtures.py --out tests/data            # the bundled fixture subset
    tools/make_fixtures.py --out data/keel --all       # every available benchmark set
"""
import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

FIXTURES = [
    "iris", "wine", "wisconsin", "heart", "pima", "balance", "cleveland",
    "dermatology", "hepatitis", "movement_libras", "winequality-red",
]

# benchmark name -> (source, member path inside the wheel)
SOURCES = {
    "appendicitis": ("common", "classification/appendicitis/appendicitis.dat"),
    "balance": ("common", "classification/balance/balance.dat"),
    "banana": ("keel", "balanced/raw/banana.dat"),
    "bands": ("keel", "balanced/raw/bands.dat"),
    "bupa": ("common", "classification/bupa/bupa.dat"),
    "cleveland": ("common", "classification/cleveland/cleveland.dat"),
    "dermatology": ("common", "classification/dermatology/dermatology.dat"),
    "haberman": ("common", "classification/haberman/haberman.dat"),
    "hayes-roth": ("common", "classification/hayes-roth/hayes-roth.dat"),
    "heart": ("keel", "balanced/raw/heart.dat"),
    "hepatitis": ("uci-hepatitis", "classification/hepatitis/hepatitis.data.txt"),
    "ionosphere": ("common", "classification/ionosphere/ionosphere.dat"),
    "iris": ("keel", "balanced/raw/iris.dat"),
    "led7digit": ("common", "classification/led7digit/led7digit.dat"),
    "mammographic": ("common", "classification/mammographic/mammographic.dat"),
    "marketing": ("keel", "balanced/raw/marketing.dat"),
    "monk-2": ("common", "classification/monk-2/monk-2.dat"),
    "movement_libras": ("common", "classification/movement_libras/movement_libras.dat"),
    "newthyroid": ("common", "classification/newthyroid/newthyroid.dat"),
    "page-blocks": ("common", "classification/page-blocks/page-blocks.dat"),
    "penbased": ("keel", "balanced/raw/penbased.dat"),
    "phoneme": ("keel", "balanced/raw/phoneme.dat"),
    "pima": ("keel", "balanced/raw/pima.dat"),
    "ring": ("keel", "balanced/raw/ring.dat"),
    "satimage": ("keel", "balanced/raw/satimage.dat"),
    "segment": ("common", "classification/segment/segment.dat"),
    "sonar": ("keel", "balanced/raw/sonar.dat"),
    "spambase": ("keel", "balanced/raw/spambase.dat"),
    "spectfheart": ("common", "classification/spectfheart/spectfheart.dat"),
    "tae": ("common", "classification/tae/tae.dat"),
    "texture": ("keel", "balanced/raw/texture.dat"),
    "titanic": ("keel", "balanced/raw/titanic.dat"),
    "twonorm": ("keel", "balanced/raw/twonorm.dat"),
    "vehicle": ("keel", "balanced/raw/vehicle.dat"),
    "vowel": ("common", "classification/vowel/vowel.dat"),
    "wdbc": ("common", "classification/wdbc/wdbc.dat"),
    "wine": ("keel", "balanced/raw/wine.dat"),
    "winequality-red": ("uci-winequality", "regression/winequality_red/winequality-red.csv"),
    "wisconsin": ("common", "classification/wisconsin/wisconsin.dat"),
}


def fetch_wheels(workdir):
    wheels = {}
    for key, pkg in (("keel", "keel-ds==0.2.5"), ("common", "common-datasets==0.3.10")):
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", pkg, "-d", workdir],
                       check=True)
    for whl in pathlib.Path(workdir).glob("*.whl"):
        if whl.name.startswith("keel_ds"):
            wheels["keel"] = zipfile.ZipFile(whl)
        elif whl.name.startswith("common_datasets"):
            wheels["common"] = zipfile.ZipFile(whl)
    return wheels


def is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def keel_from_rows(name, rows, attr_names=None):
    """Header + data for a label-last table of string cells."""
    ncol = len(rows[0])
    attr_names = attr_names or [f"A{i + 1}" for i in range(ncol - 1)] + ["Class"]
    lines = [f"@relation {name}"]
    for c in range(ncol):
        col = [r[c] for r in rows if r[c] not in ("?", "")]
        if c < ncol - 1 and all(is_number(v) for v in col):
            vals = [float(v) for v in col]
            lines.append(f"@attribute {attr_names[c]} real [{min(vals)}, {max(vals)}]")
        else:
            seen = []
            for v in col:
                if v not in seen:
                    seen.append(v)
            lines.append(f"@attribute {attr_names[c]} {{{','.join(seen)}}}")
    lines.append(f"@inputs {', '.join(attr_names[:-1])}")
    lines.append(f"@outputs {attr_names[-1]}")
    lines.append("@data")
    lines.extend(", ".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def convert(name, wheels):
    source, member = SOURCES[name]
    if source == "keel":
        text = wheels["keel"].read(f"keel_ds/data/{member}").decode()
        rows = [[t.strip() for t in line.split(",")] for line in text.splitlines() if line.strip()]
        return keel_from_rows(name, rows)
    text = wheels["common"].read(f"common_datasets/data/{member}").decode()
    if source == "common":
        return text if text.endswith("\n") else text + "\n"
    if source == "uci-hepatitis":
        # UCI layout: class first (1 = DIE, 2 = LIVE); move it last
        rows = []
        for line in text.splitlines():
            if line.strip():
                cells = [t.strip() for t in line.split(",")]
                label = {"1": "DIE", "2": "LIVE"}[cells[0]]
                rows.append(cells[1:] + [label])
        return keel_from_rows(name, rows)
    if source == "uci-winequality":
        reader = csv.reader(io.StringIO(text), delimiter=";")
        header = next(reader)
        names = [h.strip().replace(" ", "_") for h in header]
        rows = [[t.strip() for t in r] for r in reader if r]
        return keel_from_rows(name, rows, names)
    raise ValueError(source)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--all", action="store_true", help="write every available benchmark set")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheels = fetch_wheels(tmp)
        names = sorted(SOURCES) if args.all else FIXTURES
        for name in names:
            (out / f"{name}.dat").write_text(convert(name, wheels))
            print(f"wrote {out / (name + '.dat')}")


if __name__ == "__main__":
    main()
