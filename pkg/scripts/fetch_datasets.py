"""Fetch the benchmark datasets into ``data/`` as plain CSV files.

The files come from PyPI distributions that bundle them, so only a package
index is needed:

* ``keel-ds``: Pima Indians diabetes (768 x 8) and Statlog Heart (270 x 13)
  in KEEL's repackaging of the UCI files.
* ``pydataset``: the R ``survival`` package data sets pbc, lung, colon and
  veteran.

Parkinsons is not bundled by any package we know of. Place a UCI
``parkinsons.data`` file in ``data/`` manually and rerun to convert it.

Usage::

    python scripts/fetch_datasets.py [--dest data]
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tarfile
import tempfile
import zipfile

PIMA_COLS = ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age", "class"]
HEART_COLS = ["age", "sex", "chest", "resting_bp", "cholesterol", "fasting_sugar",
              "ecg", "max_hr", "angina", "oldpeak", "slope", "vessels", "thal", "class"]


def pip_download(package, workdir):
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d",
                    str(workdir), package], check=True)
    return next(pathlib.Path(workdir).glob("*"))


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def keel(dest, tmp):
    whl = zipfile.ZipFile(pip_download("keel-ds==0.2.5", tmp / "keel"))
    for name, cols in (("pima", PIMA_COLS), ("heart", HEART_COLS)):
        text = whl.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
        rows = [line.split(",") for line in text.splitlines() if line.strip()]
        out = "statlog_heart" if name == "heart" else name
        write(dest / f"{out}.csv", cols, [[c.strip() for c in r] for r in rows])


def read_r_csv(data):
    rows = list(csv.reader(io.StringIO(data)))
    header = rows[0][1:]
    return header, [r[1:] for r in rows[1:]]


def survival(dest, tmp):
    sdist = tarfile.open(pip_download("pydataset==0.2.0", tmp / "pyd"))
    inner = next(m for m in sdist.getmembers() if m.name.endswith("resources.tar.gz"))
    res = tarfile.open(fileobj=sdist.extractfile(inner))

    def load(name):
        member = res.getmember(f"resources/rdata/csv/survival/{name}.csv")
        return read_r_csv(res.extractfile(member).read().decode())

    # pbc: status 0 censored, 1 transplant (censored), 2 dead
    h, rows = load("pbc")
    keep = [c for c in h if c not in ("id", "time", "status")]
    out = [[r[h.index("time")], "1" if r[h.index("status")] == "2" else "0"]
           + [r[h.index(c)] for c in keep] for r in rows]
    write(dest / "pbc.csv", ["time", "event"] + keep, out)

    # lung: status 1 censored, 2 dead; institution code is not a covariate
    h, rows = load("lung")
    keep = [c for c in h if c not in ("inst", "time", "status")]
    out = [[r[h.index("time")], str(int(r[h.index("status")]) - 1)]
           + [r[h.index(c)] for c in keep] for r in rows]
    write(dest / "lung.csv", ["time", "event"] + keep, out)

    # veteran (Lung2): status 1 dead, 0 censored
    h, rows = load("veteran")
    keep = [c for c in h if c not in ("time", "status")]
    out = [[r[h.index("time")], r[h.index("status")]] + [r[h.index(c)] for c in keep]
           for r in rows]
    write(dest / "veteran.csv", ["time", "event"] + keep, out)

    # colon: two records per patient; etype 1 recurrence, 2 death
    h, rows = load("colon")
    keep = [c for c in h if c not in ("id", "study", "status", "time", "etype")]
    for etype, name in (("1", "colon_recurrence"), ("2", "colon_death")):
        out = [[r[h.index("time")], r[h.index("status")]] + [r[h.index(c)] for c in keep]
               for r in rows if r[h.index("etype")] == etype]
        write(dest / f"{name}.csv", ["time", "event"] + keep, out)


def parkinsons(dest):
    src = dest / "parkinsons.data"
    if not src.exists():
        print("parkinsons: data/parkinsons.data not found, skipped")
        return
    rows = list(csv.reader(open(src)))
    h = rows[0]
    keep = [c for c in h if c not in ("name",)]
    write(dest / "parkinsons.csv", keep, [[r[h.index(c)] for c in keep] for r in rows[1:]])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    dest = pathlib.Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as t:
        tmp = pathlib.Path(t)
        keel(dest, tmp)
        survival(dest, tmp)
    parkinsons(dest)


if __name__ == "__main__":
    main()
