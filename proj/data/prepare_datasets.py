#!/usr/bin/env python3
"""Rebuild the bundled CSV datasets from locally installed or downloaded packages.

Sources:
  iris, wine, wdbc  -> scikit-learn's bundled copies (sklearn/datasets/data)
  ionosphere        -> keel-ds wheel (keel_ds/data/balanced/raw/ionosphere.dat)
  glass             -> imbalanced-databases wheel (original UCI glass.data)

Usage:
  pip download keel-ds imbalanced-databases --no-deps -d /tmp/wheels
  python3 data/prepare_datasets.py /tmp/wheels
"""
import csv
import glob
import os
import sys
import zipfile

import sklearn

HERE = os.path.dirname(os.path.abspath(__file__))
SK = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")


def write(name, header, rows):
    with open(os.path.join(HERE, name), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def sklearn_csv(fname, feature_names, label_column):
    with open(os.path.join(SK, fname)) as f:
        r = csv.reader(f)
        head = next(r)
        class_names = head[2:]
        rows = [row[:-1] + [class_names[int(row[-1])]] for row in r]
    return feature_names + [label_column], rows


def wheel_member(wheels, pattern, member):
    path = glob.glob(os.path.join(wheels, pattern))[0]
    return zipfile.ZipFile(path).read(member).decode()


def main(wheels):
    iris = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    write("iris.csv", *sklearn_csv("iris.csv", iris, "species"))

    wine = ["alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
            "total_phenols", "flavanoids", "nonflavanoid_phenols",
            "proanthocyanins", "color_intensity", "hue",
            "od280_od315", "proline"]
    write("wine.csv", *sklearn_csv("wine_data.csv", wine, "cultivar"))

    base = ["radius", "texture", "perimeter", "area", "smoothness",
            "compactness", "concavity", "concave_points", "symmetry",
            "fractal_dimension"]
    wdbc = [f"{b}_{s}" for s in ("mean", "se", "worst") for b in base]
    write("wdbc.csv", *sklearn_csv("breast_cancer.csv", wdbc, "diagnosis"))

    text = wheel_member(wheels, "keel_ds-*.whl",
                        "keel_ds/data/balanced/raw/ionosphere.dat")
    rows = [[c.strip() for c in line.split(",")]
            for line in text.splitlines() if line.strip()]
    # KEEL drops UCI attribute 2, which is constant zero.
    names = [f"a{i:02d}" for i in range(1, 35) if i != 2]
    write("ionosphere.csv", names + ["class"], rows)

    text = wheel_member(wheels, "imbalanced_databases-*.whl",
                        "imbalanced_databases/data/glass/glass.data.txt")
    kinds = {"1": "building_float", "2": "building_non_float",
             "3": "vehicle_float", "5": "containers", "6": "tableware",
             "7": "headlamps"}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        cells = line.strip().split(",")
        rows.append(cells[1:-1] + [kinds[cells[-1]]])
    write("glass.csv", ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe", "type"], rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/tmp/wheels")
