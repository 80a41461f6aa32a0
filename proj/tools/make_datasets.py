#!/usr/bin/env python3
"""Writes the benchmark datasets under data/ as plain CSV files.

iris, wine and digits are exported from scikit-learn's bundled copies of
the UCI originals. balance is regenerated exactly: the balance-scale
dataset is the full 5^4 enumeration of (left-weight, left-distance,
right-weight, right-distance) labeled by the sign of the torque
difference. car is a rule-based stand-in with the same shape as the UCI
car evaluation data (full factorial over 6 ordinal attributes,
deterministic labels, one class with a constant attribute); the original
file is not redistributable here, so error rates on it are not
comparable with published ones.

seeds is not bundled anywhere offline; drop the UCI seeds dataset at
data/seeds.csv (header: area,perimeter,compactness,kernel_length,
kernel_width,asymmetry,groove_length,variety) to include it.
"""

import csv
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def write_csv(name, header, rows):
    path = os.path.join(OUT_DIR, name)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def export_sklearn():
    from sklearn import datasets

    for name, loader in [("iris", datasets.load_iris), ("wine", datasets.load_wine)]:
        bunch = loader()
        header = [c.replace(" ", "_").replace("/", "_") for c in bunch.feature_names] + ["class"]
        rows = [list(x) + [bunch.target_names[y]] for x, y in zip(bunch.data, bunch.target)]
        write_csv(f"{name}.csv", header, rows)

    digits = datasets.load_digits()
    header = [f"px{i}" for i in range(64)] + ["digit"]
    rows = [[int(v) for v in x] + [int(y)] for x, y in zip(digits.data, digits.target)]
    write_csv("digits.csv", header, rows)


def make_balance():
    rows = []
    for lw in range(1, 6):
        for ld in range(1, 6):
            for rw in range(1, 6):
                for rd in range(1, 6):
                    left, right = lw * ld, rw * rd
                    label = "L" if left > right else ("B" if left == right else "R")
                    rows.append([lw, ld, rw, rd, label])
    write_csv("balance.csv",
              ["left_weight", "left_distance", "right_weight", "right_distance", "class"], rows)


def make_car():
    def label(buying, maint, doors, persons, lug, safety):
        if persons == 2 or safety == 0:
            return "unacc"
        price = buying + maint
        if price >= 5:
            return "unacc"
        comfort = (doors >= 3) + (lug >= 1) + (persons == 6)
        if comfort == 0 and safety == 1:
            return "unacc"
        if price <= 1 and safety == 2 and comfort >= 2 and lug >= 1:
            return "vgood"
        if price <= 1 and comfort >= 1:
            return "good"
        if safety == 2 or comfort >= 2 or price <= 2:
            return "acc"
        return "unacc"

    rows = []
    for buying in range(4):          # low..vhigh as 0..3
        for maint in range(4):
            for doors in (2, 3, 4, 5):
                for persons in (2, 4, 6):
                    for lug in range(3):
                        for safety in range(3):
                            rows.append([buying, maint, doors, persons, lug, safety,
                                         label(buying, maint, doors, persons, lug, safety)])
    write_csv("car.csv",
              ["buying", "maint", "doors", "persons", "lug_boot", "safety", "class"], rows)


def make_manifest():
    entries = [
        ("iris", "iris.csv", "class", "minmax"),
        ("balance", "balance.csv", "class", "minmax"),
        ("wine", "wine.csv", "class", "minmax"),
        ("car", "car.csv", "class", "minmax"),
        ("digits", "digits.csv", "digit", "prune:10, minmax"),
    ]
    if os.path.exists(os.path.join(OUT_DIR, "seeds.csv")):
        entries.insert(2, ("seeds", "seeds.csv", "variety", "minmax"))
    path = os.path.join(OUT_DIR, "benchmark.ini")
    with open(path, "w") as f:
        for name, csv_name, labelcol, preprocess in entries:
            f.write(f"[{name}]\npath = {csv_name}\nlabel = {labelcol}\n"
                    f"preprocess = {preprocess}\n\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    os.makedirs(OUT_DIR, exist_ok=True)
    export_sklearn()
    make_balance()
    make_car()
    make_manifest()
