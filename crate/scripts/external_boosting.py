#!/usr/bin/env python3
"""Train a histogram gradient-boosting classifier on a texpyr feature CSV.

    python3 scripts/external_boosting.py features.csv [--ratio 0.7] [--seed 0] [--max-iter 1500]
        [--min-samples-leaf 20]

The CSV is what `texpyr extract` writes: source_id,label,<feature columns>.
Features are min-max scaled with training statistics only, then binned into
10 bins by the booster. Prints one accuracy line; exit code 2 on a schema error.
"""

import argparse
import sys

import numpy as np
import pandas as pd
from sklearn.ensemble import HistGradientBoostingClassifier
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import MinMaxScaler

FAMILIES = ("bit_", "haralick_", "glcm_", "info_")


def load(path):
    df = pd.read_csv(path)
    if list(df.columns[:2]) != ["source_id", "label"]:
        sys.exit("schema error: first columns must be source_id,label")
    features = df.columns[2:]
    bad = [c for c in features if not c.startswith(FAMILIES)]
    if bad or len(features) == 0:
        sys.exit(f"schema error: unexpected columns {bad[:3]}")
    return df[features].to_numpy(dtype=float), df["label"].to_numpy()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--ratio", type=float, default=0.7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-iter", type=int, default=1500)
    ap.add_argument("--min-samples-leaf", type=int, default=20)
    args = ap.parse_args()

    x, y = load(args.csv)
    x_tr, x_te, y_tr, y_te = train_test_split(
        x, y, train_size=args.ratio, stratify=y, random_state=args.seed
    )
    scaler = MinMaxScaler().fit(x_tr)
    clf = HistGradientBoostingClassifier(
        max_bins=10,
        max_iter=args.max_iter,
        min_samples_leaf=args.min_samples_leaf,
        random_state=args.seed,
    )
    clf.fit(scaler.transform(x_tr), y_tr)
    acc = float(np.mean(clf.predict(scaler.transform(x_te)) == y_te))
    print(f"hist_gradient_boosting rows={len(y)} dims={x.shape[1]} accuracy={acc:.4f}")


if __name__ == "__main__":
    main()
