#!/usr/bin/env python3
"""Convert a Planetoid citation dataset (ind.<name>.* pickles) to the
dataset directory layout read by `hgnn train`.

    python3 tools/planetoid_to_tsv.py --raw-dir data/planetoid --name cora --out data/cora

Writes features.tsv, labels.tsv, edges.tsv and split.json. The split is the
public one: the first 20 labelled nodes per class for training (the rows of
ind.<name>.y), the next 500 for validation and the nodes listed in
ind.<name>.test.index for test.

Features are row-normalized (each row divided by its sum) unless --no-normalize
is given. Requires numpy and scipy.
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_pickle(path):
    with open(path, "rb") as fh:
        if sys.version_info > (3, 0):
            return pickle.load(fh, encoding="latin1")
        return pickle.load(fh)


def load_planetoid(raw_dir, name):
    parts = {}
    for key in ["x", "y", "tx", "ty", "allx", "ally", "graph"]:
        parts[key] = load_pickle(raw_dir / f"ind.{name}.{key}")
    test_index = [int(line) for line in (raw_dir / f"ind.{name}.test.index").read_text().split()]
    test_sorted = np.sort(test_index)

    tx, ty = parts["tx"], parts["ty"]
    if name == "citeseer":
        # Some test ids have no features; pad them with zero rows.
        full = range(test_sorted.min(), test_sorted.max() + 1)
        tx_ext = sp.lil_matrix((len(full), tx.shape[1]))
        tx_ext[test_sorted - test_sorted.min(), :] = tx
        ty_ext = np.zeros((len(full), ty.shape[1]))
        ty_ext[test_sorted - test_sorted.min(), :] = ty
        tx, ty = tx_ext, ty_ext

    features = sp.vstack((parts["allx"], tx)).tolil()
    features[test_index, :] = features[test_sorted, :]
    onehot = np.vstack((parts["ally"], ty))
    onehot[test_index, :] = onehot[test_sorted, :]

    n_train = parts["y"].shape[0]
    split = {
        "train": list(range(n_train)),
        "validation": list(range(n_train, n_train + 500)),
        "test": sorted(int(i) for i in test_sorted),
    }
    return features.tocsr(), onehot, parts["graph"], split


def fmt(v):
    # Shortest round-trip decimal, matching the Rust writer.
    return repr(float(v))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--raw-dir", type=Path, required=True, help="directory holding ind.<name>.* files")
    ap.add_argument("--name", required=True, help="cora, citeseer or pubmed")
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--no-normalize", action="store_true", help="keep raw feature values")
    args = ap.parse_args()

    features, onehot, graph, split = load_planetoid(args.raw_dir, args.name)
    n = features.shape[0]
    if not args.no_normalize:
        sums = np.asarray(features.sum(axis=1)).ravel()
        inv = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), 0.0)
        features = sp.diags(inv) @ features
    dense = features.toarray()

    unlabelled = set(np.where(onehot.sum(axis=1) == 0)[0].tolist())
    if unlabelled:
        for key in split:
            split[key] = [i for i in split[key] if i not in unlabelled]
    width = len(str(onehot.shape[1] - 1))
    classes = [f"c{c:0{width}d}" for c in onehot.argmax(axis=1)]

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "features.tsv", "w") as fh:
        for i in range(n):
            fh.write(str(i) + "\t" + "\t".join(fmt(v) for v in dense[i]) + "\n")
    with open(args.out / "labels.tsv", "w") as fh:
        for i, c in enumerate(classes):
            fh.write(f"{i}\t{c}\n")

    seen = set()
    with open(args.out / "edges.tsv", "w") as fh:
        for u, nbrs in sorted(graph.items()):
            for v in nbrs:
                a, b = min(u, v), max(u, v)
                if a == b or b >= n or (a, b) in seen:
                    continue
                seen.add((a, b))
                fh.write(f"{a}\t{b}\n")
    (args.out / "split.json").write_text(json.dumps(split) + "\n")

    print(
        f"{args.name}: {n} nodes, {dense.shape[1]} features, {onehot.shape[1]} classes, "
        f"{len(seen)} edges, split {len(split['train'])}/{len(split['validation'])}/{len(split['test'])}",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
