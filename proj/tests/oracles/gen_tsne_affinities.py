"""Reference t-SNE input affinities from scikit-learn.

Writes tests/data/tsne_affinities.json holding a seeded 30 x 5 input and
the symmetrized joint probabilities at perplexity 5.
"""
import json
import pathlib

import numpy as np
from scipy.spatial.distance import squareform
from sklearn.manifold._t_sne import _joint_probabilities
from sklearn.metrics import pairwise_distances

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def main():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((30, 5)) * np.array([1.0, 2.0, 0.5, 3.0, 1.5])
    perplexity = 5.0
    distances = pairwise_distances(x, squared=True)
    p = squareform(_joint_probabilities(distances, perplexity, 0))
    out = {"perplexity": perplexity, "x": x.tolist(), "p": p.tolist()}
    (DATA / "tsne_affinities.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
