#!/usr/bin/env python3
"""Smoke test for the ragprune_py extension module.

Builds the cdylib with cargo, stages it as an importable module, and
exercises the bound surface end to end. Plain asserts; any failure is a
nonzero exit.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    subprocess.run(["cargo", "build", "-p", "ragprune-py"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "debug" / "libragprune_py.so"
    stage = Path(tempfile.mkdtemp(prefix="ragprune_py_"))
    shutil.copy2(lib, stage / "ragprune_py.so")
    sys.path.insert(0, str(stage))
    import ragprune_py

    return ragprune_py


def make_records():
    """20 documents: 17 spread over two nearby blobs, 3 far strays."""
    records = []
    for i in range(17):
        center = 0.0 if i % 2 == 0 else 2.0
        t = float(i)
        vec = [
            center + 0.05 * t,
            center - 0.03 * t + 0.1,
            center + 0.02 * t * t * 0.1,
        ]
        records.append((f"doc{i:02d}", f"body of document {i}", vec))
    for i, far in enumerate([25.0, -30.0, 40.0]):
        records.append((f"far{i}", f"stray document {i}", [far, far * 0.5, -far]))
    return records


def check_numerics(m):
    assert abs(m.percentile_threshold([float(v) for v in range(1, 21)], 15.0) - 3.85) < 1e-12

    threshold, outliers = m.detect_outliers(
        [float(v) for v in range(1, 21)],
        [f"d{v}" for v in range(1, 21)],
        15.0,
    )
    assert abs(threshold - 3.85) < 1e-12
    assert outliers == ["d1", "d2", "d3"]

    points = []
    for i in range(60):
        base = 0.0 if i % 2 == 0 else 10.0
        points.append([base + 0.01 * i, base - 0.007 * i])
    model = m.gmm_fit(points, 2, seed=7)
    assert model.converged
    assert len(model.weights) == 2
    assert abs(sum(model.weights) - 1.0) < 1e-9
    assert len(model.means) == 2 and len(model.means[0]) == 2
    assert len(model.covariances) == 2 and len(model.covariances[0]) == 2
    centers = sorted(mean[0] for mean in model.means)
    assert abs(centers[0] - 0.3) < 1.0 and abs(centers[1] - 10.3) < 1.0
    lls = model.log_likelihood(points)
    assert len(lls) == 60 and all(math.isfinite(v) for v in lls)
    labels = model.predict(points)
    assert set(labels) == {0, 1}
    assert "GmmModel(k=2" in repr(model)

    history = model.log_likelihood_history
    assert all(b >= a - 1e-9 for a, b in zip(history, history[1:]))

    mean, components, variance, transformed = m.pca_fit_transform(points, 1)
    assert len(mean) == 2
    assert len(components) == 1 and len(components[0]) == 2
    assert len(variance) == 1 and variance[0] > 0.0
    assert len(transformed) == 60 and len(transformed[0]) == 1

    assert m.cell_seed(3, 4, 2) == m.cell_seed(3, 4, 2)
    assert m.cell_seed(3, 4, 2) != m.cell_seed(3, 5, 2)


def check_prompt(m):
    rendered = m.build_prompt(["alpha doc", "beta doc"], "what is noise?")
    assert rendered.count("</s>") == 3
    assert rendered.startswith(
        "You are a friendly chatbot who responds to the user's question"
    )
    assert "Context:\nalpha doc\nbeta doc\n</s>" in rendered
    assert rendered.endswith("what is noise?</s>")
    assert m.whitespace_token_count("one two  three\nfour") == 4


def check_evaluation(m):
    assert m.cosine_similarity([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0
    assert abs(m.cosine_similarity([1.0, 0.0], [0.0, 1.0])) < 1e-12

    corpus = ["cat sat", "cat ran", "dog ran"]
    assert abs(m.tfidf_similarity("cat sat", "cat sat", corpus) - 1.0) < 1e-9
    assert m.tfidf_similarity("cat", "dog", corpus) == 0.0

    assert m.improvement(0.6, 0.6) == 0.0
    assert abs(m.improvement(0.9, 0.6) - 0.5) < 1e-12
    assert m.improvement(0.9, 0.0) is None

    try:
        m.cosine_similarity([1.0, 2.0], [1.0])
    except ValueError as err:
        assert "dimension" in str(err)
    else:
        raise AssertionError("dimension mismatch should raise ValueError")


def check_pipeline(m):
    records = make_records()
    query = [1.0, 0.9, 1.1]

    ranked = m.top_k(records, query, 5)
    assert len(ranked) == 5
    scores = [score for _, score in ranked]
    assert scores == sorted(scores, reverse=True)

    result = m.filter_context(records, query, seed=3)
    kept = result["kept_ids"]
    dropped = result["dropped_ids"]
    assert len(kept) + len(dropped) == 20
    assert len(result["original_ids"]) == len(kept)
    assert len(result["kept_texts"]) == len(kept)
    assert result["total_cells"] == 6
    assert len(result["cells"]) == 6
    for cell in result["cells"]:
        assert cell["clusters"] in (4, 5, 6)
        assert cell["pca_dim"] in (2, 3)
        assert math.isfinite(cell["threshold"])
    for doc_id, votes in result["vote_counts"].items():
        assert 1 <= votes <= 6
        assert (votes >= 2) == (doc_id in dropped)

    again = m.filter_context(records, query, seed=3)
    assert again["kept_ids"] == kept
    assert again["dropped_ids"] == dropped

    narrow = m.filter_context(
        records,
        query,
        method="weighted_sum",
        alpha=0.9,
        clusters=[2],
        pca_dims=[1],
        min_freq=1,
        num_docs=10,
        seed=11,
    )
    assert len(narrow["kept_ids"]) + len(narrow["dropped_ids"]) == 10
    assert narrow["total_cells"] == 1

    try:
        m.filter_context(records, query, percentile=150.0)
    except ValueError as err:
        assert "percentile" in str(err)
    else:
        raise AssertionError("out-of-range percentile should raise ValueError")


def main():
    m = load_module()
    check_numerics(m)
    check_prompt(m)
    check_evaluation(m)
    check_pipeline(m)
    print("smoke test passed")


if __name__ == "__main__":
    main()
