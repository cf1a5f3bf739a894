import numpy as np
import pytest

import dsdl


def test_solve_spd_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(12, 12))
    m = a.T @ a + 12.0 * np.eye(12)
    rhs = rng.normal(size=(12, 3))
    x = dsdl.solve_spd(m, rhs)
    assert np.allclose(x, np.linalg.solve(m, rhs), atol=1e-10)


def test_solve_codes_normal_equations():
    rng = np.random.default_rng(1)
    d, c, b, lam = 20, 6, 4, 2.5
    dictionary = rng.normal(size=(d, c))
    features = rng.normal(size=(d, b))
    alpha, probs = dsdl.solve_codes(dictionary, features, lam)
    want = np.linalg.solve(dictionary.T @ dictionary + lam * np.eye(c),
                           dictionary.T @ features)
    assert np.allclose(alpha, want, atol=1e-10)
    assert np.allclose(probs, 1.0 / (1.0 + np.exp(-alpha)))
    assert np.allclose(dsdl.predict_probs(dictionary, features, lam), probs)


def test_solve_codes_rejects_bad_lambda():
    with pytest.raises(ValueError):
        dsdl.solve_codes(np.eye(3), np.ones((3, 1)), 0.0)


def test_average_precision():
    assert dsdl.average_precision([0.9, 0.5, 0.3], [1, 0, 1]) == pytest.approx(5.0 / 6.0)
    assert dsdl.average_precision([0.2, 0.1], [0, 0]) is None


def test_prf_suite_worked_example():
    assigned = np.array([[1, 1, 1, 0, 0], [1, 1, 0, 0, 0]], dtype=float)
    truth = np.array([[1, 1, 0, 0, 0], [1, 0, 1, 1, 0]], dtype=float)
    scores = dsdl.prf_suite(assigned, truth)
    assert scores["OP"] == pytest.approx(0.6)
    assert scores["CP"] == pytest.approx(7.0 / 12.0)
    assert scores["CF1"] == pytest.approx(28.0 / 45.0)


def test_lr_schedule():
    assert dsdl.lr_schedule(0) == pytest.approx(0.01)
    assert dsdl.lr_schedule(40) == pytest.approx(0.001)


def test_fmat_roundtrip(tmp_path):
    m = np.float32(np.random.default_rng(2).normal(size=(4, 5))).astype(float)
    path = str(tmp_path / "m.fmat")
    dsdl.save_fmat(m, path)
    assert np.array_equal(dsdl.load_fmat(path), m)


def test_train_eval_roundtrip(tmp_path):
    data = dsdl.synth_generate(d=32, c=4, n=96, seed=5, noise_sigma=0.02,
                               embed_dim=16, test_n=32)
    ckpt, curve = dsdl.train(
        data["features"], data["labels"], data["embeddings"], data["class_names"],
        epochs=40, batch_size=8, seed=5, feature="mlp", mlp_hidden=32, hidden=32)
    assert len(curve) == 40
    assert curve[-1]["L_total"] < curve[0]["L_total"]

    report = dsdl.evaluate(ckpt, data["features"], data["labels"])
    assert report["mAP"] > 0.9

    probs = ckpt.predict(data["test_features"])
    assert probs.shape == (4, 32)
    assert np.all((probs > 0) & (probs < 1))

    ckpt_dir = str(tmp_path / "ckpt")
    ckpt.save(ckpt_dir)
    loaded = dsdl.load_checkpoint(ckpt_dir)
    assert np.array_equal(loaded.predict(data["test_features"]), probs)
    assert loaded.class_names == data["class_names"]
