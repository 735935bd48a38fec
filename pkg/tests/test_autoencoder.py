import numpy as np
import pytest

from setback import autoencoder as ae


@pytest.fixture(scope="module")
def subspace_data():
    rng = np.random.default_rng(1)
    latent = rng.normal(size=(200, 3))
    basis = rng.normal(size=(3, 20))
    return latent @ basis


def test_training_is_deterministic(subspace_data):
    a = ae.train(subspace_data, seed=0)
    b = ae.train(subspace_data, seed=0)
    assert np.array_equal(a.params, b.params)
    assert np.array_equal(a.mean, b.mean)


def test_training_descends(subspace_data):
    w = ae.train(subspace_data, seed=0)
    assert w.training_losses[-1] <= w.training_losses[0]


def test_losses_monotone_under_accepted_steps(subspace_data):
    w = ae.train(subspace_data, seed=0)
    assert (np.diff(w.training_losses) <= 0.0).all()


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_subspace_reconstruction_rmse(subspace_data, seed):
    w = ae.train(subspace_data, seed=seed)
    assert ae.reconstruction_rmse(w, subspace_data) < 0.05


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(5)
    batch = rng.normal(size=(5, 20))
    # weights after a couple of steps, so the surface is not at the random init
    w = ae.train(np.vstack([batch] * 4), seed=3, max_iters=3)
    g = ae.gradient(w, batch)
    Z = (batch - w.mean) / w.std
    theta = w.params
    h = 1e-5
    fd = np.empty_like(g)
    for i in range(len(theta)):
        up = theta.copy()
        up[i] += h
        dn = theta.copy()
        dn[i] -= h
        fd[i] = (ae._loss(up, Z) - ae._loss(dn, Z)) / (2.0 * h)
    rel = np.abs(g - fd) / np.maximum(np.abs(g) + np.abs(fd), 1e-6)
    assert rel.max() < 1e-5


def test_gradient_of_duplicated_batch_matches():
    rng = np.random.default_rng(6)
    batch = rng.normal(size=(7, 20))
    w = ae.train(np.vstack([batch] * 3), seed=0, max_iters=2)
    g1 = ae.gradient(w, batch)
    g2 = ae.gradient(w, np.vstack([batch, batch]))
    assert np.allclose(g1, g2, rtol=1e-12, atol=1e-12)


def test_near_zero_gradient_at_stationary_reconstruction():
    # a zero-variance batch standardizes to all-zeros; once training has
    # driven the reconstruction onto it, the gradient vanishes
    data = np.tile(np.linspace(1.0, 3.0, 20), (30, 1))
    w = ae.train(data, seed=1)
    assert ae.reconstruction_rmse(w, data) < 1e-6
    assert np.linalg.norm(ae.gradient(w, data)) < 1e-8


def test_passthrough_below_minimum_samples():
    rng = np.random.default_rng(2)
    data = rng.normal(size=(10, 20))
    w = ae.train(data, seed=0)
    assert w.passthrough
    z = data[3]
    expected = ((z - w.mean) / w.std)[:6]
    assert np.allclose(ae.encode(w, z), expected)


def test_encode_is_pure_and_deterministic(subspace_data):
    w = ae.train(subspace_data, seed=0)
    z = subspace_data[0]
    a = ae.encode(w, z)
    b = ae.encode(w, z)
    assert np.array_equal(a, b)
    assert a.shape == (6,)


def test_equal_standardized_inputs_share_codes(subspace_data):
    w = ae.train(subspace_data, seed=0)
    z = subspace_data[4]
    assert np.array_equal(ae.encode(w, z), ae.encode(w, z.copy()))


def test_encode_batch_matches_single(subspace_data):
    w = ae.train(subspace_data, seed=0)
    batch_codes = ae.encode(w, subspace_data[:5])
    for i in range(5):
        assert np.allclose(batch_codes[i], ae.encode(w, subspace_data[i]))


def test_encode_rejects_bad_dimension(subspace_data):
    w = ae.train(subspace_data, seed=0)
    with pytest.raises(ValueError):
        ae.encode(w, np.zeros(19))


def test_finite_outputs_on_extreme_inputs(subspace_data):
    w = ae.train(subspace_data, seed=0)
    wild = np.full(20, 1e6)
    assert np.isfinite(ae.encode(w, wild)).all()


def test_zero_variance_features_get_unit_scale():
    rng = np.random.default_rng(3)
    data = rng.normal(size=(40, 20))
    data[:, 7] = 2.5
    w = ae.train(data, seed=0, max_iters=1)
    assert w.std[7] == 1.0


def test_histories_shape_checked():
    with pytest.raises(ValueError):
        ae.train(np.zeros((30, 19)), seed=0)


def test_weight_snapshot_round_trip(tmp_path, subspace_data):
    w = ae.train(subspace_data, seed=0)
    path = tmp_path / "weights.npz"
    ae.save_weights(w, path)
    back = ae.load_weights(path)
    assert np.array_equal(back.params, w.params)
    assert np.array_equal(back.mean, w.mean)
    assert not back.passthrough
    assert np.array_equal(ae.encode(back, subspace_data[:4]),
                          ae.encode(w, subspace_data[:4]))
