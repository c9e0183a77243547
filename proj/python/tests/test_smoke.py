import math

import numpy as np
import pytest

import infosense as isn


def test_shape_terms():
    assert isn.shape_term(2.0) == pytest.approx(1.4189385, abs=1e-6)
    assert isn.shape_term(1.0) == pytest.approx(1.3465736, abs=1e-6)
    assert isn.gaussian_shape_term() == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-12)
    with pytest.raises(ValueError):
        isn.shape_term(0.0)


def test_gg_pdf_and_sampling():
    p = isn.GGParams(1.0, 0.0, 1.0)
    x = np.linspace(-20, 20, 40001)
    assert isn.gg_pdf(x, p).sum() * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-4)
    assert isn.gg_cdf(np.array([0.0]), p)[0] == pytest.approx(0.5)
    s = isn.gg_sample(isn.GGParams(0.49), 65536, 7)
    assert s.shape == (65536,)
    assert np.var(s) == pytest.approx(1.0, rel=0.1)
    est = isn.estimate_alpha(s)
    assert est.alpha == pytest.approx(0.49, abs=0.05)


def test_knn_entropy_gaussian():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((4000, 2))
    r = isn.knn_entropy(pts, 3)
    assert r.entropy == pytest.approx(2 * isn.gaussian_shape_term(), abs=0.1)


def test_entropy_formulas():
    assert isn.pca_entropy_white(1.0, 4) == pytest.approx(4 * isn.shape_term(1.0))
    assert isn.random_entropy_white(2.0, 64, 8) == pytest.approx(8 * isn.shape_term(2.0), abs=1e-9)
    curve = isn.hybrid_gap_curve(0.32, 1.0, 65536, 10)
    assert len(curve) == 10
    assert curve[0] == pytest.approx(isn.hybrid_gap(0.32, 1.0, 65536, 1))


def test_model_capacity_allocation():
    model = isn.natural_image_model(64, 64, 0.32)
    assert model.total_dim == 4096
    assert sum(b.size for b in model.bands) == 4096
    diagram = isn.capacity_diagram(model, 0.0)
    alloc = isn.allocate(diagram, 400)
    assert sum(alloc) == 400
    assert all(a <= b.size for a, b in zip(alloc, model.bands))
    plan = isn.apply_threshold_rule(alloc, model)
    assert len(plan.full_bands) + len(plan.partial_bands) + len(plan.skipped_bands) == len(model.bands)


def test_transforms_round_trip():
    img = np.random.default_rng(2).random((16, 16))
    assert np.allclose(isn.dct2_inverse(isn.dct2_forward(img)), img, atol=1e-12)
    assert np.allclose(isn.haar2_inverse(isn.haar2_forward(img)), img, atol=1e-12)


@pytest.mark.parametrize("scheme", ["dct-linear", "dct-zigzag", "romberg", "random", "bandwise"])
def test_scheme_adjoint(scheme):
    model = isn.calibrate_to_pixel_variance(isn.natural_image_model(16, 16, 0.32), 1600.0)
    op = isn.build_scheme(scheme, model, 64, seed=3, n_dct=8)
    assert (op.in_dim, op.out_dim) == (256, 64)
    rng = np.random.default_rng(4)
    x = rng.standard_normal(256)
    y = rng.standard_normal(64)
    assert op.apply(x) @ y == pytest.approx(x @ op.adjoint(y), rel=1e-9)


def test_reconstruction_and_psnr():
    img = isn.synthesize_multires_image(32, 0.49, 5)
    model = isn.calibrate_to_pixel_variance(isn.natural_image_model(32, 32, 0.49), 1600.0)
    op = isn.build_scheme("bandwise", model, 1024, seed=1)
    y = op.apply(img.reshape(-1))
    rec = isn.tv_min_recon(op, y, max_iter=200)
    db, exact = isn.psnr(img, rec.image)
    assert exact or db > 60
    lin_op = isn.build_scheme("dct-linear", model, 256)
    lin = isn.linear_recon(lin_op, lin_op.apply(img.reshape(-1)))
    assert lin.shape == (32, 32)
    assert isn.psnr(img, lin)[0] > 10
    assert isn.psnr(img, img)[1]


def test_toy_demo():
    mix = isn.default_mixture()
    w, h = isn.infomax_projection(mix, 180)
    assert np.linalg.norm(w) == pytest.approx(1.0)
    assert h >= isn.projection_entropy(mix, isn.pca_direction(mix)) - 1e-9
    s = isn.toy_summary(mix, 2000, 50, 0)
    assert s["infomax"][0] >= s["pca"][0]
    assert isn.Gmm2D.from_json(mix.to_json()).covariance() == pytest.approx(mix.covariance())
