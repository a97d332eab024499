import json

import numpy as np
import pytest

from dmdif import objective

from conftest import central_diff


def test_paper_instance_shape_and_rank(paper_instance):
    p = paper_instance
    assert (p.n, p.d) == (10, 100)
    assert p.a.shape == (10, 20, 100)
    for ai in p.a:
        s = np.linalg.svd(ai, compute_uv=False)
        assert np.all(s[:15] > 1e-10 * s[0])
        assert np.all(s[15:] <= 1e-10 * s[0])
    assert p.eig_min > 1e-8 * p.eig_max


def test_paper_instance_is_reproducible():
    a = objective.generate_paper_instance(11, n=3, d=8, rows=5, rank=4)
    b = objective.generate_paper_instance(11, n=3, d=8, rows=5, rank=4)
    assert a.digest() == b.digest()
    assert np.array_equal(a.x_star, b.x_star)
    assert a.digest() != objective.generate_paper_instance(12, n=3, d=8, rows=5, rank=4).digest()


def test_stream_order_documented():
    # u, then w_1..w_n, then (G1, G2) per agent, all from PCG64(seed)
    seed, n, d, rows, rank = 3, 2, 4, 3, 2
    rng = np.random.default_rng(seed)
    u = 10.0 + rng.standard_normal(d)
    w = [rng.standard_normal(d) for _ in range(n)]
    a0 = rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, d))
    a0 *= 3.5 / np.linalg.norm(a0, 2)
    p = objective.generate_paper_instance(seed, n=n, d=d, rows=rows, rank=rank)
    assert np.allclose(p.a[0], a0, rtol=0, atol=1e-14)
    assert np.allclose(p.b[0], a0 @ (u + w[0]), rtol=0, atol=1e-12)


def test_optimum_residual(paper_instance):
    p = paper_instance
    assert np.linalg.norm(p.grad(p.x_star)) <= 1e-8 * (1 + np.linalg.norm(p.stacked_a.T @ p.stacked_b))
    assert np.all(p.x_star > 0)


def test_optimum_local_probe(paper_instance):
    p = paper_instance
    base = p.value(p.x_star)
    assert base == pytest.approx(p.f_star)
    for j in range(p.d):
        for eps in (1e-3, -1e-3):
            x = p.x_star.copy()
            x[j] += eps
            assert p.value(x) >= base


def test_optimum_unique(paper_instance, rng):
    p = paper_instance
    for _ in range(1000):
        y = p.x_star + rng.standard_normal(p.d) * rng.choice([1e-2, 1.0, 10.0])
        assert p.global_gap(y) > 0


def test_scalar_instance():
    p = objective.generate_paper_instance(0, n=1, d=1, rows=1, rank=1)
    a, b = p.a[0, 0, 0], p.b[0, 0]
    assert p.x_star[0] == pytest.approx(b / a)
    assert p.eig_min > 0


def test_rank_too_large():
    with pytest.raises(ValueError):
        objective.generate_paper_instance(0, d=10, rows=5, rank=6)


def test_not_strongly_convex_asks_reseed():
    with pytest.raises(objective.CertificateError, match="reseed"):
        objective.generate_paper_instance(0, n=2, d=10, rows=3, rank=3)


def test_local_grad_examples():
    p = objective.build_instance([np.eye(3), [[1.0, 2.0, 0.0]]], [np.zeros(3), [5.0]])
    x = np.array([0.3, -1.2, 4.0])
    assert np.allclose(p.local_grad(0, x), x)
    # [1, 2, 0] @ u = 5 at u = (1, 2, 7)
    assert np.allclose(p.local_grad(1, [1.0, 2.0, 7.0]), 0.0)
    with pytest.raises(IndexError):
        p.local_grad(2, x)


def test_local_grad_finite_differences(small_instance, rng):
    p = small_instance
    for i, loc in enumerate(p.locals):
        for _ in range(25):
            x = rng.normal(0, 3, p.d)
            g = p.local_grad(i, x)
            assert np.linalg.norm(central_diff(loc.value, x) - g) <= 1e-5 * max(1, np.linalg.norm(g))


def test_stacked_grad(small_instance, rng):
    p = small_instance
    x = rng.normal(0, 2, (p.n, p.d))
    g = p.stacked_grad(x)
    fd = np.stack([central_diff(loc.value, x[i]) for i, loc in enumerate(p.locals)])
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-6)
    assert np.array_equal(p.stacked_grad(x.reshape(-1)), g.reshape(-1))
    with pytest.raises(ValueError):
        p.stacked_grad(np.zeros(p.n * p.d + 1))


def test_stacked_grad_at_local_minimizers():
    u = [np.array([1.0, 2.0]), np.array([-1.0, 0.5])]
    a = [np.array([[1.0, 1.0]]), np.array([[2.0, -1.0], [0.0, 1.0]])]
    p = objective.build_instance(a, [ai @ ui for ai, ui in zip(a, u)])
    assert np.allclose(p.stacked_grad(np.stack(u)), 0.0)


def test_consensus_gradient_sums_to_zero(paper_instance):
    p = paper_instance
    g = p.stacked_grad(np.tile(p.x_star, (p.n, 1)))
    assert np.linalg.norm(g.sum(axis=0)) <= 1e-8 * (1 + np.abs(g).max())
    assert np.linalg.norm(g) > 1.0  # local gradients do not vanish individually


def test_global_grad_is_sum_of_locals(paper_instance, rng):
    p = paper_instance
    for _ in range(100):
        x = rng.normal(10, 3, p.d)
        total = sum(p.local_grad(i, x) for i in range(p.n))
        assert np.max(np.abs(p.grad(x) - total)) <= 1e-10 * (1 + np.abs(total).max())


def test_global_gap_examples(paper_instance, rng):
    # F(x) = x^2 as 0.5 (sqrt(2) x - 0)^2
    p = objective.build_instance([[[np.sqrt(2.0)]]], [[0.0]])
    assert p.global_gap([2.0]) == pytest.approx(4.0)
    q = paper_instance
    assert abs(q.global_gap(q.x_star)) <= 1e-9
    x = rng.normal(10, 5, (1000, q.d))
    assert min(q.global_gap(xi) for xi in x) >= -1e-9
    xi = x[0]
    assert q.global_gap(xi) == pytest.approx(q.value(xi) - q.f_star, rel=1e-9)


def test_padding_rows_keeps_objective():
    p = objective.build_instance([[[1.0, 0.0], [0.0, 1.0]], [[1.0, 1.0]]], [[1.0, 2.0], [0.0]])
    assert p.a.shape == (2, 2, 2)
    x = np.array([0.4, -0.7])
    assert p.locals[1].value(x) == pytest.approx(0.5 * (x.sum()) ** 2)


def test_json_round_trip(tmp_path, small_instance):
    path = tmp_path / "p.json"
    small_instance.save(path)
    doc = json.loads(path.read_text())
    assert doc["format"] == objective.FORMAT and doc["meta"]["seed"] == 5
    assert len(doc["locals"]) == 4 and len(doc["locals"][0]["a"]) == 4
    back = objective.load(path)
    assert back.digest() == small_instance.digest()
    assert np.allclose(back.x_star, small_instance.x_star, atol=1e-12)


def test_load_rejects_foreign_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"format": "other"}')
    with pytest.raises(ValueError):
        objective.load(path)
