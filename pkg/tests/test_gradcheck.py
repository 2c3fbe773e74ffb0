import numpy as np
import pytest

from fairembed.errors import GradCheckError
from fairembed.nn import DenseNet, grad_check


def test_quadratic_passes():
    x = np.array([3.0])

    def f():
        return float(x[0] ** 2), [2 * x]

    report = grad_check(f, [x], tolerance=1e-4)
    assert report.passed
    assert report.max_relative_error < 1e-8


def test_corrupted_gradient_fails():
    x = np.array([3.0])

    def f():
        return float(x[0] ** 2), [4 * x]  # scaled x2

    report = grad_check(f, [x], tolerance=1e-4)
    assert not report.passed


def test_nondeterministic_function_is_rejected():
    x = np.array([1.0])
    rng = np.random.default_rng(0)

    def f():
        return float(x[0] + rng.normal()), [np.ones(1)]

    with pytest.raises(GradCheckError):
        grad_check(f, [x])


def test_dense_net_with_dropout_under_fixed_seed():
    net = DenseNet([3, 4, 2], rng=np.random.default_rng(0), dropout=0.3,
                   dtype=np.float64)
    x = np.random.default_rng(1).normal(size=(6, 3))
    upstream = np.random.default_rng(2).normal(size=(6, 2))

    def f():
        out = net.forward(x, mode="train", rng=np.random.default_rng(42))
        loss = float((out * upstream).sum())
        _, grads = net.backward(upstream)
        return loss, net.flat_grads(grads)

    report = grad_check(f, net.params(), tolerance=1e-4)
    assert report.passed, report.per_param
