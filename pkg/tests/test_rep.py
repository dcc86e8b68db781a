import random

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from riley_slopes.rep import (Mat2, RepParams, W_closed, Wn_closed, conjugator_q, rho_matrices,
                              rho_s_matrices, tau_pair, tau_recursive, tau_seq, trace_W)
from riley_slopes.words import Word, eval_word, word_w

from conftest import rel

NONZERO = [k for k in range(-6, 7) if k]


def _random_tuples(count, seed=7):
    rng = random.Random(seed)
    for _ in range(count):
        yield (rng.choice(NONZERO), rng.choice(NONZERO),
               mpf(rng.uniform(1e-6, 10)), mpf(rng.uniform(1 + 1e-6, 20)))


def test_rho_basics():
    p = RepParams.from_t(mpf("0.7"), mpf("4.2"))
    x, y = rho_matrices(p)
    assert rel(x.trace(), p.sqrt_t + 1 / p.sqrt_t) < 1e-15
    assert abs(x.det() - 1) < 1e-14 and abs(y.det() - 1) < 1e-14


def test_rho_x_y_inverse_anchor():
    x, y = rho_matrices(RepParams.from_t(1, 3))
    assert (x @ y.inverse()).max_rel_diff(Mat2.of(2, 1, 1, 1)) < 1e-14


def test_rho_s_conjugacy():
    p = RepParams.from_t(mpf("1.3"), mpf("5.5"))
    xs, ys = rho_s_matrices(p)
    x, y = rho_matrices(p)
    Q = conjugator_q(p)
    assert xs.b == 0 and xs.c == 0
    assert (Q.inverse() @ xs @ Q).max_rel_diff(x) < 1e-10
    assert (Q.inverse() @ ys @ Q).max_rel_diff(y) < 1e-10
    assert rel(ys.trace(), p.sqrt_t + 1 / p.sqrt_t) < 1e-10
    assert abs(ys.det() - 1) < 1e-12


def test_W_closed_m0_identity():
    p = RepParams.from_t(2, 3)
    assert W_closed(0, p).max_rel_diff(Mat2.identity()) == 0


def test_W_closed_vs_words_example():
    p = RepParams.from_t(mpf("0.7"), mpf("4.2"))
    x, y = rho_matrices(p)
    assert W_closed(3, p).max_rel_diff(eval_word(word_w(3), x, y)) < 1e-9


def test_Wn_closed_vs_words_example():
    p = RepParams.from_t(mpf("0.5"), mpf("5.0"))
    x, y = rho_matrices(p)
    assert Wn_closed(2, 3, p).max_rel_diff(eval_word(word_w(2) ** 3, x, y)) < 1e-9


def test_Wn_closed_small_n():
    p = RepParams.from_t(mpf("0.5"), mpf("5.0"))
    assert Wn_closed(2, 1, p).max_rel_diff(W_closed(2, p)) < 1e-12
    assert Wn_closed(2, 0, p).max_rel_diff(Mat2.identity()) < 1e-12


def test_oracle_equivalence_random():
    for m, n, s, t in _random_tuples(200):
        p = RepParams.from_t(s, t)
        x, y = rho_matrices(p)
        W = W_closed(m, p)
        assert W.max_rel_diff(eval_word(word_w(m), x, y)) <= 1e-9
        assert Wn_closed(m, n, p).max_rel_diff(eval_word(word_w(m) ** n, x, y)) <= 1e-9
        assert abs(W.c + s * t * W.b) <= 1e-10 * max(abs(W.c), abs(s * t * W.b), W.max_norm())
        assert rel(trace_W(m, s, p.T), W.trace()) <= 1e-10 or abs(W.trace() - trace_W(m, s, p.T)) <= 1e-10 * W.max_norm()
        assert abs(W.det() - 1) <= 1e-10 * W.max_norm() ** 2


def test_trace_W_at_s_plus_2():
    for m in (-3, 1, 4):
        assert trace_W(m, mpf("0.25"), mpf("2.25")) == 2


def test_trace_W_excess_argument():
    s = mpf(10) ** 8
    # T - s - 2 is lost in T at 53 bits but exact through excess
    assert trace_W(2, s, s + 2, excess=mpf("1e-20")) != 2


def test_tau_examples():
    for tau in (mpf("-1.3"), mpf("0.5"), mpf(3)):
        assert tau_seq(tau, 1) == 1
        assert rel(tau_seq(tau, 2), tau) < 1e-14
    for k in range(-10, 11):
        assert tau_seq(2, k) == k


@pytest.mark.parametrize("tau", [mpf("-2.5"), mpf("-1.99"), mpf("0.3"), mpf("1.7"), mpf(2), mpf("2.01"), mpf(5)])
def test_tau_recursion_identity(tau):
    for k in range(-32, 33):
        lhs = tau_seq(tau, k + 1) - tau * tau_seq(tau, k) + tau_seq(tau, k - 1)
        scale = max(1, abs(tau_seq(tau, k + 1)), abs(tau * tau_seq(tau, k)))
        assert abs(lhs) <= 1e-10 * scale


@given(st.floats(-1.99999, 1.99999), st.integers(-64, 64))
def test_sine_form_matches_recursion(tau, k):
    tau = mpf(tau)
    a, b = tau_seq(tau, k), tau_recursive(tau, k)
    assert abs(a - b) <= 1e-10 * max(1, abs(a), abs(b))


@given(st.floats(-3, 3), st.integers(-20, 20))
def test_tau_pair(tau, k):
    a, b = tau_pair(tau, k)
    for got, want in ((a, tau_seq(tau, k)), (b, tau_seq(tau, k + 1))):
        assert abs(got - want) <= 1e-9 * max(1, abs(want))


def test_rep_params_validation():
    with pytest.raises(ValueError):
        RepParams.from_t(0, 3)
    with pytest.raises(ValueError):
        RepParams.from_t(1, 1)
    with pytest.raises(ValueError):
        RepParams(mpf(1), mpf(3), mpf(4), mpf(3).sqrt(), mpf(1))


def test_from_excess_roundtrip():
    p = RepParams.from_excess(1, mpf("0.5"))
    assert p.T == mpf("3.5")
    assert rel(p.t, (mpf("3.5") + mpmath.sqrt(mpf("8.25"))) / 2) < 1e-15
    assert p.in_regime


@given(st.floats(1e-3, 1e3), st.floats(1.0001, 1e3))
def test_from_t_consistent(s, t):
    p = RepParams.from_t(s, t)
    assert rel(p.sqrt_t ** 2, p.t) < 1e-14
    assert rel(p.T, p.t + 1 / p.t) < 1e-14
