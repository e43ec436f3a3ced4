"""Functional values and derivative applications against hand-derived oracles.

Conventions under test: deriv_apply(f, k, t, dirs) applies the k-th
derivative (a symmetric k-linear form) to k directions; fd_deriv_apply is
the nested-central-difference fallback.  All frozen numbers below carry
their derivation in a comment.
"""

import math

import numpy as np
import pytest

from splitfun import (
    AffineQuadratic,
    BernoulliProduct,
    BumpPairing,
    DualElement,
    ExpfamEntropy,
    Linear,
    MatrixLinear,
    MatrixQuadratic,
    MonomialPairing,
    Point,
    SinPairing,
    SmoothSqrt,
    SquaredNorm,
    UnsupportedOrderError,
    deriv_apply,
    derivative,
    dual_norm,
    euclidean,
    evaluate,
    fd_deriv_apply,
    holder_bounds,
    smooth_sqrt,
    squared_norm,
    sym_dual,
    sym_point,
)

E2 = euclidean(2)


def pt(*xs):
    return Point(euclidean(len(xs)), list(xs))


def du(*xs):
    return DualElement(euclidean(len(xs)), list(xs))


# ---------------------------------------------------------------- linear

def test_linear_frozen():
    f = Linear(u=du(3.0, 4.0))
    # f(1,1) = 3 + 4 = 7
    assert evaluate(f, pt(1.0, 1.0)) == 7.0
    # f'[v] = <v, u>; v = e1 -> 3
    assert deriv_apply(f, 1, pt(1.0, 1.0), (pt(1.0, 0.0),)) == 3.0
    # all higher derivatives vanish
    assert deriv_apply(f, 2, pt(1.0, 1.0), (pt(1.0, 0.0), pt(0.0, 1.0))) == 0.0
    # Lipschitz constant is the dual norm |u| = 5 (3-4-5)
    assert f.declared_lip_norm == 5.0


# ---------------------------------------------------------------- squared norm

def test_squared_norm_frozen():
    f = squared_norm(E2)
    assert evaluate(f, pt(3.0, 4.0)) == 25.0
    # f'(t)[v] = 2 <t, v>; t=(3,4), v=(1,2): 2(3+8) = 22
    assert deriv_apply(f, 1, pt(3.0, 4.0), (pt(1.0, 2.0),)) == 22.0
    # f''[v,w] = 2 <v, w>, independent of t
    assert deriv_apply(f, 2, pt(3.0, 4.0), (pt(1.0, 2.0), pt(2.0, -1.0))) == 0.0
    assert deriv_apply(f, 2, pt(0.0, 0.0), (pt(1.0, 2.0), pt(1.0, 2.0))) == 10.0
    assert deriv_apply(f, 3, pt(3.0, 4.0), (pt(1, 0), pt(0, 1), pt(1, 1))) == 0.0


# ---------------------------------------------------------------- affine quadratic

def test_affine_quadratic_frozen():
    # f(t) = <At,t> + <b,t> + c, A = diag(1,2), b = (1,1), c = 5
    f = AffineQuadratic(a=np.diag([1.0, 2.0]), b=du(1.0, 1.0), c=5.0)
    t = pt(2.0, 3.0)
    # <At,t> = 1*4 + 2*9 = 22; <b,t> = 5; total 32
    assert evaluate(f, t) == 32.0
    # f'[v] = 2<At,v> + <b,v>; v = e1: 2*2 + 1 = 5
    assert deriv_apply(f, 1, t, (pt(1.0, 0.0),)) == 5.0
    # f''[v,w] = 2<Av,w>; v=e1, w=e2: 2*A12 = 0; v=w=e2: 2*2 = 4
    assert deriv_apply(f, 2, t, (pt(1.0, 0.0), pt(0.0, 1.0))) == 0.0
    assert deriv_apply(f, 2, t, (pt(0.0, 1.0), pt(0.0, 1.0))) == 4.0
    # order >= 3 vanishes identically (polynomial of degree 2)
    assert deriv_apply(f, 3, t, (pt(1, 0), pt(1, 0), pt(1, 0))) == 0.0
    assert deriv_apply(f, 5, t, tuple(pt(1, 0) for _ in range(5))) == 0.0


def test_affine_quadratic_requires_symmetric_matrix():
    with pytest.raises(ValueError):
        AffineQuadratic(a=np.array([[0.0, 1.0], [0.0, 0.0]]), b=du(0.0, 0.0))


# ---------------------------------------------------------------- monomial

def test_monomial_frozen():
    # f(t) = <t,u>^3 with u = (1,1); at t = (1,2): s = 3
    f = MonomialPairing(u=du(1.0, 1.0), q=3)
    t = pt(1.0, 2.0)
    assert evaluate(f, t) == 27.0
    # f'[v] = 3 s^2 <v,u>; v = e1 -> 27
    assert deriv_apply(f, 1, t, (pt(1.0, 0.0),)) == 27.0
    # f''[v,w] = 6 s <v,u><w,u>; e1,e2 -> 18
    assert deriv_apply(f, 2, t, (pt(1.0, 0.0), pt(0.0, 1.0))) == 18.0
    # f'''[v,w,z] = 6 <v,u><w,u><z,u> -> 6
    assert deriv_apply(f, 3, t, (pt(1, 0), pt(0, 1), pt(1, 0))) == 6.0
    # beyond the degree: zero
    assert deriv_apply(f, 4, t, tuple(pt(1, 0) for _ in range(4))) == 0.0


def test_monomial_rejects_bad_power():
    with pytest.raises(ValueError):
        MonomialPairing(u=du(1.0), q=0)


# ---------------------------------------------------------------- smooth sqrt

def test_smooth_sqrt_frozen():
    f = smooth_sqrt(E2)
    # at the origin: f = 1, gradient 0, f''[v,w] = <v,w>, f''' = 0
    assert evaluate(f, pt(0.0, 0.0)) == 1.0
    assert deriv_apply(f, 1, pt(0.0, 0.0), (pt(1.0, 2.0),)) == 0.0
    assert deriv_apply(f, 2, pt(0.0, 0.0), (pt(1.0, 2.0), pt(2.0, 1.0))) == 4.0
    assert deriv_apply(f, 3, pt(0.0, 0.0), (pt(1, 0), pt(1, 0), pt(1, 0))) == 0.0

    # at t = (1,2): F = sqrt(6); with v = e1, <t,v> = 1:
    t = pt(1.0, 2.0)
    F = math.sqrt(6.0)
    v = pt(1.0, 0.0)
    # f'[v] = <t,v>/F = 1/sqrt(6)
    assert deriv_apply(f, 1, t, (v,)) == pytest.approx(1.0 / F, rel=1e-15)
    # f''[v,v] = <v,v>/F - <t,v>^2/F^3 = 1/F - 1/F^3 = 5/6^{3/2}
    assert deriv_apply(f, 2, t, (v, v)) == pytest.approx(5.0 / 6.0 ** 1.5, rel=1e-14)
    # f'''[v,v,v] = -3 <v,v><t,v>/F^3 + 3 <t,v>^3/F^5 = -3/6^{3/2} + 3/6^{5/2}
    want = -3.0 / 6.0 ** 1.5 + 3.0 / 6.0 ** 2.5
    assert deriv_apply(f, 3, t, (v, v, v)) == pytest.approx(want, rel=1e-14)


def test_smooth_sqrt_order_cap():
    f = smooth_sqrt(E2)
    dirs = tuple(pt(1.0, 0.0) for _ in range(4))
    with pytest.raises(UnsupportedOrderError):
        deriv_apply(f, 4, pt(0.0, 0.0), dirs)
    # the fd fallback serves order 4; for this f at 0 the true value is
    # d^4/dx^4 sqrt(1+x^2)|_0 = -3
    got = fd_deriv_apply(f, 4, pt(0.0, 0.0), dirs)
    assert got == pytest.approx(-3.0, abs=5e-3)


# ---------------------------------------------------------------- sin pairing

def test_sin_pairing_frozen():
    u = du(1.0, 0.0)
    f = SinPairing(u=u)
    t = pt(math.pi / 6.0, 5.0)  # <t,u> = pi/6
    assert evaluate(f, t) == pytest.approx(0.5, rel=1e-15)
    e1 = pt(1.0, 0.0)
    # derivative cycle sin -> cos -> -sin -> -cos -> sin
    assert deriv_apply(f, 1, t, (e1,)) == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
    assert deriv_apply(f, 2, t, (e1, e1)) == pytest.approx(-0.5, rel=1e-15)
    assert deriv_apply(f, 3, t, (e1, e1, e1)) == pytest.approx(-math.sqrt(3) / 2,
                                                               rel=1e-15)
    assert deriv_apply(f, 4, t, (e1,) * 4) == pytest.approx(0.5, rel=1e-15)
    # direction orthogonal to u kills the product
    assert deriv_apply(f, 1, t, (pt(0.0, 1.0),)) == 0.0
    # declared bounds: |sin| <= 1, Lipschitz via |u|
    hb = holder_bounds(f)
    assert hb["sup_norm"] == 1.0
    assert hb["grad_sup"] == dual_norm(u)
    assert hb["lip_m"] is None


# ---------------------------------------------------------------- matrix functionals

def test_matrix_linear_frozen():
    # U = diag(1,2), Sigma = [[3,1],[1,4]]: tr(Sigma U) = 3 + 8 = 11
    f = MatrixLinear(u=sym_dual(np.diag([1.0, 2.0])))
    sig = sym_point([[3.0, 1.0], [1.0, 4.0]])
    assert evaluate(f, sig) == pytest.approx(11.0, abs=1e-12)
    v = sym_point([[0.0, 1.0], [1.0, 0.0]])
    # f'[V] = tr(V U) = 0 for this off-diagonal V
    assert deriv_apply(f, 1, sig, (v,)) == pytest.approx(0.0, abs=1e-12)
    assert deriv_apply(f, 2, sig, (v, v)) == 0.0


def test_matrix_quadratic_frozen():
    # U = I: f(Sigma) = tr(Sigma^2); Sigma = [[3,1],[1,4]] -> 10 + 17 = 27
    f = MatrixQuadratic(u=sym_dual(np.eye(2)))
    sig = sym_point([[3.0, 1.0], [1.0, 4.0]])
    assert evaluate(f, sig) == pytest.approx(27.0, abs=1e-12)
    v = sym_point([[0.0, 1.0], [1.0, 0.0]])
    # f'[V] = tr(V (Sigma U + U Sigma)) = 2 tr(V Sigma) = 2 * 2 = 4
    assert deriv_apply(f, 1, sig, (v,)) == pytest.approx(4.0, abs=1e-12)
    # f''[V,V] = 2 tr(V V U) = 2 tr(V^2) = 2 * 2 = 4
    assert deriv_apply(f, 2, sig, (v, v)) == pytest.approx(4.0, abs=1e-12)
    assert deriv_apply(f, 3, sig, (v, v, v)) == 0.0


def test_matrix_functionals_reject_euclidean_duals():
    with pytest.raises(ValueError):
        MatrixLinear(u=du(1.0, 0.0))
    with pytest.raises(ValueError):
        MatrixQuadratic(u=du(1.0, 0.0))


# ---------------------------------------------------------------- entropy

def test_entropy_functional_frozen():
    """Entropy relative to the symmetric base measure: -psi*(t).

    For one bernoulli coordinate this equals H(p) - log 2, so it vanishes
    at p = 1/2 and decreases toward -log 2 at the endpoints.
    """
    f = ExpfamEntropy(family=BernoulliProduct(1))
    one = euclidean(1)
    # p = 1/2: H = log 2, relative entropy 0; gradient -theta = -logit(1/2) = 0
    t_half = Point(one, [0.5])
    assert evaluate(f, t_half) == pytest.approx(0.0, abs=1e-12)
    v = Point(one, [1.0])
    assert deriv_apply(f, 1, t_half, (v,)) == pytest.approx(0.0, abs=1e-12)
    # f''[v,v] = -1/(p(1-p)) = -4 at p = 1/2
    assert deriv_apply(f, 2, t_half, (v, v)) == pytest.approx(-4.0, rel=1e-10)
    # psi''' = p(1-p)(1-2p) = 0 at p = 1/2
    assert deriv_apply(f, 3, t_half, (v, v, v)) == pytest.approx(0.0, abs=1e-10)

    # p = 0.3: value H(0.3) - log 2
    t3 = Point(one, [0.3])
    h03 = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7))
    assert evaluate(f, t3) == pytest.approx(h03 - math.log(2.0), rel=1e-12)
    # gradient: -logit(0.3) = log(7/3)
    assert deriv_apply(f, 1, t3, (v,)) == pytest.approx(math.log(7.0 / 3.0),
                                                        rel=1e-10)
    # hessian: -1/(0.3*0.7)
    assert deriv_apply(f, 2, t3, (v, v)) == pytest.approx(-1.0 / 0.21, rel=1e-10)
    # third: (1-2p)/(p(1-p))^2 = 0.4/0.0441
    assert deriv_apply(f, 3, t3, (v, v, v)) == pytest.approx(0.4 / 0.0441,
                                                             rel=1e-8)
    # declared sup norm: d log 2
    assert f.declared_sup_norm == pytest.approx(math.log(2.0), rel=1e-15)


def test_entropy_fd_agreement(rng):
    """Orders 1..3 of the entropy functional match finite differences."""
    f = ExpfamEntropy(family=BernoulliProduct(3))
    sp = euclidean(3)
    for _ in range(20):
        t = Point(sp, rng.uniform(0.2, 0.8, size=3))
        dirs = [Point(sp, rng.standard_normal(3)) for _ in range(3)]
        for k in (1, 2, 3):
            a = deriv_apply(f, k, t, tuple(dirs[:k]))
            b = fd_deriv_apply(f, k, t, tuple(dirs[:k]))
            # higher derivatives of the entropy blow up toward the domain
            # edge, so the fd truncation error is the limiting factor here
            assert a == pytest.approx(b, rel=2e-3, abs=2e-3)


# ---------------------------------------------------------------- bump

def test_bump_frozen():
    f = BumpPairing(u=du(1.0, 0.0))
    # phi(0) = exp(1 - 1) = 1
    assert evaluate(f, pt(0.0, 7.0)) == 1.0
    # phi(1/2) = exp(1 - 1/(3/4)) = exp(-1/3)
    assert evaluate(f, pt(0.5, 0.0)) == pytest.approx(math.exp(-1.0 / 3.0),
                                                      rel=1e-15)
    # support ends at |x| = 1
    assert evaluate(f, pt(1.0, 0.0)) == 0.0
    assert evaluate(f, pt(1.2, 0.0)) == 0.0
    e1 = pt(1.0, 0.0)
    # phi'(0) = 0 (even function), phi''(0) = -2
    assert deriv_apply(f, 1, pt(0.0, 0.0), (e1,)) == 0.0
    assert deriv_apply(f, 2, pt(0.0, 0.0), (e1, e1)) == pytest.approx(-2.0,
                                                                      rel=1e-13)
    # phi'(1/2) = phi(1/2) * (-2x/(1-x^2)^2) = exp(-1/3) * (-16/9)
    want = math.exp(-1.0 / 3.0) * (-16.0 / 9.0)
    assert deriv_apply(f, 1, pt(0.5, 0.0), (e1,)) == pytest.approx(want, rel=1e-13)
    assert f.declared_sup_norm == 1.0


def test_bump_center_width_and_fd():
    f = BumpPairing(u=du(1.0), center=2.0, width=0.5)
    # argument (t - 2)/0.5; at t = 2 the bump peaks
    assert evaluate(f, Point(euclidean(1), [2.0])) == 1.0
    assert evaluate(f, Point(euclidean(1), [2.6])) == 0.0
    t = Point(euclidean(1), [2.1])
    v = Point(euclidean(1), [1.0])
    for k in (1, 2):
        a = deriv_apply(f, k, t, (v,) * k)
        b = fd_deriv_apply(f, k, t, (v,) * k)
        assert a == pytest.approx(b, rel=5e-5, abs=5e-5)
    with pytest.raises(ValueError):
        BumpPairing(u=du(1.0), width=0.0)


# ---------------------------------------------------------------- fd fallback

def test_fd_matches_analytic_on_a_battery(rng):
    """200 random (functional, point, directions) cases, orders 1..3."""
    checked = 0
    for i in range(50):
        d = int(rng.integers(1, 5))
        sp = euclidean(d)
        u = DualElement(sp, rng.standard_normal(d))
        fams = [
            Linear(u=u),
            SquaredNorm(sp),
            MonomialPairing(u=u, q=int(rng.integers(1, 5))),
            SmoothSqrt(sp),
            SinPairing(u=u),
        ]
        t = Point(sp, rng.uniform(-1.0, 1.0, size=d))
        dirs = [Point(sp, rng.standard_normal(d)) for _ in range(3)]
        for f in fams:
            for k in (1, 2, 3):
                if f.max_analytic_order is not None and k > f.max_analytic_order:
                    continue
                a = deriv_apply(f, k, t, tuple(dirs[:k]))
                b = fd_deriv_apply(f, k, t, tuple(dirs[:k]))
                scale = max(1.0, abs(a))
                assert abs(a - b) <= 1e-4 * scale, (type(f).__name__, k, a, b)
                checked += 1
    assert checked >= 200


def test_fd_examples_are_accurate():
    """First-order fd on smooth slowly-varying functions is ~1e-7 accurate."""
    f = SinPairing(u=du(1.0, 0.0))
    t = pt(0.3, 0.0)
    a = deriv_apply(f, 1, t, (pt(1.0, 0.0),))
    b = fd_deriv_apply(f, 1, t, (pt(1.0, 0.0),))
    assert abs(a - b) <= 1e-7


def test_fd_order_cap_and_zero_order():
    f = SinPairing(u=du(1.0))
    t = Point(euclidean(1), [0.1])
    assert fd_deriv_apply(f, 0, t, ()) == evaluate(f, t)
    with pytest.raises(UnsupportedOrderError):
        fd_deriv_apply(f, 5, t, tuple(Point(euclidean(1), [1.0]) for _ in range(5)))


# ---------------------------------------------------------------- form algebra

def test_derivatives_are_symmetric_in_directions(rng):
    sp = euclidean(3)
    u = DualElement(sp, rng.standard_normal(3))
    t = Point(sp, rng.standard_normal(3))
    dirs = [Point(sp, rng.standard_normal(3)) for _ in range(3)]
    for f in (SmoothSqrt(sp), MonomialPairing(u=u, q=4), SinPairing(u=u)):
        base = deriv_apply(f, 3, t, tuple(dirs))
        for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0), (1, 2, 0), (2, 0, 1)):
            got = deriv_apply(f, 3, t, tuple(dirs[i] for i in perm))
            assert got == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_derivatives_are_multilinear(rng):
    sp = euclidean(3)
    t = Point(sp, rng.standard_normal(3))
    v, w, z = (Point(sp, rng.standard_normal(3)) for _ in range(3))
    a, b = 2.5, -1.25
    for f in (SmoothSqrt(sp), SquaredNorm(sp)):
        lhs = deriv_apply(f, 2, t, (a * v + b * w, z))
        rhs = a * deriv_apply(f, 2, t, (v, z)) + b * deriv_apply(f, 2, t, (w, z))
        assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


def test_derivative_wrapper():
    f = squared_norm(E2)
    form = derivative(f, 2, pt(0.0, 0.0))
    assert form(pt(1.0, 2.0), pt(1.0, 2.0)) == 10.0
    assert form.order == 2
    with pytest.raises(ValueError):
        derivative(f, -1, pt(0.0, 0.0))


def test_argument_validation():
    f = squared_norm(E2)
    with pytest.raises(ValueError):
        deriv_apply(f, 2, pt(0.0, 0.0), (pt(1.0, 0.0),))  # wrong count
    with pytest.raises(ValueError, match="space mismatch"):
        deriv_apply(f, 1, Point(euclidean(3), [0, 0, 0]), (pt(1.0, 0.0),))
    with pytest.raises(ValueError, match="space mismatch"):
        evaluate(f, Point(euclidean(3), [0, 0, 0]))
