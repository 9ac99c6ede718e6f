import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import MUS, PROFILES
from revradon.errors import ConfigurationError, DomainError, SingularRatioError
from revradon.geometry import (CenterSurface, Cone, Lemon, MuSpec, Sphere, Spheroid, TabulatedProfile, h_eval,
                               h_grad, lemon_p_from_s, lemon_s_from_p, mu_eval, mu_from_dict, profile_from_dict,
                               psi, ratio_deriv, surface_point)

STEP = 1e-5


def fd_grad(profile, s, x, step=STEP):
    h_s = (profile.h(s + step, x) - profile.h(s - step, x)) / (2 * step)
    h_x = (profile.h(s, x + step) - profile.h(s, x - step)) / (2 * step)
    return h_s, h_x


def fd_ratio_deriv(profile, s, x, step=STEP):
    def ratio(xx):
        a, b = profile.grad(s, xx)
        return b / a

    return (ratio(x + step) - ratio(x - step)) / (2 * step)


# ------------------------------------------------------------------ h values


@pytest.mark.parametrize(
    "profile, s, x, expected",
    [(Sphere(), 2, 1, 3.0), (Spheroid(2.0), 1, 0, 1.0), (Lemon(2.0), 0, 0, 4.0), (Cone(), 3, 2, 6.0)],
)
def test_h_eval_examples(profile, s, x, expected):
    assert h_eval(profile, s, x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("name", ["sphere", "spheroid", "lemon"])
def test_h_vanishes_on_boundary(name):
    prof = PROFILES[name]
    for s in (0.3, 1.0, 2.0):
        lo, hi = prof.x_interval(s)
        assert h_eval(prof, s, lo) == pytest.approx(0.0, abs=1e-12)
        assert h_eval(prof, s, hi) == pytest.approx(0.0, abs=1e-12)
        assert h_eval(prof, s, 0.5 * (lo + hi)) > 0


def test_domain_error_names_point():
    with pytest.raises(DomainError, match=r"s=2.*x=3"):
        h_eval(Sphere(), 2.0, 3.0)
    with pytest.raises(DomainError):
        h_eval(Cone(), 1.0, -0.5)
    with pytest.raises(DomainError):
        h_eval(Lemon(2.0), -0.1, 0.0)


def test_h_grad_examples():
    assert h_grad(Sphere(), 2, 1) == pytest.approx((4.0, -2.0))
    assert h_grad(Cone(), 3, 2) == pytest.approx((2.0, 3.0))
    # h(s, 0) = s^2, so h_s(1, 0) = 2; finite differences of h agree
    hs, hx = h_grad(Spheroid(2.0), 1.0, 0.0)
    assert (hs, hx) == pytest.approx((2.0, 0.0), abs=1e-14)
    assert fd_grad(Spheroid(2.0), 1.0, 0.0) == pytest.approx((2.0, 0.0), abs=1e-8)


def test_ratio_deriv_examples():
    # -1 * 5 * 25 / 625 from the closed form; confirmed by differencing h_x / h_s
    assert ratio_deriv(Spheroid(2.0), 1.0, 0.0) == pytest.approx(-0.2, rel=1e-14)
    assert fd_ratio_deriv(Spheroid(2.0), 1.0, 0.0) == pytest.approx(-0.2, rel=1e-8)
    assert ratio_deriv(Cone(), 3.0, 2.0) == pytest.approx(-0.75, rel=1e-14)
    # h_x / h_s = -x / s for the sphere
    assert ratio_deriv(Sphere(), 2.0, 0.5) == pytest.approx(-0.5, rel=1e-14)
    assert fd_ratio_deriv(Sphere(), 2.0, 0.5) == pytest.approx(-0.5, rel=1e-8)


def test_ratio_deriv_singular():
    with pytest.raises(SingularRatioError):
        ratio_deriv(Cone(), 1.0, 0.0)


def _interior(profile, s, u):
    lo, hi = profile.x_interval(s)
    hi = np.minimum(hi, 2.0)
    return lo + (hi - lo) * u


S_RANGES = {"sphere": (0.2, 2.2), "spheroid": (0.2, 2.2), "lemon": (0.0, 5.0), "cone": (0.2, 2.2)}


@pytest.mark.parametrize("name", sorted(PROFILES))
@given(a=st.floats(0.0, 1.0), u=st.floats(0.03, 0.97))
def test_derivatives_match_finite_differences(name, a, u):
    prof = PROFILES[name]
    lo, hi = S_RANGES[name]
    s = lo + 1e-4 + (hi - lo - 2e-4) * a
    x = float(_interior(prof, s, u))
    hs, hx = prof.grad(s, x)
    fs, fx = fd_grad(prof, s, x)
    assert abs(fs - hs) <= 1e-6 * (1 + abs(hs))
    assert abs(fx - hx) <= 1e-6 * (1 + abs(hx))
    rd = prof.ratio_deriv(s, x)
    assert abs(fd_ratio_deriv(prof, s, x) - rd) <= 1e-6 * (1 + abs(rd))


@pytest.mark.parametrize("name", ["sphere", "spheroid", "lemon"])
@given(a=st.floats(0.05, 3.0), u=st.floats(0.0, 1.0))
def test_evenness(name, a, u):
    prof = PROFILES[name]
    x = float(_interior(prof, a, u))
    assert prof.h(a, x) == pytest.approx(prof.h(a, -x), rel=1e-12, abs=1e-14)


@given(p=st.floats(0.0, 5.0))
def test_lemon_parametrizations_agree(p):
    s = lemon_s_from_p(p, 2.0)
    assert Lemon(2.0).h(p, 0.0) == pytest.approx(s**2, rel=1e-12)
    assert lemon_p_from_s(s, 2.0) == pytest.approx(p, abs=1e-9)


def test_lemon_s_decreasing():
    p = np.linspace(0, 5, 200)
    assert np.all(np.diff(lemon_s_from_p(p, 2.0)) < 0)


# ---------------------------------------------------------- symmetric curves


def test_mu_eval_examples():
    v = mu_eval(MuSpec("sphere"), 2.0, 2.0)
    assert (v.mu, v.tau, v.kappa) == pytest.approx((0.0, 2.0, 1.0))
    assert np.isinf(v.g)
    v = mu_eval(MuSpec("sphere"), 5.0, 3.0)
    assert (v.mu, v.mu_t, v.g) == pytest.approx((4.0, -0.75, 1.25))
    v = mu_eval(MuSpec("lemon", alpha=2.0), 1.0, 1.0)
    assert v.tau == pytest.approx(np.sqrt(5.0))
    assert v.kappa == pytest.approx(np.sqrt(5.0) / 2)


def test_mu_eval_domain():
    with pytest.raises(DomainError):
        mu_eval(MuSpec("sphere"), 1.0, 1.5)
    with pytest.raises(ConfigurationError):
        MuSpec("cone")
    with pytest.raises(ConfigurationError):
        MuSpec("spheroid")


@pytest.mark.parametrize("name", sorted(MUS))
@given(s=st.floats(0.2, 2.2), frac=st.floats(0.0, 0.999))
def test_mu_quantities_consistent(name, s, frac):
    mu = MUS[name]
    t = 0.2 + (s - 0.2) * frac
    v = mu_eval(mu, s, t)
    assert v.mu == pytest.approx(np.sqrt(s - t) * v.tau, rel=1e-12, abs=1e-14)
    if s - t > 1e-6:
        assert v.g == pytest.approx(v.kappa / np.sqrt(s - t), rel=1e-10)
        # g is the arc-length factor sqrt(1 + mu_t^2); compare with a difference quotient
        d = 1e-6 * (s - t)
        mt = (mu.mu(s, t + d) - mu.mu(s, t - d)) / (2 * d)
        assert v.mu_t == pytest.approx(mt, rel=1e-5, abs=1e-8)
        assert v.g == pytest.approx(np.sqrt(1 + v.mu_t**2), rel=1e-10)


@pytest.mark.parametrize("name", sorted(MUS))
@given(s=st.floats(0.2, 2.2), frac=st.floats(0.0, 1.0))
def test_mu_lies_on_surface(name, s, frac):
    # h(s, mu(s, t)) = t^2 with the surface labelled by its maximal radius
    mu = MUS[name]
    t = s * frac
    prof = mu.profile()
    param = float(mu.profile_parameter(s))
    height = float(mu.mu(s, t))
    if not (name == "lemon" and param < 0):
        height = min(height, float(prof.x_interval(param)[1]))
    if name == "lemon" and param < 0:
        # outside the arc parametrization p >= 0: check the circle equation directly
        r2 = 4.0 + param**2
        assert (t + param) ** 2 + height**2 == pytest.approx(r2, rel=1e-10)
    else:
        assert prof.h(param, height) == pytest.approx(t**2, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("name", sorted(MUS))
def test_kappa_positive(name):
    s = np.linspace(0.2, 2.2, 200)
    S, T = np.meshgrid(s, s, indexing="ij")
    T = np.minimum(T, S)
    assert MUS[name].kappa(S, T).min() > 0


def test_profile_roundtrip():
    for prof in PROFILES.values():
        assert profile_from_dict(prof.to_dict()) == prof
    for mu in MUS.values():
        assert mu_from_dict(mu.to_dict()) == mu
    with pytest.raises(ConfigurationError):
        profile_from_dict({"family": "torus"})


# ------------------------------------------------------------ surface points


def test_surface_point_examples():
    p = surface_point(Sphere(), 1.0, (0.0, 0.0), np.pi, 0.0)
    assert p == pytest.approx([0.0, 0.0, 0.0], abs=1e-15)
    p = surface_point(Lemon(2.0), 0.0, (0.0, 0.0), np.pi, 0.0)
    assert p == pytest.approx([-1.0, 0.0, 0.0], abs=1e-15)
    # boundary of Omega: the point sits on the rotation axis
    p = surface_point(Spheroid(2.0), 1.0, (0.7, 0.3), 1.1, 0.3 + np.sqrt(5.0))
    assert p[:2] == pytest.approx([np.cos(0.7), np.sin(0.7)], abs=1e-7)


@pytest.mark.parametrize("name", ["sphere", "spheroid", "lemon", "cone"])
@given(s=st.floats(0.2, 2.0), th=st.floats(0, 2 * np.pi), y3=st.floats(-2, 2), phi=st.floats(0, 2 * np.pi),
       u=st.floats(0.01, 0.99))
def test_surface_point_zero_of_psi(name, s, th, y3, phi, u):
    prof = PROFILES[name]
    x3 = y3 + float(_interior(prof, s, u))
    p = surface_point(prof, s, (th, y3), phi, x3)
    assert psi(prof, s, (th, y3), p) == pytest.approx(0.0, abs=1e-12)


def test_center_surface():
    cs = CenterSurface(radius=2.0)
    c = cs.center(np.pi / 2, 1.0)
    assert c == pytest.approx([0.0, 2.0, 1.0], abs=1e-15)
    assert np.linalg.norm(cs.normal(0.3)) == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        CenterSurface(radius=0.0)


def test_tabulated_profile_derivatives():
    tab = TabulatedProfile.from_function(lambda s, x: s**2 - x**2, (0.5, 2.0), (-0.4, 0.4), shape=(41, 41))
    s, x = 1.2, 0.13
    assert tab.h(s, x) == pytest.approx(s**2 - x**2, rel=1e-10)
    assert tab.grad(s, x) == pytest.approx((2 * s, -2 * x), rel=1e-8)
    assert tab.ratio_deriv(s, x) == pytest.approx(-1 / s, rel=1e-8)
    with pytest.raises(DomainError):
        tab.h(2.5, 0.0)
