import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadosc.errors import ModelError
from quadosc.models import (
    ModelKind,
    Regime,
    builtin_model,
    classify_damping,
    custom_model,
    custom_model_from_table,
    h_factor,
    model_from_string,
    operator_form,
    tau_sigma,
    to_pde_form,
)

ALL_BUILTIN = ["model1", "model2", "shifted", "model3", "harmonic"]


def test_model1_coefficients():
    m = builtin_model("model1", 1.0, 0.6)
    for t in (0.0, 0.7, 3.0):
        assert m.a(t) == 0.5
        assert m.b(t) == 0.5
        assert m.c(t) == -0.6
        assert m.d(t) == -0.6


def test_model1_zero_damping_is_sho():
    m = builtin_model("model1", 1.0, 0.0)
    assert (m.a(1.0), m.b(1.0), m.c(1.0), m.d(1.0)) == (0.5, 0.5, 0.0, 0.0)


def test_model3_coefficients_at_t1():
    m = builtin_model("model3", 1.0, 0.6)
    assert m.a(1.0) == pytest.approx(0.5 * math.exp(-1.2), rel=1e-15)
    assert m.b(1.0) == pytest.approx(0.5 * math.exp(1.2), rel=1e-15)
    assert m.c(1.0) == 0.0 and m.d(1.0) == 0.0


def test_shifted_and_harmonic_coefficients():
    sh = builtin_model("shifted", 1.0, 0.6)
    assert (sh.c(0.0), sh.d(0.0)) == (-0.6, -0.3)
    ha = builtin_model("harmonic", 1.0, 0.6)
    assert ha.b(0.0) == pytest.approx((1.0 - 0.36) / 2.0, rel=1e-15)
    assert (ha.c(2.0), ha.d(2.0)) == (0.0, 0.0)


@pytest.mark.parametrize("omega0,lam", [(0.0, 0.1), (-1.0, 0.1), (1.0, -0.2),
                                        (math.nan, 0.1), (1.0, math.inf)])
def test_builtin_rejects_bad_parameters(omega0, lam):
    with pytest.raises(ModelError):
        builtin_model("model1", omega0, lam)


def test_operator_to_pde_bridge_matches_printed_models():
    # H = (w0/2)(p^2+x^2) - lam px has c_op=-lam, d_op=0 and must land on
    # the c = d = -lam PDE parametrization.
    m1 = builtin_model("model1", 1.0, 0.6)
    pde = to_pde_form(operator_form(m1))
    assert pde.c(0.3) == -0.6 and pde.d(0.3) == -0.6
    # H = (w0/2)(p^2+x^2) - lam xp: c_op=0, d_op=-lam -> c=-lam, d=0.
    m2 = builtin_model("model2", 1.0, 0.6)
    op2 = operator_form(m2)
    assert op2.c(0.0) == 0.0 and op2.d(0.0) == -0.6
    pde2 = to_pde_form(op2)
    assert pde2.c(0.0) == -0.6 and pde2.d(0.0) == 0.0


def test_self_adjoint_bridge_is_trivial():
    m3 = builtin_model("model3", 1.0, 0.6)
    op = operator_form(m3)
    assert op.c(1.0) == 0.0 and op.d(1.0) == 0.0
    pde = to_pde_form(op)
    assert pde.c(1.0) == 0.0 and pde.d(1.0) == 0.0


@given(c_op=st.floats(-3, 3, allow_nan=False), d_op=st.floats(-3, 3, allow_nan=False))
def test_bridge_round_trip(c_op, d_op):
    from quadosc.models import OperatorCoefficients

    def const(v):
        return lambda t: v + 0.0 * np.asarray(t)

    opc = OperatorCoefficients(const(0.5), const(0.5), const(c_op), const(d_op))
    back = operator_form(to_pde_form(opc))
    assert back.c(0.0) == pytest.approx(c_op, abs=1e-12)
    assert back.d(0.0) == pytest.approx(d_op, abs=1e-12)


@pytest.mark.parametrize("kind,tau,sigma", [
    ("model1", -1.2, 0.25),
    ("model2", 1.2, 0.25),
    ("shifted", 0.0, 0.16),
])
def test_tau_sigma_constant_models(kind, tau, sigma):
    m = builtin_model(kind, 1.0, 0.6)
    got_tau, got_sigma = tau_sigma(m, 0.4)
    assert got_tau == pytest.approx(tau, abs=1e-14)
    assert got_sigma == pytest.approx(sigma, abs=1e-14)


def test_tau_sigma_model3_any_t():
    m = builtin_model("model3", 1.0, 0.6)
    for t in (0.0, 1.0, 4.2):
        tau, sigma = tau_sigma(m, t)
        assert tau == pytest.approx(-1.2, abs=1e-12)
        assert sigma == pytest.approx(0.25, abs=1e-12)


def test_tau_sigma_matches_finite_differences():
    # Centered differences of the defining formulas, step 1e-5.
    step = 1e-5
    rng = np.random.default_rng(42)
    for kind in ALL_BUILTIN:
        m = builtin_model(kind, 1.3, 0.5)
        for t in rng.uniform(0.0, 5.0, size=100):
            a = m.a(t)
            ap = (m.a(t + step) - m.a(t - step)) / (2.0 * step)
            dp = (m.d(t + step) - m.d(t - step)) / (2.0 * step)
            tau_fd = ap / a - 2.0 * m.c(t) + 4.0 * m.d(t)
            sigma_fd = (m.a(t) * m.b(t) - m.c(t) * m.d(t) + m.d(t) ** 2
                        + 0.5 * m.d(t) * ap / a - 0.5 * dp)
            tau, sigma = tau_sigma(m, t)
            assert abs(tau - tau_fd) < 1e-8
            assert abs(sigma - sigma_fd) < 1e-8


@given(omega0=st.floats(0.1, 5.0), lam=st.floats(0.0, 5.0))
def test_damping_classification_total_and_consistent(omega0, lam):
    reg = classify_damping(omega0, lam)
    if reg.regime is Regime.UNDERDAMPED:
        assert reg.omega > 0.0
        assert reg.omega ** 2 + lam ** 2 == pytest.approx(omega0 ** 2, rel=1e-12)
    elif reg.regime is Regime.OVERDAMPED:
        assert reg.omega > 0.0
        assert reg.omega ** 2 == pytest.approx(lam ** 2 - omega0 ** 2, rel=1e-12)
    else:
        assert reg.omega == 0.0 and omega0 == lam


def test_h_factor_closed_forms():
    m1 = builtin_model("model1", 1.0, 0.6)
    assert h_factor(m1, 1.0) == pytest.approx(math.exp(-0.6), rel=1e-15)
    assert h_factor(m1, 0.0) == 1.0
    m3 = builtin_model("model3", 1.0, 0.6)
    assert np.all(h_factor(m3, np.linspace(0, 5, 7)) == 1.0)
    with pytest.raises(ModelError):
        h_factor(m1, -0.5)


def test_h_factor_closed_matches_quadrature():
    rng = np.random.default_rng(3)
    for kind in ALL_BUILTIN:
        m = builtin_model(kind, 1.4, 0.7)
        for t in rng.uniform(0.0, 4.0, size=20):
            closed = h_factor(m, t)
            quad = h_factor(m, t, method="quadrature")
            assert abs(closed - quad) < 1e-10


def test_custom_model_from_table_matches_builtin():
    t = np.linspace(0.0, 5.0, 501)
    m3 = builtin_model("model3", 1.0, 0.6)
    custom = custom_model_from_table(t, m3.a(t), m3.b(t), m3.c(t), m3.d(t))
    for tv in (0.3, 1.7, 4.5):
        tau_c, sigma_c = tau_sigma(custom, tv)
        tau_b, sigma_b = tau_sigma(m3, tv)
        assert abs(tau_c - tau_b) < 1e-7
        assert abs(sigma_c - sigma_b) < 1e-7
    assert abs(h_factor(custom, 2.0) - 1.0) < 1e-9


def test_custom_model_table_validation():
    t = np.linspace(0, 1, 11)
    ones = np.ones_like(t)
    with pytest.raises(ModelError):
        custom_model_from_table(t[::-1], ones, ones, ones, ones)
    bad = t.copy()
    bad[5] += 0.03
    with pytest.raises(ModelError):
        custom_model_from_table(bad, ones, ones, ones, ones)
    with pytest.raises(ModelError):
        custom_model_from_table(t, 0.0 * ones, ones, ones, ones)  # a == 0


def test_custom_model_csv_roundtrip(tmp_path):
    t = np.linspace(0.0, 2.0, 201)
    m1 = builtin_model("model1", 1.0, 0.6)
    path = tmp_path / "coeffs.csv"
    rows = ["t,a,b,c,d"]
    rows += [f"{tv},{m1.a(tv)},{m1.b(tv)},{m1.c(tv)},{m1.d(tv)}" for tv in t]
    path.write_text("\n".join(rows) + "\n")
    loaded = custom_model(path)
    assert loaded.kind is ModelKind.CUSTOM
    assert loaded.a(0.8) == pytest.approx(0.5, abs=1e-12)
    assert abs(h_factor(loaded, 1.0) - math.exp(-0.6)) < 1e-9


def test_custom_model_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,a,b,c\n0,1,1,0\n")
    with pytest.raises(ModelError, match="header"):
        custom_model(path)
    path.write_text("t,a,b,c,d\n0,1,1,0,zap\n0.1,1,1,0,0\n")
    with pytest.raises(ModelError, match="bad.csv:2"):
        custom_model(path)


def test_model_from_string():
    m = model_from_string("shifted", 1.0, 0.3)
    assert m.kind is ModelKind.SHIFTED
    with pytest.raises(ModelError, match="unknown model"):
        model_from_string("modelx", 1.0, 0.3)
