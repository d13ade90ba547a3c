import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ci_opt.exceptions import ConfigurationError, EvaluationError, UsageError
from ci_opt.problems import (
    GSUITE_PROBLEMS,
    MANUFACTURING_PROBLEMS,
    PROBLEM_NAMES,
    evaluate,
    get_problem,
    total_violation,
)
from ci_opt.problems.gsuite import G1_OPTIMUM, G4_OPTIMUM, G6_OPTIMUM, KNOWN_OPTIMA, g1, g4, g6
from ci_opt.problems.manufacturing import (
    USM,
    WJM_POWER_COEF,
    ajmb_constraint,
    ajmb_objective,
    ajmd_constraint,
    ajmd_objective,
    grinding_flaws,
    grinding_nd_constraint,
    grinding_sr_constraint,
    grinding_surface_roughness,
    usm_constraint,
    usm_objective,
    usm_prefactor,
    wjm_objective,
    wjm_power_constraint,
    wjm_psi,
)

# reference values below come from an independent 30-digit evaluation of the
# model formulas, not from this package
REL = 1e-9


def test_registry():
    assert set(PROBLEM_NAMES) == set(MANUFACTURING_PROBLEMS) | set(GSUITE_PROBLEMS)
    for name in PROBLEM_NAMES:
        p = get_problem(name)
        assert p.name == name and p.dimension == len(p.variables)
        assert get_problem(name.upper()).name == name
    with pytest.raises(UsageError, match="ajmb"):
        get_problem("nope")
    with pytest.raises(UsageError):
        get_problem("ajmb", "sideways")
    assert get_problem("ajmd", "paper-calibrated").lower[2] < get_problem("ajmd").lower[2]


def test_senses():
    for name in MANUFACTURING_PROBLEMS:
        assert get_problem(name).maximize
    for name in GSUITE_PROBLEMS:
        assert not get_problem(name).maximize


def test_ajmb_values():
    assert ajmb_objective(5e-4, 0.005, 4e5) == pytest.approx(11.76612316, rel=REL)
    assert ajmb_objective(5e-4, 0.005, 315786) == pytest.approx(8.253396535, rel=REL)
    assert ajmb_constraint(5e-4, 0.005, 150000) == pytest.approx(-0.5249739658, rel=REL)
    assert ajmb_constraint(5e-4, 0.005, 315786) == pytest.approx(4.380831753e-5, rel=1e-6)
    # binding velocity and the constrained optimum
    assert ajmb_constraint(5e-4, 0.005, 315772.1665527) == pytest.approx(0.0, abs=1e-12)
    assert ajmb_objective(5e-4, 0.005, 315772.1665527) == pytest.approx(8.252854214, rel=REL)


def test_ajmd_values():
    assert ajmd_objective(5e-4, 0.005, 10548.6) == pytest.approx(0.6055042217, rel=REL)
    assert ajmd_constraint(5e-4, 0.005, 10548.6) == pytest.approx(-7.370037795e-5, rel=1e-6)
    assert ajmd_constraint(5e-4, 0.005, 150000) == pytest.approx(13.21884847, rel=REL)
    assert ajmd_constraint(5e-4, 0.005, 10549.37749) == pytest.approx(0.0, abs=1e-9)
    assert ajmd_objective(5e-4, 0.005, 10549.37749) == pytest.approx(0.6056381191, rel=REL)


def test_wjm_values():
    assert wjm_psi(400, 0.4) == pytest.approx(0.01318694780, rel=REL)
    assert WJM_POWER_COEF == pytest.approx(0.02457089742, rel=REL)
    assert wjm_power_constraint(400, 0.5) == pytest.approx(-0.01716410322, rel=REL)
    assert wjm_power_constraint(1, 0.05) == pytest.approx(-0.9999987715, rel=REL)
    assert wjm_objective(400, 0.5, 300, 50) == pytest.approx(38.70018953, rel=REL)


def test_wjm_domain_error():
    # K = 20/2.5 = 8 needs P_w >= 209.6 for a real square root
    with pytest.raises(EvaluationError):
        wjm_psi(100.0, 8.0)
    assert np.isnan(wjm_psi(100.0, 8.0, strict=False))
    p = get_problem("wjm")
    with pytest.raises(EvaluationError):
        evaluate(p, [100.0, 0.3, 100.0, 2.5])
    f, g = p.evaluate_batch([[100.0, 0.3, 100.0, 2.5], [400.0, 0.5, 300.0, 50.0]])
    assert np.isnan(f[0]) and f[1] == pytest.approx(38.70018953, rel=REL)


def test_usm_values():
    assert USM.lam == pytest.approx(0.2464285714, rel=REL)
    assert usm_prefactor() == pytest.approx(0.002089846602, rel=REL)
    x = (0.006115, 40000, 0.15, 0.5, 45)
    assert usm_objective(*x) == pytest.approx(4.006036410, rel=REL)
    assert usm_constraint(*x) == pytest.approx(-6.665129e-5, rel=1e-5)
    a_star = 0.006115815227
    assert usm_constraint(a_star, 40000, 0.15, 0.5, 45) == pytest.approx(0.0, abs=1e-9)
    assert usm_objective(a_star, 40000, 0.15, 0.5, 45) == pytest.approx(4.006436955, rel=REL)


def test_grinding_values():
    assert grinding_surface_roughness(1, 5, 500) == pytest.approx(0.04618804859, rel=REL)
    assert grinding_sr_constraint(1, 5, 500) == pytest.approx(-0.8460398380, rel=REL)
    assert grinding_flaws(0.86, 5) == pytest.approx(51.16770127, rel=REL)
    assert grinding_nd_constraint(0.86, 5) == pytest.approx(6.309671610, rel=REL)
    f, g = evaluate(get_problem("grinding"), [0.86, 5, 120])
    assert f == pytest.approx(4.3)
    assert g.shape == (2,) and g[1] > 6


def test_grinding_flaw_constraint_never_satisfiable():
    # flaws grow with both variables, so the lower corner is the least violated point
    p = get_problem("grinding")
    X = np.random.default_rng(0).uniform(p.lower, p.upper, (20000, 3))
    _, G = p.evaluate_batch(X)
    assert G[:, 1].min() >= grinding_nd_constraint(0.86, 5) - 1e-12


def test_gsuite_optima():
    assert g1(G1_OPTIMUM)[0] == pytest.approx(-15.0, abs=1e-12)
    assert np.all(g1(G1_OPTIMUM)[1] <= 1e-12)
    f, g = g4(G4_OPTIMUM)
    assert f == pytest.approx(KNOWN_OPTIMA["g4"], abs=1e-3)
    assert np.all(g <= 1e-9)
    f, g = g6([14.095, 0.84296])
    assert f == pytest.approx(-6961.814744, abs=1e-5)
    assert np.all(np.abs(g) <= 1e-5)
    f, g = g6(G6_OPTIMUM)
    assert f == pytest.approx(KNOWN_OPTIMA["g6"], abs=1e-5)
    assert np.all(g <= 1e-9)
    with pytest.raises(ConfigurationError):
        g6([1.0, 2.0, 3.0])


def test_gsuite_batch_matches_single():
    rng = np.random.default_rng(4)
    for name, fn in (("g1", g1), ("g4", g4), ("g6", g6)):
        p = get_problem(name)
        X = rng.uniform(p.lower, p.upper, (10, p.dimension))
        f, G = p.evaluate_batch(X)
        for row, fi, gi in zip(X, f, G):
            single_f, single_g = fn(row)
            assert single_f == fi and np.array_equal(single_g, gi)


@given(st.floats(1.67e-5, 5e-4), st.floats(0.005, 0.075), st.floats(1.5e5, 4e5), st.floats(1.001, 1.5))
def test_ajm_monotone(M, r, v, s):
    assert ajmb_objective(M * s, r, v) > ajmb_objective(M, r, v)
    assert ajmb_objective(M, r, v * s) > ajmb_objective(M, r, v)
    assert ajmb_constraint(M, r * s, v) > ajmb_constraint(M, r, v)
    assert ajmd_objective(M, r, v * s) > ajmd_objective(M, r, v)
    assert ajmd_constraint(M, r, v * s) > ajmd_constraint(M, r, v)


@given(st.floats(0.005, 0.1), st.floats(1e4, 4e4), st.floats(0.007, 0.15), st.floats(0.05, 0.5), st.floats(4.5, 45))
def test_usm_monotone(A, fv, dm, C, F):
    assert usm_objective(A * 1.01, fv, dm, C, F) > usm_objective(A, fv, dm, C, F)
    assert usm_constraint(A, fv, dm, C * 1.01, F) < usm_constraint(A, fv, dm, C, F)
    assert usm_objective(A, fv, dm, C, F) > 0


@given(st.floats(1, 400), st.floats(0.05, 0.5), st.floats(1.001, 1.1))
def test_wjm_power_monotone(P, d, s):
    assert wjm_power_constraint(P, d * s) > wjm_power_constraint(P, d)
    assert wjm_power_constraint(min(P * s, 400), d) >= wjm_power_constraint(P, d)


def test_evaluate_contract():
    p = get_problem("ajmb")
    with pytest.raises(ConfigurationError):
        evaluate(p, [1.0, 0.005, 2e5])
    f, g = evaluate(p, [5e-4, 0.005, 315786])
    assert f == pytest.approx(8.254, abs=1e-3)
    assert total_violation(g) == pytest.approx(4.38e-5, rel=1e-3)
    assert total_violation([[-1.0, 2.0], [0.5, 0.5]]).tolist() == [2.0, 1.0]
