"""Material-removal-rate models for five advanced machining processes.

Every model maximizes MRR subject to surface-roughness or power limits.
Constants are kept exactly as tabulated for each process. All functions
accept scalars or numpy arrays and broadcast.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import EvaluationError
from .base import AS_WRITTEN, MAXIMIZE, PAPER_CALIBRATED, ProblemSpec


@dataclass(frozen=True)
class AjmBrittleConstants:
    eta_a: float = 0.7  # fraction of abrasive particles cutting
    rho_a: float = 3.85e-6  # kg/mm^3
    ra_max: float = 0.8  # um
    sigma_fw: float = 5000.0  # MPa


@dataclass(frozen=True)
class AjmDuctileConstants:
    rho_w: float = 2.7e-6  # kg/mm^3
    h_dw: float = 1.15  # MPa
    ra_max: float = 2.0  # um
    rho_a: float = 2.48e-6  # kg/mm^3
    delta_cw: float = 1.5
    zeta: float = 1.6


@dataclass(frozen=True)
class WjmConstants:
    p_max: float = 50.0  # kW
    sigma_pw: float = 26.2  # MPa
    c_fw: float = 0.005
    sigma_yw: float = 3.9  # MPa
    eta_w: float = 2357.3  # kg mm^-2 s^-1
    x_i: float = 20.0  # mm


@dataclass(frozen=True)
class UsmConstants:
    a_t: float = 20.0  # mm^2
    ra_max: float = 0.8  # um
    sigma_fw: float = 6900.0  # MPa
    k_usm: float = 0.1  # mm^-1
    sigma_ft: float = 28000.0  # MPa

    @property
    def lam(self):
        # flow-stress ratio of work to abrasive
        return self.sigma_fw / self.sigma_ft


@dataclass(frozen=True)
class GrindingConstants:
    sr_max: float = 0.3  # um
    nd_max: float = 7.0


AJMB = AjmBrittleConstants()
AJMD = AjmDuctileConstants()
WJM = WjmConstants()
USM = UsmConstants()
GRINDING = GrindingConstants()


# -- abrasive jet, brittle work material ------------------------------------

def ajmb_objective(M_a, r_m, v_a, c=AJMB):
    coef = 0.0035 * c.eta_a / (c.sigma_fw**0.75 * c.rho_a**0.25)
    return coef * M_a * np.power(v_a, 1.5) + 0.0 * r_m


def ajmb_constraint(M_a, r_m, v_a, c=AJMB):
    return (18.26 / c.ra_max) * np.sqrt(c.rho_a / c.sigma_fw) * r_m * v_a - 1.0 + 0.0 * M_a


# -- abrasive jet, ductile work material ------------------------------------

def ajmd_objective(M_a, r_m, v_a, c=AJMD):
    coef = 1.0436e-6 * c.zeta * c.rho_w / (c.delta_cw**2 * c.h_dw**1.5 * c.rho_a**0.5)
    return coef * M_a * np.power(v_a, 3) + 0.0 * r_m


def ajmd_constraint(M_a, r_m, v_a, c=AJMD):
    return (25.82 / c.ra_max) * np.sqrt(c.rho_a / c.h_dw) * r_m * v_a - 1.0 + 0.0 * M_a


# -- water jet ----------------------------------------------------------------

def wjm_kappa(X, c=WJM):
    """Ratio of the initial jet region length to stand-off distance."""
    return c.x_i / np.asarray(X, dtype=float)


def wjm_psi(P_w, K, c=WJM, strict=True):
    """Pressure-ratio term; undefined when the jet pressure is below the work threshold.

    With ``strict`` a negative radicand raises EvaluationError, otherwise
    the affected entries are NaN.
    """
    radicand = 1.0 - c.sigma_pw * np.asarray(K, dtype=float) / np.asarray(P_w, dtype=float)
    if strict and np.any(radicand < 0):
        raise EvaluationError(
            f"wjm psi: negative radicand {np.min(radicand):.6g} (P_w={P_w}, K={K})"
        )
    with np.errstate(invalid="ignore"):
        return 1.0 - np.sqrt(radicand)


def wjm_phi(psi, K):
    return (2.0 / K) * (0.5 - 0.57 * psi + 0.2 * psi**2)


def wjm_objective(P_w, d_wn, f_n, X, c=WJM, strict=True):
    K = wjm_kappa(X, c)
    psi = wjm_psi(P_w, K, c, strict=strict)
    phi = wjm_phi(psi, K)
    with np.errstate(invalid="ignore"):
        return (
            (0.297 / c.c_fw)
            * np.power(d_wn, 1.5)
            * f_n
            * np.sqrt(X)
            * np.power(psi, 2.0 / 3.0)
            * (1.0 - c.sigma_yw / (2.0 * P_w * phi))
            * (1.0 - np.exp(-2256.76 * c.c_fw * P_w * phi / (c.eta_w * f_n)))
        )


WJM_POWER_COEF = 0.777 * 10**-1.5


def wjm_power_constraint(P_w, d_wn, c=WJM):
    return WJM_POWER_COEF * np.power(d_wn, 2) * np.power(P_w, 1.5) / c.p_max - 1.0


# -- ultrasonic ---------------------------------------------------------------

def usm_prefactor(c=USM):
    return 4.963 * c.a_t**0.25 * c.k_usm**0.75 / (c.sigma_fw * (1.0 + c.lam)) ** 0.75


def usm_objective(A_v, f_v, d_m, C_av, F_s, c=USM):
    return (
        usm_prefactor(c)
        * np.power(C_av, 0.25)
        * np.power(F_s, 0.75)
        * np.power(A_v, 0.75)
        * d_m
        * f_v
    )


def usm_constraint(A_v, f_v, d_m, C_av, F_s, c=USM):
    coef = 1154.7 / (np.sqrt(c.a_t * c.sigma_fw * (1.0 + c.lam)) * c.ra_max)
    return coef * np.sqrt(F_s * A_v * d_m / C_av) - 1.0 + 0.0 * f_v


# -- grinding -----------------------------------------------------------------

def grinding_objective(f_r, d_c, M=None):
    return np.asarray(f_r, dtype=float) * d_c


def grinding_surface_roughness(f_r, d_c, M):
    return 0.145 * np.power(d_c, 0.1939) * np.power(f_r, 0.7071) * np.power(M, -0.2343)


def grinding_flaws(f_r, d_c):
    return 29.67 * np.power(d_c, 0.4167) * np.power(f_r, 0.8333)


def grinding_sr_constraint(f_r, d_c, M, c=GRINDING):
    return grinding_surface_roughness(f_r, d_c, M) / c.sr_max - 1.0


def grinding_nd_constraint(f_r, d_c, c=GRINDING):
    return grinding_flaws(f_r, d_c) / c.nd_max - 1.0


# -- problem specs ------------------------------------------------------------

def _columns(fn, **kw):
    def wrapped(X):
        return fn(*X.T, **kw)

    return wrapped


def _ajmb_g(X):
    return ajmb_constraint(*X.T)[:, np.newaxis]


def _ajmd_g(X):
    return ajmd_constraint(*X.T)[:, np.newaxis]


def _wjm_f(X):
    return wjm_objective(*X.T, strict=False)


def _wjm_g(X):
    return wjm_power_constraint(X[:, 0], X[:, 1])[:, np.newaxis]


def _usm_g(X):
    return usm_constraint(*X.T)[:, np.newaxis]


def _grinding_g(X):
    f_r, d_c, M = X.T
    return np.column_stack([grinding_sr_constraint(f_r, d_c, M), grinding_nd_constraint(f_r, d_c)])


def _grinding_f(X):
    return X[:, 0] * X[:, 1]


def make_ajmb(bounds_mode=AS_WRITTEN):
    return ProblemSpec(
        name="ajmb",
        lower=[1.67e-5, 0.005, 1.5e5],
        upper=[5e-4, 0.075, 4e5],
        sense=MAXIMIZE,
        objective=_columns(ajmb_objective),
        constraints=_ajmb_g,
        constraint_count=1,
        variables=("M_a", "r_m", "v_a"),
        units=("kg/s", "mm", "mm/s"),
        constants=AJMB,
        bounds_mode=bounds_mode,
        default_k1=-10.0,
        default_k2=1.0,
        description="Abrasive jet machining, brittle work material",
        constraint_names=("surface_roughness",),
    )


def make_ajmd(bounds_mode=AS_WRITTEN):
    # the calibrated lower velocity bound admits the tabulated optimum near v_a = 10549
    v_low = 1.5e3 if bounds_mode == PAPER_CALIBRATED else 1.5e5
    return ProblemSpec(
        name="ajmd",
        lower=[1.67e-5, 0.005, v_low],
        upper=[5e-4, 0.075, 4e5],
        sense=MAXIMIZE,
        objective=_columns(ajmd_objective),
        constraints=_ajmd_g,
        constraint_count=1,
        variables=("M_a", "r_m", "v_a"),
        units=("kg/s", "mm", "mm/s"),
        constants=AJMD,
        bounds_mode=bounds_mode,
        default_k1=-1.0,
        default_k2=1.5,
        description="Abrasive jet machining, ductile work material",
        constraint_names=("surface_roughness",),
    )


def make_wjm(bounds_mode=AS_WRITTEN):
    return ProblemSpec(
        name="wjm",
        lower=[1.0, 0.05, 1.0, 2.5],
        upper=[400.0, 0.5, 300.0, 50.0],
        sense=MAXIMIZE,
        objective=_wjm_f,
        constraints=_wjm_g,
        constraint_count=1,
        variables=("P_w", "d_wn", "f_n", "X"),
        units=("MPa", "mm", "mm/s", "mm"),
        constants=WJM,
        bounds_mode=bounds_mode,
        default_k1=-1.0,
        default_k2=1.0,
        description="Water jet machining",
        constraint_names=("power",),
    )


def make_usm(bounds_mode=AS_WRITTEN):
    return ProblemSpec(
        name="usm",
        lower=[0.005, 10000.0, 0.007, 0.05, 4.5],
        upper=[0.1, 40000.0, 0.15, 0.5, 45.0],
        sense=MAXIMIZE,
        objective=_columns(usm_objective),
        constraints=_usm_g,
        constraint_count=1,
        variables=("A_v", "f_v", "d_m", "C_av", "F_s"),
        units=("mm", "Hz", "mm", "-", "N"),
        constants=USM,
        bounds_mode=bounds_mode,
        default_k1=-10.0,
        default_k2=1.0,
        description="Ultrasonic machining",
        constraint_names=("surface_roughness",),
    )


def make_grinding(bounds_mode=AS_WRITTEN):
    return ProblemSpec(
        name="grinding",
        lower=[0.86, 5.0, 120.0],
        upper=[13.4, 30.0, 500.0],
        sense=MAXIMIZE,
        objective=_grinding_f,
        constraints=_grinding_g,
        constraint_count=2,
        variables=("f_r", "d_c", "M"),
        units=("m/min", "um", "grit"),
        constants=GRINDING,
        bounds_mode=bounds_mode,
        default_k1=-100.0,
        default_k2=5.0,
        description="Surface grinding",
        constraint_names=("surface_roughness", "flaws"),
    )
