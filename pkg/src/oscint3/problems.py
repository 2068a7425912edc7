"""Registry of shipped problems and their independent reference evaluators.

Five canonical problems exercise one special-point kind each, plus the
ship-wake problem:

* gaussian-sp    : interior stationary point, closed-form Gaussian reference
* pole-sp        : stationary point on a single pole plane, factorized 1D oracle
* double-cross   : stationary point on a crossing line of two pole planes
* triple-cross   : triple crossing of three pole planes
* cone           : conical point of a quadric pole, brute-force 3D oracle
* kelvin         : ship wake, residue oracle

The factorized oracles integrate each separated 1D factor with the adaptive
contour routine, so they are independent of the closed-form terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kelvin as kelvin_mod
from . import oracle
from .core import (
    AmplitudeSpec,
    Box3,
    DomainShift,
    PhaseSpec,
    ProblemSpec,
    ScalarField3,
    SingularityComponent,
)

__all__ = [
    "gaussian_field",
    "quadratic_field",
    "ProblemEntry",
    "REGISTRY",
    "get_problem",
]


def gaussian_field(center=(0.0, 0.0, 0.0)) -> ScalarField3:
    """exp(-|xi - c|^2), broadcasting over (..., 3) input."""
    c = np.asarray(center, dtype=float)

    def value(xi):
        d = xi - c
        return np.exp(-np.sum(d * d, axis=-1))

    def grad(xi):
        d = xi - c
        return -2.0 * d * np.exp(-np.sum(d * d))

    def hess(xi):
        d = xi - c
        return (4.0 * np.outer(d, d) - 2.0 * np.eye(3)) * np.exp(-np.sum(d * d))

    return ScalarField3(value, grad, hess, real_on_real=True)


def quadratic_field(A=None, b=(0.0, 0.0, 0.0), c: float = 0.0) -> ScalarField3:
    """(1/2) xi.A.xi + b.xi + c with constant A; covers every shipped g and G."""
    A = np.zeros((3, 3)) if A is None else np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)

    def value(xi):
        q = 0.5 * np.einsum("...i,ij,...j->...", xi, A, xi)
        return q + xi @ b + c

    return ScalarField3(value, lambda xi: A @ xi + b, lambda xi: A,
                        real_on_real=True)


@dataclass(frozen=True)
class ProblemEntry:
    name: str
    build: Callable[..., ProblemSpec]
    reference: Callable[[ProblemSpec, float], complex]
    default_quad: oracle.QuadratureSpec
    real_field: bool = False


def _gauss_factor(lam: float) -> complex:
    # int exp(-x^2) exp(i*lam*x^2/2) dx, principal square root
    return complex(np.sqrt(np.pi / (1 - 0.5j * lam)))


def _pole_factor(lam: float, quadratic: bool = False, T: float = 8.0) -> complex:
    """int over the indented-below line of e^{-w^2} e^{i*lam*(w + [w^2/2])} / w dw."""
    if quadratic:
        f = lambda w: np.exp(-w * w + 0.5j * lam * w * w) / w
    else:
        f = lambda w: np.exp(-w * w) / w
    return oracle.quad_contour_1d(f, oracle.gamma_tilde(-1, r=0.3, T=T), lam)


def _build_gaussian_sp() -> ProblemSpec:
    return ProblemSpec(
        AmplitudeSpec(gaussian_field()),
        PhaseSpec(quadratic_field(np.eye(3))),
        DomainShift(np.zeros(3)),
        Box3(np.full(3, -2.0), np.full(3, 2.0)),
        name="gaussian-sp")


def _ref_gaussian_sp(problem, lam) -> complex:
    return _gauss_factor(lam) ** 3


def _build_pole_sp() -> ProblemSpec:
    plane = SingularityComponent(quadratic_field(b=(1, 0, 0), c=-1.0), -1.0, "plane")
    return ProblemSpec(
        AmplitudeSpec(gaussian_field((1.0, 0.0, 0.0)), (plane,)),
        PhaseSpec(quadratic_field(np.diag([0.0, 1.0, 1.0]), (1, 0, 0))),
        DomainShift(np.array([-0.15, 0.0, 0.0])),
        Box3(np.array([0.0, -1.5, -1.5]), np.array([2.0, 1.5, 1.5])),
        name="pole-sp")


def _ref_pole_sp(problem, lam) -> complex:
    return np.exp(1j * lam) * _pole_factor(lam) * _gauss_factor(lam) ** 2


def _build_double_cross() -> ProblemSpec:
    pA = SingularityComponent(quadratic_field(b=(1, 0, 0)), -1.0, "pA")
    pB = SingularityComponent(quadratic_field(b=(0, 1, 0)), -1.0, "pB")
    return ProblemSpec(
        AmplitudeSpec(gaussian_field(), (pA, pB)),
        PhaseSpec(quadratic_field(np.diag([0.0, 0.0, 1.0]), (1, 1, 0))),
        DomainShift(np.array([-0.15, -0.15, 0.0])),
        Box3(np.full(3, -1.5), np.full(3, 1.5)),
        name="double-cross")


def _ref_double_cross(problem, lam) -> complex:
    return _pole_factor(lam) ** 2 * _gauss_factor(lam)


def _build_triple_cross() -> ProblemSpec:
    comps = tuple(
        SingularityComponent(quadratic_field(b=np.eye(3)[k]), -1.0, f"p{k+1}")
        for k in range(3))
    # the quadratic part keeps the triple point strictly non-stationary on the
    # crossing lines while giving the leading term a nonzero 1/Lambda error
    return ProblemSpec(
        AmplitudeSpec(gaussian_field(), comps),
        PhaseSpec(quadratic_field(np.eye(3), (1, 1, 1))),
        DomainShift(np.array([-0.15, -0.15, -0.15])),
        Box3(np.full(3, -0.6), np.full(3, 0.8)),
        name="triple-cross")


def _ref_triple_cross(problem, lam) -> complex:
    return _pole_factor(lam, quadratic=True) ** 3


def _build_cone() -> ProblemSpec:
    cone = SingularityComponent(quadratic_field(np.diag([2.0, 2.0, -2.0])),
                                -1.0, "cone")
    return ProblemSpec(
        AmplitudeSpec(gaussian_field(), (cone,)),
        PhaseSpec(quadratic_field(b=(0.3, 0.0, 1.0))),
        DomainShift(np.array([0.0, 0.0, -0.25])),
        Box3(np.full(3, -1.0), np.full(3, 1.0)),
        name="cone")


def _ref_cone(problem, lam) -> complex:
    spec = oracle.QuadratureSpec(R=3.0, n=384, taper=0.15)
    val, _ = oracle.quad_deformed_3d(problem, lam, spec)
    return val


def _build_kelvin(z1=2.0, z2=2.0, tau=10.0) -> ProblemSpec:
    return kelvin_mod.kelvin_problem(z1, z2, tau)


def _ref_kelvin(problem, lam) -> complex:
    z1, z2, tau = problem.phase.z
    return oracle.kelvin_oracle(z1, z2, tau, lam)


REGISTRY: dict[str, ProblemEntry] = {
    "gaussian-sp": ProblemEntry("gaussian-sp", _build_gaussian_sp,
                                _ref_gaussian_sp,
                                oracle.QuadratureSpec(R=6.0, n=224)),
    "pole-sp": ProblemEntry("pole-sp", _build_pole_sp, _ref_pole_sp,
                            oracle.QuadratureSpec(R=6.0, n=256)),
    "double-cross": ProblemEntry("double-cross", _build_double_cross,
                                 _ref_double_cross,
                                 oracle.QuadratureSpec(R=6.0, n=256)),
    "triple-cross": ProblemEntry("triple-cross", _build_triple_cross,
                                 _ref_triple_cross,
                                 oracle.QuadratureSpec(R=6.0, n=256)),
    "cone": ProblemEntry("cone", _build_cone, _ref_cone,
                         oracle.QuadratureSpec(R=3.0, n=384)),
    "kelvin": ProblemEntry("kelvin", _build_kelvin, _ref_kelvin,
                           oracle.QuadratureSpec(R=12.0, n=128),
                           real_field=True),
}


def get_problem(name: str, **kwargs) -> tuple[ProblemSpec, ProblemEntry]:
    if name not in REGISTRY:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(REGISTRY)}")
    entry = REGISTRY[name]
    return entry.build(**kwargs), entry
