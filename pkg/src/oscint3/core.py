"""Foundational types for oscillatory integrals over shifted copies of R^3.

The integrals treated here have the form

    u(Lambda) = pref * int_Gamma F(xi) exp(i*Lambda*G(xi)) dxi,

where xi ranges over a slightly complexified copy of R^3 (Gamma = R^3 + i*eta),
the amplitude F factors as N(xi) * prod_j g_j(xi)^mu_j with analytic g_j, and
G is the phase.  Everything downstream (detection of contributing points, the
closed-form leading terms, the quadrature oracles) consumes the types defined
in this module.

Points are plain numpy arrays of shape (3,); fields are triples of callables
(value, gradient, hessian) bundled in :class:`ScalarField3`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "TangentialShift",
    "IndeterminateSide",
    "ScalarField3",
    "SingularityComponent",
    "AmplitudeSpec",
    "PhaseSpec",
    "DomainShift",
    "Box3",
    "ProblemSpec",
    "volume_form",
    "is_desired",
    "bypass_side",
    "check_field_derivatives",
]

# Membership / tangency tolerances; all shipped problems are O(1)-scaled.
SURFACE_TOL = 1e-10
TANGENCY_RTOL = 1e-12


class TangentialShift(Exception):
    """The shift eta is (numerically) tangent to a singularity surface."""


class IndeterminateSide(Exception):
    """grad(G) . eta is too close to zero to decide the deformation side."""


def as_point(x) -> np.ndarray:
    """Coerce to a (3,) array, rejecting non-finite components."""
    p = np.asarray(x)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    if not np.all(np.isfinite(p.view(float) if p.dtype.kind == "c" else p)):
        raise ValueError("non-finite point component")
    return p


@dataclass(frozen=True)
class ScalarField3:
    """An analytic scalar function of three (complex) variables.

    Parameters
    ----------
    value, gradient, hessian : callables
        Closed-form evaluators; `gradient` returns a (3,) array, `hessian` a
        symmetric (3, 3) array.  All accept real or complex (3,) input.
    real_on_real : bool
        Declares that the field takes real values at real points.
    """

    value: Callable[[np.ndarray], complex]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    real_on_real: bool = False

    def __call__(self, xi) -> complex:
        return self.value(np.asarray(xi))

    def grad(self, xi) -> np.ndarray:
        return np.asarray(self.gradient(np.asarray(xi)))

    def hess(self, xi) -> np.ndarray:
        return np.asarray(self.hessian(np.asarray(xi)))


def check_field_derivatives(f: ScalarField3, points: Sequence[np.ndarray],
                            step: float = 1e-5, rtol: float = 1e-6) -> None:
    """Cross-check gradient/hessian against central differences of `value`.

    Raises AssertionError on mismatch; used by the test suite on every shipped
    field so that hand-coded derivatives cannot silently disagree.
    """
    eye = np.eye(3)
    for p in points:
        p = as_point(p).astype(complex)
        scale = max(1.0, float(np.max(np.abs(p))))
        h = step * scale
        g = f.grad(p)
        fd_g = np.array([(f(p + h * eye[k]) - f(p - h * eye[k])) / (2 * h)
                         for k in range(3)])
        ref = max(1.0, float(np.max(np.abs(g))))
        assert np.max(np.abs(fd_g - g)) <= rtol * ref, "gradient mismatch"
        H = f.hess(p)
        assert np.max(np.abs(H - H.T)) <= 1e-12 * max(1.0, np.max(np.abs(H)))
        fd_H = np.array([[(f(p + h * eye[j] + h * eye[k])
                           - f(p + h * eye[j] - h * eye[k])
                           - f(p - h * eye[j] + h * eye[k])
                           + f(p - h * eye[j] - h * eye[k])) / (4 * h * h)
                          for k in range(3)] for j in range(3)])
        refH = max(1.0, float(np.max(np.abs(H))))
        assert np.max(np.abs(fd_H - H)) <= 200 * rtol * refH, "hessian mismatch"


@dataclass(frozen=True)
class SingularityComponent:
    """One factor g^mu of the amplitude; sigma = {g = 0} is where F blows up.

    mu must be -1 (simple pole) or non-integer (branch power); other integer
    powers are either regular or reducible and are not admitted.
    """

    g: ScalarField3
    mu: float
    label: str

    def __post_init__(self):
        mu = self.mu
        if mu != -1 and float(mu) == int(mu):
            raise ValueError(f"component {self.label!r}: mu must be -1 or non-integer, got {mu}")
        if not self.g.real_on_real:
            raise ValueError(f"component {self.label!r}: g must be real-on-real")


@dataclass(frozen=True)
class AmplitudeSpec:
    """Factored amplitude F(xi) = N(xi) * prod_j g_j(xi)^mu_j."""

    smooth_factor: ScalarField3
    components: tuple[SingularityComponent, ...] = ()

    def value(self, xi) -> complex:
        """Evaluate F away from the singularities (principal branch powers)."""
        return complex(self.value_vec(np.asarray(xi)))

    def value_vec(self, xi: np.ndarray):
        """Vectorized evaluation over (..., 3) input; evaluators broadcast."""
        out = self.smooth_factor.value(xi) + 0j
        for c in self.components:
            gv = c.g.value(xi)
            if c.mu == -1:
                out = out / gv
            else:
                out = out * np.power(gv, c.mu)
        return out


@dataclass(frozen=True)
class PhaseSpec:
    """Phase G(xi; z) with its z-parameters already bound.

    `with_z` rebinds the spatial/temporal parameters; detection and the
    asymptotic formulas only ever see G as a field of xi.
    """

    G: ScalarField3
    z: tuple[float, ...] = ()
    family: Optional[Callable[[tuple[float, ...]], ScalarField3]] = None

    def with_z(self, z: Sequence[float]) -> "PhaseSpec":
        if self.family is None:
            raise ValueError("phase has no z-dependence")
        z = tuple(float(v) for v in z)
        return replace(self, G=self.family(z), z=z)


@dataclass(frozen=True)
class DomainShift:
    """Constant imaginary displacement: Gamma = R^3 + i*eta."""

    eta: np.ndarray
    scale: float = field(init=False)

    def __post_init__(self):
        e = as_point(self.eta).astype(float)
        object.__setattr__(self, "eta", e)
        object.__setattr__(self, "scale", float(np.linalg.norm(e)))
        if self.scale == 0.0:
            # zero shift is allowed (undeformed problems like T1)
            pass

    def at(self, x) -> np.ndarray:
        return self.eta


@dataclass(frozen=True)
class Box3:
    """Axis-aligned search box, optionally with a small excluded ball."""

    lo: np.ndarray
    hi: np.ndarray
    excluded_center: Optional[np.ndarray] = None
    excluded_radius: float = 0.0

    def __post_init__(self):
        lo = as_point(self.lo).astype(float)
        hi = as_point(self.hi).astype(float)
        if np.any(hi <= lo):
            raise ValueError("empty search box")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.excluded_center is not None:
            object.__setattr__(self, "excluded_center",
                               as_point(self.excluded_center).astype(float))

    def contains(self, p, margin: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        if np.any(p < self.lo - margin) or np.any(p > self.hi + margin):
            return False
        if self.excluded_center is not None:
            if np.linalg.norm(p - self.excluded_center) < self.excluded_radius:
                return False
        return True

    def grid(self, n: int) -> np.ndarray:
        """Uniform n^3 seed grid (interior nodes), excluded ball removed."""
        axes = [np.linspace(self.lo[k], self.hi[k], n + 2)[1:-1] for k in range(3)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        if self.excluded_center is not None:
            keep = np.linalg.norm(pts - self.excluded_center, axis=1) >= self.excluded_radius
            pts = pts[keep]
        return pts


@dataclass(frozen=True)
class ProblemSpec:
    """A fully assembled integral: amplitude, phase, shift, region, prefactor."""

    amplitude: AmplitudeSpec
    phase: PhaseSpec
    shift: DomainShift
    search_region: Box3
    prefactor: complex = 1.0
    name: str = ""


def volume_form(v1, v2, v3) -> complex:
    """Signed complex volume of the parallelepiped spanned by three vectors."""
    return complex(np.linalg.det(np.array([v1, v2, v3])))


def is_desired(shift: DomainShift, phase: PhaseSpec, p) -> bool:
    """Whether the shift already damps the exponential at p (Im G > 0 side).

    True iff grad(G)(p) . eta > 0.  Raises IndeterminateSide in the tangential
    case |grad(G) . eta| <= 1e-12 * |grad(G)| |eta|.
    """
    p = as_point(p)
    gG = np.real(phase.G.grad(p))
    eta = shift.at(p)
    s = float(gG @ eta)
    if abs(s) <= TANGENCY_RTOL * np.linalg.norm(gG) * np.linalg.norm(eta):
        raise IndeterminateSide(f"grad(G).eta ~ 0 at {p}")
    return s > 0


def bypass_side(shift: DomainShift, comp: SingularityComponent, p) -> int:
    """Side of the surface {g = 0} on which Gamma passes at p.

    Returns sign(eta . grad g): +1 means Gamma runs through the half-space
    where g has positive imaginary part, i.e. bypasses "above" in the
    direction of increasing g.
    """
    p = as_point(p)
    gv = complex(comp.g(p))
    if abs(gv) > SURFACE_TOL:
        raise ValueError(f"point not on surface {comp.label!r}: |g| = {abs(gv):.3e}")
    n = np.real(comp.g.grad(p))
    eta = shift.at(p)
    s = float(eta @ n)
    if abs(s) <= TANGENCY_RTOL * np.linalg.norm(eta) * np.linalg.norm(n):
        raise TangentialShift(f"eta tangent to {comp.label!r} at {p}")
    return 1 if s > 0 else -1
