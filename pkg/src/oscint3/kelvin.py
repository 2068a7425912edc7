"""The ship-wake integral: problem construction, closed-form special-point
geometry, field synthesis, and wavefront rendering.

Integration variables are xi = (xi1, xi2, varpi) with phase
G = xi1*z1 + xi2*z2 - varpi*tau and amplitude

    F = xi1*varpi / ((varpi - xi1) * (varpi^2 - sqrt(xi1^2 + xi2^2))),

both simple poles.  The domain is shifted up in varpi by i*eps.  Behind the
body, stationary points of G on the curve where both pole surfaces cross
generate the two wave families confined to the wedge of half-angle
arctan(1/(2*sqrt(2))); a stationary point on the dispersion cone generates the
circular transient from the onset of motion.

The closed forms here are an independent derivation of the same frames the
generic detect/asym path produces; the test suite checks they agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .asym import AsymptoticTerm
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
    "KELVIN_PREFACTOR",
    "WEDGE_SLOPE",
    "OutOfRange",
    "DegenerateFamily",
    "MergeProximity",
    "KelvinParams",
    "FieldGrid",
    "kelvin_problem",
    "curve_L",
    "curve_L_tangent",
    "stationary_frequencies",
    "wedge_test",
    "kelvin_wave_terms",
    "transient_term",
    "field_point",
    "field_map",
    "render_wavefronts",
]

KELVIN_PREFACTOR = 1j / (8 * np.pi ** 3)
WEDGE_SLOPE = 1 / (2 * np.sqrt(2))
EPS_SHIFT = 1e-3

# mask bits for FieldGrid samples
MASK_WAVE = 1        # wave-family terms active
MASK_TRANSIENT = 2   # transient term active
MASK_INVALID = 4     # sample excluded (z2 strip, wedge margin, merge proximity)


class OutOfRange(Exception):
    pass


class DegenerateFamily(Exception):
    """Wave family too close to the wedge boundary (beta ~ 0, merge regime)."""


class MergeProximity(Exception):
    """Transient point too close to merging with a crossing-curve point."""


@dataclass(frozen=True)
class KelvinParams:
    z1: float
    z2: float
    tau: float
    Lambda: float

    @property
    def lam(self) -> float:
        if self.tau == self.z1:
            raise ValueError("lambda undefined at z1 = tau")
        return self.z2 / (self.tau - self.z1)


@dataclass
class FieldGrid:
    z1_axis: np.ndarray
    z2_axis: np.ndarray
    values: np.ndarray       # real field samples, shape (n1, n2)
    mask: np.ndarray         # int bitmask per sample
    tau: float
    Lambda: float


def _field(value, gradient, hessian, real=True) -> ScalarField3:
    return ScalarField3(value, gradient, hessian, real_on_real=real)


def kelvin_problem(z1: float = 0.0, z2: float = 0.0, tau: float = 0.0,
                   search_radius: float = 6.0) -> ProblemSpec:
    """Assemble the ship-wake integral for given observation point and time."""

    g1 = _field(lambda xi: xi[..., 2] - xi[..., 0],
                lambda xi: np.array([-1.0, 0.0, 1.0]),
                lambda xi: np.zeros((3, 3)))

    def rho(xi):
        return np.sqrt(xi[..., 0] ** 2 + xi[..., 1] ** 2)

    def g2_grad(xi):
        r = rho(xi)
        return np.array([-xi[0] / r, -xi[1] / r, 2 * xi[2]])

    def g2_hess(xi):
        x1, x2 = xi[0], xi[1]
        r = rho(xi)
        H = np.zeros((3, 3), dtype=complex)
        H[0, 0] = -x2 ** 2 / r ** 3
        H[1, 1] = -x1 ** 2 / r ** 3
        H[0, 1] = H[1, 0] = x1 * x2 / r ** 3
        H[2, 2] = 2.0
        return H

    g2 = _field(lambda xi: xi[..., 2] ** 2 - rho(xi), g2_grad, g2_hess)

    N = _field(lambda xi: xi[..., 0] * xi[..., 2],
               lambda xi: np.array([xi[2], 0.0 * xi[2], xi[0]]),
               lambda xi: np.array([[0.0, 0, 1], [0, 0, 0], [1, 0, 0]]))

    def phase_family(z):
        zz1, zz2, tt = z
        return _field(lambda xi: xi[..., 0] * zz1 + xi[..., 1] * zz2 - xi[..., 2] * tt,
                      lambda xi: np.array([zz1, zz2, -tt]),
                      lambda xi: np.zeros((3, 3)))

    z = (float(z1), float(z2), float(tau))
    phase = PhaseSpec(G=phase_family(z), z=z, family=phase_family)
    amp = AmplitudeSpec(N, (SingularityComponent(g1, -1.0, "pole-line"),
                            SingularityComponent(g2, -1.0, "dispersion-cone")))
    R = search_radius
    box = Box3(np.array([-R, -R, -R]), np.array([R, R, R]),
               excluded_center=np.zeros(3), excluded_radius=0.05)
    return ProblemSpec(amp, phase, DomainShift(np.array([0.0, 0.0, EPS_SHIFT])),
                       box, prefactor=KELVIN_PREFACTOR, name="kelvin")


def curve_L(w: float, branch: int = +1) -> np.ndarray:
    """Point of the crossing curve of the two pole surfaces at frequency w."""
    if abs(w) < 1:
        raise OutOfRange(f"|w| >= 1 required, got {w}")
    return np.array([w, branch * np.sqrt(w ** 4 - w ** 2), w])


def curve_L_tangent(w: float, branch: int = +1) -> np.ndarray:
    if abs(w) <= 1:
        raise OutOfRange(f"|w| > 1 required, got {w}")
    return np.array([1.0, branch * (2 * w ** 2 - 1) / np.sqrt(w ** 2 - 1), 1.0])


def stationary_frequencies(lam: float) -> Optional[tuple[float, float]]:
    """The two positive stationary frequencies on L, (diverging, transverse),
    or None outside the wedge (1 - 8*lam^2 < 0)."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    d = 1 - 8 * lam ** 2
    if d < 0:
        return None
    rd = np.sqrt(d)
    den = 2 * np.sqrt(2) * abs(lam)
    w1 = np.sqrt(4 * lam ** 2 + 1 + rd) / den
    w2 = np.sqrt(4 * lam ** 2 + 1 - rd) / den
    return w1, w2


def wedge_test(z1: float, z2: float, tau: float) -> bool:
    """Inside the wave wedge: behind the body and |z2/(tau-z1)| <= 1/(2*sqrt(2))."""
    if tau - z1 <= 0:
        return False
    return bool(abs(z2 / (tau - z1)) <= WEDGE_SLOPE)


def _wave_frame(w: float, z1: float, z2: float, tau: float):
    """Closed-form frame scalars at the crossing point with frequency w > 1."""
    a1 = -z1 + (tau - z1) / (2 * w ** 2 - 1)
    a2 = -abs(z2) * w / np.sqrt(w ** 2 - 1)
    beta = abs(z2) * w * (2 * w ** 2 - 3) / (w ** 2 - 1) ** 1.5
    J = abs((1 / z2) / (z1 - (tau - z1) / (2 * w ** 2 - 1)))
    G0 = w ** 3 * (z1 - tau) / (2 * w ** 2 - 1)
    return a1, a2, beta, J, G0


def kelvin_wave_terms(params: KelvinParams) -> list[AsymptoticTerm]:
    """Contributing wave-family terms (representative half; conjugate points
    are accounted for by the 2*Re at field synthesis).

    Family verdicts: the trail must be behind the body and formed, which is
    alpha1 < 0 together with the upward bypass in varpi (alpha2*w < 0, always
    true for w > 1).  Raises DegenerateFamily in the merge regime |beta| <= 1e-6.
    """
    z1, z2, tau = params.z1, abs(params.z2), params.tau
    if not wedge_test(z1, z2, tau):
        return []
    ws = stationary_frequencies(z2 / (tau - z1))
    if ws is None:
        return []
    terms = []
    for w in ws:
        a1, a2, beta, J, G0 = _wave_frame(w, z1, z2, tau)
        if abs(beta) <= 1e-6:
            raise DegenerateFamily(f"family at w={w:.6f} near the wedge boundary")
        if not (a1 < 0 and a2 * w < 0):
            continue
        C0 = w * w * a1 * a2   # N = xi1*varpi = w^2 on L; alpha^{-mu} with mu=-1
        A = (C0 * (2j * np.pi) ** 2 * np.exp(0.25j * np.pi * np.sign(beta))
             * np.sqrt(2 * np.pi) * J / np.sqrt(abs(beta)))
        terms.append(AsymptoticTerm(A, -0.5, G0))
    return terms


def transient_term(params: KelvinParams) -> Optional[AsymptoticTerm]:
    """The cylindrical wave from the onset of motion: stationary point on the
    dispersion cone at varpi* = tau/(2*r).  None when tau <= 0 (causality)."""
    z1, z2, tau = params.z1, abs(params.z2), params.tau
    if tau <= 0:
        return None
    r = np.hypot(z1, z2)
    if r == 0:
        raise ValueError("transient undefined at the origin")
    if abs(2 * r - tau * z1 / r) <= 1e-3:
        raise MergeProximity("transient point merging with a crossing point")
    ws = tau / (2 * r)
    phi = np.arctan2(z2, z1)
    alpha = -r
    b2 = 2 * r ** 3 / tau ** 2
    b3 = -4 * r ** 3 / tau ** 2
    J = 1 / tau                      # orientation-corrected Jacobian
    G0 = -tau ** 2 / (4 * r)
    xi1 = ws ** 2 * np.cos(phi)
    C00 = xi1 * ws / (ws - xi1) * alpha
    A = (C00 * 2j * np.pi
         * np.exp(0.25j * np.pi * (np.sign(b2) + np.sign(b3)))
         * 2 * np.pi * J / np.sqrt(abs(b2 * b3)))
    return AsymptoticTerm(A, -1.0, G0)


def field_point(z1: float, z2: float, tau: float, lam: float) -> float:
    """Real field value at one sample from the closed-form terms."""
    p = KelvinParams(z1, z2, tau, lam)
    total = sum((t.value(lam) for t in kelvin_wave_terms(p)), 0j)
    tt = transient_term(p)
    if tt is not None:
        total += tt.value(lam)
    return 2 * float(np.real(KELVIN_PREFACTOR * total))


def field_map(z1_axis, z2_axis, tau: float, lam: float) -> FieldGrid:
    """Field over a rectangular (z1, z2) grid; failures become mask bits,
    never exceptions.  The z2 < 0 half-plane is the mirror of z2 > 0."""
    z1_axis = np.asarray(z1_axis, dtype=float)
    z2_axis = np.asarray(z2_axis, dtype=float)
    vals = np.zeros((len(z1_axis), len(z2_axis)))
    mask = np.zeros(vals.shape, dtype=int)
    for i, a in enumerate(z1_axis):
        for j, b in enumerate(z2_axis):
            m = 0
            total = 0j
            if abs(b) < 0.05 or np.hypot(a, b) < 0.05:
                mask[i, j] = MASK_INVALID
                continue
            p = KelvinParams(a, abs(b), tau, lam)
            if wedge_test(a, abs(b), tau):
                lam_c = abs(b) / (tau - a)
                if WEDGE_SLOPE - lam_c < 0.02:
                    m |= MASK_INVALID
                else:
                    try:
                        wt = kelvin_wave_terms(p)
                        if wt:
                            m |= MASK_WAVE
                        total += sum((t.value(lam) for t in wt), 0j)
                    except DegenerateFamily:
                        m |= MASK_INVALID
            if not m & MASK_INVALID:
                try:
                    tt = transient_term(p)
                    if tt is not None:
                        m |= MASK_TRANSIENT
                        total += tt.value(lam)
                except MergeProximity:
                    m |= MASK_INVALID
            if not m & MASK_INVALID:
                vals[i, j] = 2 * float(np.real(KELVIN_PREFACTOR * total))
            mask[i, j] = m
    return FieldGrid(z1_axis, z2_axis, vals, mask, tau, lam)


def render_wavefronts(z1_axis, z2_axis, tau: float, lam: float,
                      family: int) -> np.ndarray:
    """cos(Lambda * G*) of one wave family over the grid; NaN outside the
    wedge (rendered neutral gray downstream).  family: 1 diverging, 2 transverse."""
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    z1_axis = np.asarray(z1_axis, dtype=float)
    z2_axis = np.asarray(z2_axis, dtype=float)
    img = np.full((len(z1_axis), len(z2_axis)), np.nan)
    for i, a in enumerate(z1_axis):
        for j, b in enumerate(z2_axis):
            if not wedge_test(a, abs(b), tau) or abs(b) < 1e-12:
                continue
            ws = stationary_frequencies(abs(b) / (tau - a))
            if ws is None:
                continue
            w = ws[family - 1]
            G0 = w ** 3 * (a - tau) / (2 * w ** 2 - 1)
            img[i, j] = np.cos(lam * G0)
    return img
