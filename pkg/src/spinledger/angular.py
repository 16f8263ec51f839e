"""Spin-j operator algebras, coherent spin states, and the Bloch map.

The apparatus in the measurement model is a single large spin-L, so the
same ladder-operator construction serves both the measured particle
(j = 1/2) and the device (j = L up to ~100).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import NUMERICS
from .kernel import Operator, StateVector, apply, expectation, expm_hermitian

__all__ = [
    "SpinOperators",
    "BlochVector",
    "AngularSpread",
    "spin_operators",
    "coherent_spin_state",
    "bloch_vector",
    "angular_spread",
]


def _check_spin(j) -> float:
    two_j = 2 * j
    if abs(two_j - round(two_j)) > 1e-12 or j < 0:
        raise ValueError(f"spin must be a nonnegative half-integer, got {j!r}")
    return round(two_j) / 2.0


@dataclass(frozen=True)
class SpinOperators:
    """The spin-j algebra: Jx, Jy, Jz and ladder operators, dimension 2j+1."""

    j: float
    jx: Operator
    jy: Operator
    jz: Operator
    jplus: Operator
    jminus: Operator

    @property
    def dim(self) -> int:
        return self.jz.dim


def spin_operators(j) -> SpinOperators:
    """Standard ladder-operator construction of the spin-j algebra.

    Jz is diagonal with entries j, j-1, ..., -j and the ladder elements
    are <m+-1|J+-|m> = sqrt(j(j+1) - m(m+-1)).  The commutation relations
    and the Casimir identity are verified before the result is returned.
    """
    j = _check_spin(j)
    dim = round(2 * j + 1)
    m = j - np.arange(dim)
    jz = np.diag(m.astype(np.complex128))
    jp = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(1, dim):
        mm = m[col]
        jp[col - 1, col] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j

    # the float error in these identities grows ~j^2 eps; gate at the
    # operator tolerance so even j = 100 is admitted honestly
    comm = np.max(np.abs(jx @ jy - jy @ jx - 1j * jz))
    casimir = np.max(np.abs(jx @ jx + jy @ jy + jz @ jz - j * (j + 1) * np.eye(dim)))
    if comm > NUMERICS.operator_atol or casimir > NUMERICS.operator_atol:
        raise ValueError(
            f"spin algebra failed self-check at j={j}: comm={comm:.3e}, "
            f"casimir={casimir:.3e}"
        )

    return SpinOperators(
        j=j,
        jx=Operator(jx, hermitian=True),
        jy=Operator(jy, hermitian=True),
        jz=Operator(jz, hermitian=True),
        jplus=Operator(jp),
        jminus=Operator(jm),
    )


def coherent_spin_state(j, theta: float, phi: float) -> StateVector:
    """Maximal-polarization spin-j state along the (theta, phi) direction.

    Built by rotating the highest-weight state |j, j> by theta about the
    axis (-sin phi, cos phi, 0), reusing the spectral exponential, so
    <J> = j * (sin theta cos phi, sin theta sin phi, cos theta).
    """
    ops = spin_operators(j)
    dim = ops.dim
    top = np.zeros(dim, dtype=np.complex128)
    top[0] = 1.0
    if theta == 0.0:
        return StateVector((dim,), top)
    gen = Operator(
        -math.sin(phi) * ops.jx.entries + math.cos(phi) * ops.jy.entries,
        hermitian=True,
    )
    rot = expm_hermitian(gen, theta)
    return apply(rot, StateVector((dim,), top))


@dataclass(frozen=True)
class BlochVector:
    """Unit polarization vector of a normalized spin-1/2 amplitude pair."""

    ux: float
    uy: float
    uz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.ux, self.uy, self.uz])


def bloch_vector(a: complex, b: complex) -> BlochVector:
    """Polarization direction of a|up> + b|down>.

    Components are (2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2); the input pair
    must be normalized.
    """
    a = complex(a)
    b = complex(b)
    nrm2 = abs(a) ** 2 + abs(b) ** 2
    if abs(nrm2 - 1.0) > NUMERICS.state_atol:
        raise ValueError(f"spinor not normalized: |a|^2 + |b|^2 = {nrm2!r}")
    cross = a.conjugate() * b
    return BlochVector(2 * cross.real, 2 * cross.imag,
                       abs(a) ** 2 - abs(b) ** 2)


class AngularSpread(NamedTuple):
    delta_l: float
    delta_theta: float


def angular_spread(apparatus_state: StateVector, ops: SpinOperators) -> AngularSpread:
    """Transverse angular-momentum spread and the orientation angle it implies.

    delta_l is the standard deviation of Jx; delta_theta = delta_l / <Jz>
    is the operational orientation uncertainty of a device polarized
    roughly along +z.  Requires <Jz> > 0, otherwise the orientation of the
    state is undefined for this estimator.
    """
    if apparatus_state.dim != ops.dim:
        raise ValueError(
            f"state dimension {apparatus_state.dim} does not match spin-"
            f"{ops.j} operators (dim {ops.dim})"
        )
    jz_mean = expectation(apparatus_state, ops.jz).real
    if jz_mean <= 0.0:
        raise ValueError(
            f"<Jz> = {jz_mean:.6g} <= 0: orientation undefined for this estimator"
        )
    jx2 = Operator(ops.jx.entries @ ops.jx.entries, hermitian=True)
    var = expectation(apparatus_state, jx2).real - expectation(apparatus_state, ops.jx).real ** 2
    delta_l = math.sqrt(max(var, 0.0))
    return AngularSpread(delta_l=delta_l, delta_theta=delta_l / jz_mean)
