"""Record amplification into an environment and cross-term suppression.

Macroscopic distinguishability is modelled by copying the record into n
environment qubits with a tunable per-qubit overlap o between the two
conditional environment states.  Matrix elements of any operator between
the two macroscopic branches then pick up a factor o^n: orthogonal
copies (o = 0) kill them outright, near-identical copies (o close to 1)
only suppress them geometrically.  The environment carries no angular
momentum, so amplification leaves every conservation audit untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .apparatus import CompositeSystem
from .config import NUMERICS
from .kernel import Operator, StateVector

__all__ = [
    "EnvironmentConfig",
    "amplify_record",
    "macroscopic_cross_term",
    "overlap_decay_curve",
]


@dataclass(frozen=True)
class EnvironmentConfig:
    """n_qubits record copies with per-qubit conditional overlap copy_fidelity.

    copy_fidelity = 0 means each qubit is a perfect (orthogonal) copy of
    the record; values approaching 1 mean the qubit barely registers it;
    exactly 1 means the environment carries no record at all.
    """

    n_qubits: int
    copy_fidelity: float

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError(f"n_qubits must be >= 0, got {self.n_qubits!r}")
        if not 0.0 <= self.copy_fidelity <= 1.0:
            raise ValueError(
                f"copy_fidelity must lie in [0, 1], got {self.copy_fidelity!r}"
            )


def _conditional_kets(env: EnvironmentConfig):
    """Product environment states conditioned on record up / down."""
    ket_up = np.array([1.0, 0.0], dtype=np.complex128)
    chi = math.acos(env.copy_fidelity)
    ket_dn = np.array([math.cos(chi), math.sin(chi)], dtype=np.complex128)
    e_up = np.ones(1, dtype=np.complex128)
    e_dn = np.ones(1, dtype=np.complex128)
    for _ in range(env.n_qubits):
        e_up = np.kron(e_up, ket_up)
        e_dn = np.kron(e_dn, ket_dn)
    return e_up, e_dn


def amplify_record(state: StateVector, sys: CompositeSystem,
                   env: EnvironmentConfig) -> StateVector:
    """Copy the record into env.n_qubits fresh qubits.

    Record up leaves each qubit in |0>; record down rotates it to
    cos(chi)|0> + sin(chi)|1> with cos(chi) = copy_fidelity.  The
    operation is a record-controlled product unitary, so branch weights
    and all angular-momentum expectations are unchanged.
    """
    if state.dims[:3] != sys.dims:
        raise ValueError(f"state dims {state.dims} do not match system {sys.dims}")
    if len(state.dims) != 3:
        raise ValueError("state already carries an environment register")
    total = state.dim * 2 ** env.n_qubits
    if total > NUMERICS.max_total_dim:
        raise ValueError(
            f"amplification refused: total dimension {total} exceeds the "
            f"configured maximum {NUMERICS.max_total_dim}"
        )
    if env.n_qubits == 0:
        return state
    e_up, e_dn = _conditional_kets(env)
    t = state.amplitudes.reshape(sys.pa_dim, 2)
    out = np.zeros((sys.pa_dim, 2, 2 ** env.n_qubits), dtype=np.complex128)
    out[:, 0, :] = t[:, 0:1] * e_up[None, :]
    out[:, 1, :] = t[:, 1:2] * e_dn[None, :]
    dims = sys.dims + (2,) * env.n_qubits
    return StateVector(dims, out.reshape(-1))


def macroscopic_cross_term(state: StateVector, a: Operator,
                           sys: CompositeSystem,
                           env: EnvironmentConfig) -> complex:
    """<branch_up| A (x) 1_env |branch_dn> between normalized record sectors.

    a acts on particle (x) apparatus and is extended by the identity over
    the environment; the record label itself is factored out of each
    sector.  The magnitude is bounded by copy_fidelity**n_qubits times the
    unamplified value.
    """
    expected_dims = sys.dims + (2,) * env.n_qubits
    if state.dims != expected_dims:
        raise ValueError(
            f"state dims {state.dims} do not match system + environment "
            f"{expected_dims}"
        )
    if a.dim != sys.pa_dim:
        raise ValueError(
            f"operator dim {a.dim} must act on particle (x) apparatus "
            f"({sys.pa_dim})"
        )
    n_env = 2 ** env.n_qubits
    t = state.amplitudes.reshape(sys.pa_dim, 2, n_env)
    sectors = []
    for r in range(2):
        comp = t[:, r, :]
        weight = float(np.real(np.vdot(comp, comp)))
        if weight < NUMERICS.branch_weight_floor:
            raise ValueError(f"record sector {r} is empty (weight {weight:.3e})")
        sectors.append(comp / math.sqrt(weight))
    up, dn = sectors
    return complex(np.vdot(up, a.entries @ dn))


def overlap_decay_curve(o: float, n_max: int) -> list[tuple[int, float]]:
    """(n, o**n) for n = 0..n_max: the predicted cross-term suppression."""
    if not 0.0 <= o < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {o!r}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max!r}")
    return [(n, o ** n) for n in range(n_max + 1)]
