"""Complex linear-algebra kernels shared by every other module.

Gate application walks the amplitude array by bit-index strides (via a
reshape to a rank-n tensor); no 2**n x 2**n matrix is ever materialized for
circuit simulation.  Dense matrices appear only for small Hamiltonians and
as test oracles.  "Matrix" arguments are plain complex128 numpy arrays.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateTarget,
    NonHermitian,
    NonUnitary,
    TargetOutOfRange,
)
from .state import DensityMatrix, StateVector

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10


def require_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Validate u†u = I to ``atol`` (max entry deviation) and return u."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise NonUnitary(f"u†u deviates from identity by {dev:.3e}")
    return u


def require_hermitian(h: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate h = h† to ``atol`` and return h."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > atol:
        raise NonHermitian(f"h - h† deviates from zero by {dev:.3e}")
    return h


def _check_targets(targets: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    ts = tuple(int(t) for t in targets)
    for t in ts:
        if not 0 <= t < n_qubits:
            raise TargetOutOfRange(f"target {t} outside 0..{n_qubits - 1}")
    if len(set(ts)) != len(ts):
        raise DuplicateTarget(f"duplicate target in {ts}")
    return ts


def apply_k_local_unitary(
    state: StateVector, u: np.ndarray, targets: Sequence[int]
) -> StateVector:
    """Apply a 2**k-dimensional unitary to the joint subspace of ``targets``.

    ``targets[0]`` indexes the most significant bit of u's row/column index;
    a controlled gate therefore lists its control(s) first.  All other
    qubits see the identity.  Norm is preserved to 1e-12.
    """
    ts = _check_targets(targets, state.n_qubits)
    u = require_unitary(u)
    k = len(ts)
    if u.shape[0] != (1 << k):
        raise DimensionMismatch(
            f"{k} targets need a {1 << k}-dim unitary, got {u.shape[0]}"
        )
    n = state.n_qubits
    tensor = state.amps.reshape((2,) * n)
    axes = [n - 1 - t for t in ts]
    tensor = np.moveaxis(tensor, axes, range(k))
    shape = tensor.shape
    tensor = (u @ tensor.reshape(1 << k, -1)).reshape(shape)
    tensor = np.moveaxis(tensor, range(k), axes)
    return StateVector(n, tensor.reshape(-1), copy=False)


def matrix_exp_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """U = exp(-i h t) for Hermitian h, via eigendecomposition.

    All Hamiltonians in this package are small (a few dozen rows), so an
    eigh-based exponential is both exact to machine precision and simple.
    The result is unitary to well under 1e-9.
    """
    h = require_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * t)
    return (evecs * phases) @ evecs.conj().T


def partial_trace(rho: DensityMatrix, keep: Sequence[int]):
    """Reduced density matrix on the ``keep`` qubits.

    The reduced matrix is indexed with the kept qubits in their original
    significance order (the kept qubit of highest index supplies the most
    significant bit).  Trace and Hermiticity are preserved.  Tracing out
    everything (``keep=[]``) returns the scalar trace.
    """
    ks = sorted(_check_targets(keep, rho.n_qubits))
    if not ks:
        return complex(np.trace(rho.mat))
    if len(ks) == rho.n_qubits:
        return rho.copy()
    n = rho.n_qubits
    m = len(ks)
    tensor = rho.mat.reshape((2,) * (2 * n))
    keep_axes = [n - 1 - q for q in reversed(ks)]
    traced_axes = [ax for ax in range(n) if ax not in keep_axes]
    # row and column sides share the axis layout, offset by n
    order = (
        keep_axes
        + [n + ax for ax in keep_axes]
        + traced_axes
        + [n + ax for ax in traced_axes]
    )
    tensor = tensor.transpose(order)
    dim_keep = 1 << m
    dim_rest = 1 << (n - m)
    tensor = tensor.reshape(dim_keep, dim_keep, dim_rest, dim_rest)
    reduced = np.einsum("ijkk->ij", tensor)
    return DensityMatrix(m, reduced, copy=False)


def reduced_density_from_state(
    state: StateVector, keep: Sequence[int]
) -> DensityMatrix:
    """Partial trace of |psi><psi| computed without forming the full projector.

    Reshapes the amplitudes into a (kept, traced) matrix A and returns A A†,
    which keeps wide states (e.g. an 18-qubit pipeline) tractable as long as
    the kept side is small.
    """
    ks = sorted(_check_targets(keep, state.n_qubits))
    n = state.n_qubits
    tensor = state.amps.reshape((2,) * n)
    axes = [n - 1 - q for q in reversed(ks)]
    tensor = np.moveaxis(tensor, axes, range(len(ks)))
    mat = tensor.reshape(1 << len(ks), -1)
    return DensityMatrix(len(ks), mat @ mat.conj().T, copy=False)


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for pure states of equal width."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatch(
            f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}"
        )
    return float(np.abs(np.vdot(a.amps, b.amps)) ** 2)
