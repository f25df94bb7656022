"""Pure-state and mixed-state containers, measurement, entanglement checks.

Bit convention (fixed repo-wide): qubit ``i`` carries binary weight ``2**i``,
so the amplitude at array index ``k`` belongs to the basis state whose qubit
``i`` holds bit ``i`` of ``k``.  A register loaded with the value ``a`` is
exactly the basis state at index ``a``.  Display strings put the most
significant qubit leftmost, e.g. ``basis_state(3, 6)`` prints as ``|110>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, TargetOutOfRange, ValueOutOfRange

MAX_QUBITS = 24

NORM_ATOL = 1e-10
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
SCHMIDT_ATOL = 1e-8

#: Identifier of the pseudo-random generator used by every seeded operation.
#: Echoed in CLI output so runs are reproducible bit-for-bit.
RNG_ALGORITHM = "numpy-pcg64"


def make_rng(seed) -> np.random.Generator:
    """Return the package-wide seedable generator (PCG64).

    Accepts an integer seed or an existing Generator (passed through), so
    multi-stage pipelines can share one stream.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


class StateVector:
    """Pure state of ``n_qubits`` qubits: 2**n complex amplitudes, unit norm.

    Instances are value-semantic: operations return new states and never
    mutate their inputs, so sharing across threads is safe.
    """

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps, *, copy: bool = True):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueOutOfRange(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
            )
        arr = np.array(amps, dtype=np.complex128, copy=copy).reshape(-1)
        if arr.size != 1 << n_qubits:
            raise DimensionMismatch(
                f"expected {1 << n_qubits} amplitudes for {n_qubits} qubits, "
                f"got {arr.size}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueOutOfRange("amplitudes must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueOutOfRange(f"state norm {norm!r} deviates from 1")
        self.n_qubits = n_qubits
        self.amps = arr

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        """Born probabilities over the full computational basis."""
        return np.abs(self.amps) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps, copy=True)

    def ket_string(self, eps: float = 1e-9) -> str:
        """Human-readable superposition, most significant qubit leftmost."""
        terms = []
        for k, amp in enumerate(self.amps):
            if abs(amp) <= eps:
                continue
            label = format(k, f"0{self.n_qubits}b")
            re, im = amp.real, amp.imag
            if abs(im) <= eps:
                coef = f"{re:+.6g}"
            elif abs(re) <= eps:
                coef = f"{im:+.6g}i"
            else:
                coef = f"+({re:.6g}{im:+.6g}i)"
            terms.append(f"{coef}|{label}>")
        return " ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"StateVector({self.n_qubits}, {self.ket_string()})"


class DensityMatrix:
    """Mixed state: 2**n x 2**n Hermitian, positive semidefinite, unit trace.

    Hermiticity and trace are always validated; the eigenvalue floor is
    checked up to 8 qubits, past which the O(dim^3) eigendecomposition
    would dominate every wide partial trace.
    """

    __slots__ = ("n_qubits", "mat")

    def __init__(self, n_qubits: int, mat, *, copy: bool = True):
        if not 1 <= n_qubits <= 12:
            raise ValueOutOfRange(
                f"density matrices supported for 1..12 qubits, got {n_qubits}"
            )
        dim = 1 << n_qubits
        arr = np.array(mat, dtype=np.complex128, copy=copy)
        if arr.shape != (dim, dim):
            raise DimensionMismatch(
                f"expected shape {(dim, dim)}, got {arr.shape}"
            )
        if np.max(np.abs(arr - arr.conj().T)) > HERMITICITY_ATOL:
            raise ValueOutOfRange("density matrix is not Hermitian")
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueOutOfRange(f"trace {tr!r} deviates from 1")
        if dim <= 256 and float(np.min(np.linalg.eigvalsh(arr))) < EIGENVALUE_FLOOR:
            raise ValueOutOfRange("density matrix has a negative eigenvalue")
        self.n_qubits = n_qubits
        self.mat = arr

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.mat, copy=True)

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a projective measurement in the computational basis.

    ``outcome`` lists the measured bits most significant first: character
    ``i`` from the right is the result for ``measured_qubits[i]``, matching
    the repo-wide weight convention (``outcome_value`` carries bit ``i`` of
    ``measured_qubits[i]``).
    """

    measured_qubits: tuple[int, ...]
    outcome: str
    outcome_value: int
    probability: float
    post_state: StateVector


def basis_state(n: int, value: int) -> StateVector:
    """Computational basis state |value> on ``n`` qubits.

    The register convention is a = 2^0*a0 + 2^1*a1 + ...: loading 6 on three
    qubits puts the single unit amplitude at index 6 (displayed ``|110>``).
    """
    if not 0 <= value < (1 << n):
        raise ValueOutOfRange(f"value {value} does not fit in {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[value] = 1.0
    return StateVector(n, amps, copy=False)


def pure_density(state: StateVector) -> DensityMatrix:
    """Projector |psi><psi| of a pure state."""
    return DensityMatrix(
        state.n_qubits, np.outer(state.amps, state.amps.conj()), copy=False
    )


def _check_qubits(qubits: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    qs = tuple(int(q) for q in qubits)
    for q in qs:
        if not 0 <= q < n_qubits:
            raise TargetOutOfRange(f"qubit {q} outside 0..{n_qubits - 1}")
    if len(set(qs)) != len(qs):
        raise TargetOutOfRange(f"duplicate qubit in {qs}")
    return qs


def _marginal_blocks(state: StateVector, qubits: tuple[int, ...]) -> np.ndarray:
    """Amplitudes reshaped to (2**k, rest) with the measured qubits in front.

    Row index r holds bit i of r for qubits[i] (weight convention).
    """
    n = state.n_qubits
    tensor = state.amps.reshape((2,) * n)
    # axis j of the tensor corresponds to qubit n-1-j (C order); put the
    # measured qubits first, most significant measured qubit outermost.
    axes = [n - 1 - q for q in reversed(qubits)]
    tensor = np.moveaxis(tensor, axes, range(len(qubits)))
    return tensor.reshape(1 << len(qubits), -1)


def project_measurement(
    state: StateVector, qubits: Sequence[int], value: int
) -> MeasurementRecord:
    """Deterministically project onto ``qubits = value`` and renormalize.

    Raises ValueOutOfRange when the requested outcome has zero probability.
    """
    qs = _check_qubits(qubits, state.n_qubits)
    k = len(qs)
    if not 0 <= value < (1 << k):
        raise ValueOutOfRange(f"outcome {value} does not fit in {k} bits")
    blocks = _marginal_blocks(state, qs)
    prob = float(np.sum(np.abs(blocks[value]) ** 2))
    if prob <= 0.0:
        raise ValueOutOfRange(
            f"outcome {value} on qubits {qs} has zero probability"
        )
    post = np.zeros_like(blocks)
    post[value] = blocks[value] / np.sqrt(prob)
    n = state.n_qubits
    tensor = post.reshape((2,) * n)
    axes = [n - 1 - q for q in reversed(qs)]
    tensor = np.moveaxis(tensor, range(k), axes)
    return MeasurementRecord(
        measured_qubits=qs,
        outcome=format(value, f"0{k}b"),
        outcome_value=value,
        probability=prob,
        post_state=StateVector(n, tensor.reshape(-1), copy=False),
    )


def measure(state: StateVector, qubits: Sequence[int], rng_seed) -> MeasurementRecord:
    """Sample a projective measurement of ``qubits`` from the Born rule.

    ``rng_seed`` is an integer seed (or an existing Generator); the outcome
    is deterministic given the seed.  The input state is never mutated; the
    record's ``post_state`` is the renormalized projection.
    """
    qs = _check_qubits(qubits, state.n_qubits)
    blocks = _marginal_blocks(state, qs)
    probs = np.sum(np.abs(blocks) ** 2, axis=1)
    probs = probs / probs.sum()
    rng = make_rng(rng_seed)
    value = int(rng.choice(probs.size, p=probs))
    return project_measurement(state, qs, value)


class SchmidtSplit(NamedTuple):
    product: bool
    coefficients: np.ndarray


def is_product_across(state: StateVector, cut: Sequence[int]) -> SchmidtSplit:
    """Schmidt test for entanglement across a bipartition.

    ``cut`` names one side of the partition; the complement is the other.
    Returns whether the state factorizes (second Schmidt coefficient below
    1e-8) together with the descending Schmidt coefficients — the singular
    values of the bipartite amplitude matrix.  Invariant under global phase.
    """
    side_a = sorted(_check_qubits(cut, state.n_qubits))
    if not side_a or len(side_a) == state.n_qubits:
        raise TargetOutOfRange("cut must leave qubits on both sides")
    blocks = _marginal_blocks(state, tuple(side_a))
    coeffs = np.linalg.svd(blocks, compute_uv=False)
    product = bool(coeffs.size < 2 or coeffs[1] < SCHMIDT_ATOL)
    return SchmidtSplit(product, coeffs)


def purity(rho: DensityMatrix) -> float:
    """trace(rho^2); 1 for pure states, 1/2**n for the maximally mixed."""
    return float(np.real(np.trace(rho.mat @ rho.mat)))
