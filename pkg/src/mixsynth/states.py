"""State representations, distances, and standard state families.

Pure states are unit complex vectors held in a canonical global phase; mixed
states are Hermitian, positive-semidefinite, trace-one matrices.  All
eigendecompositions go through the selected kernel backend.
"""
import numpy as np

from mixsynth import _backend
from mixsynth.errors import DimensionMismatchError, PreconditionError

_NORM_TOL = 1e-12
_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_EIG_FLOOR = -1e-10
_PHASE_CUTOFF = 1e-12


def _canonical_phase(amplitudes):
    """Rotate the global phase so the first significant component is real >= 0."""
    for c in amplitudes:
        m = abs(c)
        if m > _PHASE_CUTOFF:
            return amplitudes * (c.conjugate() / m)
    return amplitudes


class PureState:
    """A unit vector over C^dim, stored in canonical global phase.

    Canonicalization makes projective equality plain componentwise equality,
    so states can be deduplicated by comparing amplitude arrays.
    """

    __slots__ = ("dim", "amplitudes")

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise PreconditionError(
                f"pure state is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        amps = _canonical_phase(amps)
        amps.setflags(write=False)
        object.__setattr__(self, "dim", amps.size)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    def density(self):
        """The rank-one projector |psi><psi| as a DensityMatrix."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other):
        """Inner product <self|other>."""
        if self.dim != other.dim:
            raise DimensionMismatchError("states live on different dimensions")
        return complex(self.amplitudes.conj() @ other.amplitudes)

    def isclose(self, other, tol=1e-10):
        """Projective equality test (canonical phases make it componentwise)."""
        return self.dim == other.dim and bool(
            np.max(np.abs(self.amplitudes - other.amplitudes)) <= tol)

    def __repr__(self):
        return f"PureState({np.array2string(self.amplitudes, precision=6)})"


class DensityMatrix:
    """A Hermitian PSD trace-one matrix over C^dim."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries):
        mat = np.asarray(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise PreconditionError("density matrix must be square")
        if np.max(np.abs(mat - mat.conj().T)) > _HERM_TOL:
            raise PreconditionError("density matrix is not Hermitian within 1e-12")
        tr = np.trace(mat)
        if abs(tr - 1.0) > _TRACE_TOL:
            raise PreconditionError(f"trace must be 1, got {tr}")
        w, _ = _backend.jacobi_eigh((mat + mat.conj().T) / 2.0)
        if w[0] < _EIG_FLOOR:
            raise PreconditionError(f"negative eigenvalue {w[0]:.3e} below -1e-10")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "dim", mat.shape[0])
        object.__setattr__(self, "entries", mat)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def eig(self):
        """Eigenvalues (ascending) and eigenvector columns."""
        return _backend.jacobi_eigh(self.entries)

    def is_pure(self, tol=1e-10):
        return abs(np.trace(self.entries @ self.entries).real - 1.0) <= tol

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def _as_density(obj):
    if isinstance(obj, PureState):
        return obj.density()
    if isinstance(obj, DensityMatrix):
        return obj
    return DensityMatrix(obj)


def trace_distance(a, b):
    """Half the sum of absolute eigenvalues of a - b.

    Accepts DensityMatrix or PureState arguments of equal dimension.
    """
    a = _as_density(a)
    b = _as_density(b)
    if a.dim != b.dim:
        raise DimensionMismatchError("trace_distance: dimension mismatch")
    w, _ = _backend.jacobi_eigh(a.entries - b.entries)
    return float(0.5 * np.abs(w).sum())


def fidelity(a, b):
    """Uhlmann fidelity, squared-overlap convention.

    For a pure argument this reduces to tr(a b); in general it is
    (tr sqrt(sqrt(a) b sqrt(a)))^2.
    """
    pure_a = isinstance(a, PureState)
    pure_b = isinstance(b, PureState)
    da = _as_density(a)
    db = _as_density(b)
    if da.dim != db.dim:
        raise DimensionMismatchError("fidelity: dimension mismatch")
    if pure_a or pure_b:
        val = np.trace(da.entries @ db.entries).real
        return float(min(1.0, max(0.0, val)))
    w, v = _backend.jacobi_eigh(da.entries)
    sqrt_a = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    m = sqrt_a @ db.entries @ sqrt_a
    mw, _ = _backend.jacobi_eigh((m + m.conj().T) / 2.0)
    root_sum = np.sqrt(np.clip(mw, 0.0, None)).sum()
    return float(min(1.0, root_sum * root_sum))


def meridian_state(t):
    """The real-amplitude qubit state cos(t)|0> + sin(t)|1>."""
    return PureState(np.array([np.cos(t), np.sin(t)], dtype=complex))


def pauli_eigenstates():
    """The six single-qubit Pauli eigenstates (z+, z-, x+, x-, y+, y-)."""
    s = 1.0 / np.sqrt(2.0)
    vecs = [
        [1.0, 0.0],
        [0.0, 1.0],
        [s, s],
        [s, -s],
        [s, 1j * s],
        [s, -1j * s],
    ]
    return [PureState(np.array(v, dtype=complex)) for v in vecs]


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def density_from_bloch(v):
    """Qubit density matrix for a Bloch vector of norm at most 1."""
    v = np.asarray(v, dtype=float).reshape(3)
    r = np.linalg.norm(v)
    if r > 1.0 + 1e-12:
        raise PreconditionError(f"Bloch vector norm {r} exceeds 1")
    mat = 0.5 * (np.eye(2, dtype=complex)
                 + v[0] * _PAULI_X + v[1] * _PAULI_Y + v[2] * _PAULI_Z)
    return DensityMatrix(mat)


def bloch_vector(rho):
    """Bloch vector of a qubit density matrix (inverse of density_from_bloch)."""
    rho = _as_density(rho)
    if rho.dim != 2:
        raise DimensionMismatchError("bloch_vector is defined for qubits")
    m = rho.entries
    return np.array([
        float(np.trace(m @ _PAULI_X).real),
        float(np.trace(m @ _PAULI_Y).real),
        float(np.trace(m @ _PAULI_Z).real),
    ])


def _swap_operator(d):
    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    return swap


def sym_projectors(d):
    """Projectors onto the symmetric and antisymmetric subspaces of C^d x C^d."""
    swap = _swap_operator(d)
    eye = np.eye(d * d, dtype=complex)
    return (eye + swap) / 2.0, (eye - swap) / 2.0


def max_entangled(d):
    """The maximally entangled pure state on C^d x C^d."""
    amps = np.zeros(d * d, dtype=complex)
    for i in range(d):
        amps[i * d + i] = 1.0 / np.sqrt(d)
    return PureState(amps)


def werner(d, q):
    """Werner-family state: a (q, 1-q) blend of the normalized antisymmetric
    and symmetric projectors on C^d x C^d.  Requires q in [0, 1]."""
    if not 0.0 <= q <= 1.0:
        raise PreconditionError("werner: q must lie in [0, 1]")
    p_sym, p_anti = sym_projectors(d)
    mat = (2.0 * (1.0 - q) / (d * (d + 1))) * p_sym \
        + (2.0 * q / (d * (d - 1))) * p_anti
    return DensityMatrix(mat)


def isotropic(d, q):
    """Isotropic-family state: (1-q)/d^2 * identity + q * max-entangled projector.

    Requires q >= -1/(d^2-1) and q <= 1 (the PSD range).
    """
    if q < -1.0 / (d * d - 1.0) or q > 1.0:
        raise PreconditionError("isotropic: q outside the PSD range")
    phi = max_entangled(d)
    mat = ((1.0 - q) / (d * d)) * np.eye(d * d, dtype=complex) \
        + q * np.outer(phi.amplitudes, phi.amplitudes.conj())
    return DensityMatrix(mat)
