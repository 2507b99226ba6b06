"""Unitary and antiunitary symmetries, projective group closure, invariance.

A symmetry element is a unitary together with an antiunitary flag.  It acts on
a density matrix rho as U rho U^dag (flag clear) or U conj(rho) U^dag (flag
set).  Elements equal up to a global phase are identified, so closure is taken
in the projective sense.
"""
import numpy as np

from mixsynth.errors import DimensionMismatchError, PreconditionError
from mixsynth.states import DensityMatrix, PureState, _as_density, trace_distance

_UNITARY_TOL = 1e-10
_PROJECTIVE_TOL = 1e-8


def _phase_normalize(mat):
    """Rotate a matrix by a global phase so its first significant entry is
    real positive, making projective equality plain elementwise equality."""
    flat = mat.reshape(-1)
    for c in flat:
        m = abs(c)
        if m > 1e-12:
            return mat * (c.conjugate() / m)
    return mat


def _proj_equal(a, b, tol=_PROJECTIVE_TOL):
    return np.max(np.abs(_phase_normalize(a) - _phase_normalize(b))) <= tol


class SymmetryElement:
    """A projective symmetry: unitary matrix plus antiunitary flag."""

    __slots__ = ("unitary_part", "antiunitary", "dim")

    def __init__(self, unitary_part, antiunitary=False):
        u = np.asarray(unitary_part, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise PreconditionError("unitary_part must be square")
        n = u.shape[0]
        if np.max(np.abs(u.conj().T @ u - np.eye(n))) > _UNITARY_TOL:
            raise PreconditionError("unitary_part fails unitarity within 1e-10")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "unitary_part", u)
        object.__setattr__(self, "antiunitary", bool(antiunitary))
        object.__setattr__(self, "dim", n)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetryElement is immutable")

    def compose(self, other):
        """The element acting as self after other.

        When self is antiunitary its conjugation passes through the right
        factor, so the combined unitary is U * conj(V); the flags add mod 2.
        """
        if self.dim != other.dim:
            raise DimensionMismatchError("compose: dimension mismatch")
        if self.antiunitary:
            u = self.unitary_part @ other.unitary_part.conj()
        else:
            u = self.unitary_part @ other.unitary_part
        return SymmetryElement(u, self.antiunitary ^ other.antiunitary)

    def inverse(self):
        if self.antiunitary:
            return SymmetryElement(self.unitary_part.T, True)
        return SymmetryElement(self.unitary_part.conj().T, False)

    def is_identity(self, tol=_PROJECTIVE_TOL):
        return not self.antiunitary and _proj_equal(
            self.unitary_part, np.eye(self.dim, dtype=complex), tol)

    def same_as(self, other, tol=_PROJECTIVE_TOL):
        """Projective equality (matching flags, unitaries equal up to phase)."""
        return (self.antiunitary == other.antiunitary
                and self.dim == other.dim
                and _proj_equal(self.unitary_part, other.unitary_part, tol))

    def __repr__(self):
        kind = "antiunitary" if self.antiunitary else "unitary"
        return f"SymmetryElement(dim={self.dim}, {kind})"


class SymmetryGroup:
    """A finite list of symmetry elements, checked closed and containing the
    identity (both in the projective sense)."""

    __slots__ = ("elements", "dim")

    def __init__(self, elements, check=True):
        elements = list(elements)
        if not elements:
            raise PreconditionError("a symmetry group needs at least one element")
        dim = elements[0].dim
        for e in elements:
            if e.dim != dim:
                raise DimensionMismatchError("group elements have mixed dimensions")
        if check:
            if not any(e.is_identity() for e in elements):
                raise PreconditionError("group does not contain the identity")
            for a in elements:
                inv = a.inverse()
                if not any(inv.same_as(e) for e in elements):
                    raise PreconditionError("group is not closed under inverses")
                for b in elements:
                    c = a.compose(b)
                    if not any(c.same_as(e) for e in elements):
                        raise PreconditionError("group is not closed under composition")
        object.__setattr__(self, "elements", tuple(elements))
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetryGroup is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def group_closure(generators, max_size=256):
    """Projective closure of a generating set, by breadth-first products.

    Raises if the closure would exceed max_size elements.
    """
    generators = list(generators)
    if not generators:
        raise PreconditionError("group_closure needs at least one generator")
    dim = generators[0].dim
    identity = SymmetryElement(np.eye(dim, dtype=complex), False)
    found = [identity]
    frontier = [identity]
    while frontier:
        new = []
        for e in frontier:
            for g in generators:
                c = g.compose(e)
                if not any(c.same_as(f) for f in found):
                    found.append(c)
                    new.append(c)
                    if len(found) > max_size:
                        raise PreconditionError(
                            f"group closure exceeds max_size={max_size}")
        frontier = new
    return SymmetryGroup(found, check=False)


def apply_symmetry(element, rho):
    """Act on a density matrix: U rho U^dag, conjugating rho first when the
    element is antiunitary."""
    rho = _as_density(rho)
    if rho.dim != element.dim:
        raise DimensionMismatchError("apply_symmetry: dimension mismatch")
    body = rho.entries.conj() if element.antiunitary else rho.entries
    u = element.unitary_part
    return DensityMatrix(u @ body @ u.conj().T)


def is_invariant(rho, group, tol=1e-9):
    """Whether every group element fixes rho within tol in trace distance."""
    rho = _as_density(rho)
    for e in group:
        if trace_distance(apply_symmetry(e, rho), rho) > tol:
            return False
    return True
