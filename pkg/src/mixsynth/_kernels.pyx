# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Mirrors mixsynth._kernels_py exactly — same entry points, same semantics,
same tolerances.  tests/test_kernels.py asserts the two stay in agreement.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

IMPL = "compiled"

JACOBI_TOL = 1e-13

cdef int _MAX_SWEEPS = 60


cdef double _off_norm(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return sqrt(acc)


cdef int _jacobi_core(double complex[:, ::1] a, double complex[:, ::1] v,
                      Py_ssize_t n, double tol, bint want_vectors) nogil:
    """In-place cyclic Jacobi on a; accumulates rotations into v when asked.

    Returns 0 on convergence, 1 on sweep-budget exhaustion.
    """
    cdef Py_ssize_t p, q, k, sweep
    cdef double scale_sq = 0.0, scale, ab, tau, t, c, s, off
    cdef double complex b, u, uc, su, suc, cu, cuc, xp, xq
    for p in range(n):
        for q in range(n):
            scale_sq += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    scale = sqrt(scale_sq)
    if scale < 1.0:
        scale = 1.0
    for sweep in range(_MAX_SWEEPS):
        off = _off_norm(a, n)
        if off <= tol * scale:
            return 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                ab = sqrt(b.real * b.real + b.imag * b.imag)
                if ab <= 0.25 * tol * scale / (n * n):
                    continue
                u = b / ab
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ab)
                t = (-1.0 if tau >= 0 else 1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                uc = u.conjugate()
                su = s * u
                suc = s * uc
                cu = c * u
                cuc = c * uc
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp + suc * xq
                    a[k, q] = -s * xp + cuc * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp + su * xq
                    a[q, k] = -s * xp + cu * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        xp = v[k, p]
                        xq = v[k, q]
                        v[k, p] = c * xp + suc * xq
                        v[k, q] = -s * xp + cuc * xq
    return 1


def jacobi_eigh(a, tol=JACOBI_TOL):
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, V) with eigenvalues ascending and unit eigenvector columns,
    so that a = V @ diag(w) @ V.conj().T.  See the pure-Python twin for the
    contract details.
    """
    arr = np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = arr.shape[0]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError("matrix must be square")
    vmat = np.eye(n, dtype=np.complex128)
    if n == 1:
        return arr.real.reshape(1).copy(), vmat
    cdef double complex[:, ::1] av = arr
    cdef double complex[:, ::1] vv = vmat
    if _jacobi_core(av, vv, n, float(tol), True):
        raise RuntimeError("Jacobi sweep budget exhausted (matrix may not be Hermitian)")
    w = np.diagonal(arr).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], vmat[:, order]


def max_sq_overlap(samples, points):
    """Per-sample maximum squared overlap |<sample|point>|^2."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] smp = \
        np.ascontiguousarray(samples, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] pts = \
        np.ascontiguousarray(points, dtype=np.complex128)
    cdef Py_ssize_t n = smp.shape[0], m = pts.shape[0], d = smp.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef Py_ssize_t i, j, k
    cdef double best, o
    cdef double complex acc
    with nogil:
        for i in range(n):
            best = 0.0
            for j in range(m):
                acc = 0.0
                for k in range(d):
                    acc += smp[i, k] * pts[j, k].conjugate()
                o = acc.real * acc.real + acc.imag * acc.imag
                if o > best:
                    best = o
            out[i] = best
    return out


def count_within_pure(samples, center, eps):
    """Count sample pure states within trace distance eps of a pure center."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] smp = \
        np.ascontiguousarray(samples, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ctr = \
        np.ascontiguousarray(center, dtype=np.complex128)
    cdef Py_ssize_t n = smp.shape[0], d = smp.shape[1]
    cdef double thresh = 1.0 - float(eps) * float(eps)
    cdef Py_ssize_t i, k
    cdef long total = 0
    cdef double complex acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for k in range(d):
                acc += smp[i, k] * ctr[k].conjugate()
            if acc.real * acc.real + acc.imag * acc.imag >= thresh:
                total += 1
    return int(total)


def count_within_mixed(samples, center, eps):
    """Count sample pure states within trace distance eps of a density matrix."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] smp = \
        np.ascontiguousarray(samples, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] ctr = \
        np.ascontiguousarray(center, dtype=np.complex128)
    cdef Py_ssize_t n = smp.shape[0], d = smp.shape[1]
    cdef double e = float(eps)
    cdef double complex[:, ::1] diff = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] dummy = np.zeros((1, 1), dtype=np.complex128)
    cdef Py_ssize_t i, r, c2
    cdef long total = 0
    cdef double td
    cdef double tol = JACOBI_TOL
    with nogil:
        for i in range(n):
            for r in range(d):
                for c2 in range(d):
                    diff[r, c2] = smp[i, r] * smp[i, c2].conjugate() - ctr[r, c2]
            if _jacobi_core(diff, dummy, d, tol, False):
                with gil:
                    raise RuntimeError("Jacobi sweep budget exhausted in MC counting")
            td = 0.0
            for r in range(d):
                td += fabs(diff[r, r].real)
            if 0.5 * td <= e:
                total += 1
    return int(total)
