"""Pure-Python (numpy) implementations of the numerical kernels.

The compiled extension mixsynth._kernels provides the same four entry points;
mixsynth._backend picks whichever is available.  Keep signatures and semantics
in lockstep — tests/test_kernels.py asserts agreement between the two.
"""
import numpy as np

IMPL = "python"

#: Off-diagonal Frobenius-norm tolerance at which a Jacobi sweep stops.
JACOBI_TOL = 1e-13

_MAX_SWEEPS = 60


def jacobi_eigh(a, tol=JACOBI_TOL):
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, V) with eigenvalues ascending and unit eigenvector columns,
    so that a = V @ diag(w) @ V.conj().T.  Designed for small dense matrices
    (dimension up to ~16); the rotation count grows cubically.

    The sweep loop exits once the off-diagonal Frobenius norm drops below
    tol * max(1, ||a||_F).
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.reshape(1).copy(), v
    scale = max(1.0, float(np.linalg.norm(a)))
    idx = ~np.eye(n, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        off = float(np.linalg.norm(a[idx]))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                ab = abs(b)
                if ab <= 0.25 * tol * scale / (n * n):
                    continue
                # Phase factor u makes the pivot entry real; then a real
                # Givens rotation annihilates it.
                u = b / ab
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ab)
                t = (-1.0 if tau >= 0 else 1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Columns: J[:,p] = c*e_p + s*conj(u)*e_q ; J[:,q] = -s*e_p + c*conj(u)*e_q
                col_p = a[:, p] * c + a[:, q] * (s * u.conjugate())
                col_q = a[:, p] * (-s) + a[:, q] * (c * u.conjugate())
                a[:, p] = col_p
                a[:, q] = col_q
                row_p = a[p, :] * c + a[q, :] * (s * u)
                row_q = a[p, :] * (-s) + a[q, :] * (c * u)
                a[p, :] = row_p
                a[q, :] = row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p] * c + v[:, q] * (s * u.conjugate())
                vq = v[:, p] * (-s) + v[:, q] * (c * u.conjugate())
                v[:, p] = vp
                v[:, q] = vq
    else:
        raise RuntimeError("Jacobi sweep budget exhausted (matrix may not be Hermitian)")
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def max_sq_overlap(samples, points):
    """Per-sample maximum squared overlap |<sample|point>|^2.

    samples: (n, d) complex, unit rows; points: (m, d) complex, unit rows.
    Returns a length-n real vector.  Chunks over points to bound memory.
    """
    samples = np.asarray(samples)
    points = np.asarray(points)
    n = samples.shape[0]
    best = np.zeros(n)
    step = max(1, int(4_000_000 / max(1, n)))
    for i in range(0, points.shape[0], step):
        ov = np.abs(samples @ points[i:i + step].conj().T) ** 2
        np.maximum(best, ov.max(axis=1), out=best)
    return best


def count_within_pure(samples, center, eps):
    """Number of sample pure states within trace distance eps of a pure center.

    Uses T(psi, phi) = sqrt(1 - |<psi|phi>|^2), so the test is an overlap
    threshold.  samples: (n, d) complex unit rows; center: length-d unit vector.
    """
    samples = np.asarray(samples)
    center = np.asarray(center)
    ov = np.abs(samples @ center.conj()) ** 2
    return int(np.count_nonzero(ov >= 1.0 - eps * eps))


def count_within_mixed(samples, center, eps):
    """Number of sample pure states within trace distance eps of a density matrix.

    Evaluates the spectrum of |psi><psi| - center per sample (batched).
    samples: (n, d) complex unit rows; center: (d, d) Hermitian.
    """
    samples = np.asarray(samples)
    center = np.asarray(center)
    n, d = samples.shape
    total = 0
    step = max(1, int(2_000_000 / (d * d)))
    for i in range(0, n, step):
        chunk = samples[i:i + step]
        diff = chunk[:, :, None] * chunk[:, None, :].conj() - center[None, :, :]
        w = np.linalg.eigvalsh(diff)
        td = 0.5 * np.abs(w).sum(axis=1)
        total += int(np.count_nonzero(td <= eps))
    return total
