"""Distances to separable and incoherent state sets.

Closed forms for the two classic one-parameter two-party families, witness
scans that certify them from below, finite product coverings that bound them
from above, and the coincidence between the entanglement of a two-party pure
state and the coherence of its Schmidt vector.
"""
import math

import numpy as np

from mixsynth.covering import greedy_net
from mixsynth.errors import PreconditionError
from mixsynth.solver import ConvexApproxProblem, project_simplex, solve
from mixsynth.states import DensityMatrix, PureState

__all__ = [
    "SchmidtVector", "DistanceBracket", "werner_distance",
    "isotropic_distance", "werner_witness_scan", "isotropic_witness_scan",
    "product_net", "separable_upper", "coherence_distance", "simplex_formula",
]


class SchmidtVector:
    """A unit vector of Schmidt coefficients (complex allowed; only the
    moduli matter to every operation here)."""

    __slots__ = ("d", "alpha")

    def __init__(self, alpha):
        alpha = np.asarray(alpha, dtype=complex).reshape(-1)
        if alpha.size < 2:
            raise PreconditionError("SchmidtVector needs dimension >= 2")
        if abs(np.linalg.norm(alpha) - 1.0) > 1e-12:
            raise PreconditionError("SchmidtVector must have unit norm")
        alpha.setflags(write=False)
        object.__setattr__(self, "d", alpha.size)
        object.__setattr__(self, "alpha", alpha)

    def __setattr__(self, name, value):
        raise AttributeError("SchmidtVector is immutable")


class DistanceBracket:
    """A certified two-sided bound on a distance-to-set value."""

    def __init__(self, lower, upper, lower_witness, upper_mixture):
        if not (-1e-12 <= lower <= upper <= 1.0 + 1e-12):
            raise PreconditionError(
                f"bracket [{lower}, {upper}] is not ordered inside [0, 1]")
        self.lower = float(lower)
        self.upper = float(upper)
        self.lower_witness = lower_witness
        self.upper_mixture = upper_mixture

    def __repr__(self):
        return f"DistanceBracket([{self.lower:.9g}, {self.upper:.9g}])"


def werner_distance(d, q):
    """Distance from the antisymmetric-weight-q family member to the
    separable set: max(0, q - 1/2)."""
    if d < 2:
        raise PreconditionError("d must be at least 2")
    if not 0.0 <= q <= 1.0:
        raise PreconditionError("q must lie in [0, 1]")
    return max(0.0, q - 0.5)


def isotropic_distance(d, q):
    """Distance from the entangled-fraction-q family member to the separable
    set: max(0, (d^2-1)/d^2 * (q - 1/(d+1)))."""
    if d < 2:
        raise PreconditionError("d must be at least 2")
    if q < -1.0 / (d * d - 1.0) or q > 1.0:
        raise PreconditionError("q outside the PSD range")
    return max(0.0, (d * d - 1.0) / (d * d) * (q - 1.0 / (d + 1.0)))


def _werner_objective(a, b, q):
    # witness two-parameter family: subtracting the best product overlap
    # removes max(0, (a-b)/2)
    return a * (1.0 - q) + b * q - (a + b) / 2.0 - np.maximum(0.0, (a - b) / 2.0)


def _isotropic_objective(a, b, d, q):
    return (b - a) * ((1.0 - q) / (d * d) + q) - np.maximum(0.0, (b - a) / d)


def _scan(objective, grid_n):
    if grid_n < 2:
        raise PreconditionError("grid_n must be at least 2")
    g = np.linspace(0.0, 1.0, grid_n)
    a, b = np.meshgrid(g, g, indexing="ij")
    vals = objective(a, b)
    i = int(np.argmax(vals))
    best = float(vals.flat[i])
    best_ab = (float(a.flat[i]), float(b.flat[i]))
    # analytic candidates: the corner (0, 1) and the diagonal a = b
    for cand in ((0.0, 1.0), (0.5, 0.5)):
        v = float(objective(np.array(cand[0]), np.array(cand[1])))
        if v > best:
            best, best_ab = v, cand
    return best, best_ab


def werner_witness_scan(d, q, grid_n):
    """Grid maximum of the two-scalar witness objective; a certified lower
    bound that attains werner_distance (at (a,b) = (0,1) for q > 1/2)."""
    if d < 2:
        raise PreconditionError("d must be at least 2")
    best, _ = _scan(lambda a, b: _werner_objective(a, b, q), grid_n)
    return best


def isotropic_witness_scan(d, q, grid_n):
    """Grid maximum of the isotropic witness objective; attains
    isotropic_distance at (0,1) for q > 1/(d+1), and 0 on the diagonal."""
    if d < 2:
        raise PreconditionError("d must be at least 2")
    best, _ = _scan(lambda a, b: _isotropic_objective(a, b, d, q), grid_n)
    return best


def _is_product(state, d, tol=1e-9):
    m = state.amplitudes.reshape(d, d)
    s = np.linalg.svd(m, compute_uv=False)
    return s[0] * s[0] >= 1.0 - tol


def product_net(factor_eps, seed, include_pairs=True):
    """Product covering of the two-qubit product-state manifold.

    Tensor grid of two single-qubit greedy nets (covering radius at most
    sqrt(2)*factor_eps, since squared product distances add up to cross
    terms).  When include_pairs is set, products a (x) a-orthogonal and
    a (x) a-conjugate over a finer net are appended; these are the extremal
    mixtures for the two closed-form families and sharpen the upper bound
    without affecting the covering guarantee.
    """
    left = greedy_net("full-sphere(2)", factor_eps, seed=seed,
                      verify_samples=0)
    right = greedy_net("full-sphere(2)", factor_eps, seed=seed + 1,
                       verify_samples=0)
    out = []
    for a in left.points:
        for b in right.points:
            out.append(PureState(np.kron(a.amplitudes, b.amplitudes)))
    if include_pairs:
        fine = greedy_net("full-sphere(2)", max(0.05, factor_eps / 2.0),
                          seed=seed + 2, verify_samples=0)
        for a in fine.points:
            v = a.amplitudes
            perp = np.array([-v[1].conj(), v[0].conj()])
            out.append(PureState(np.kron(v, perp)))
            out.append(PureState(np.kron(v, v.conj())))
    return out


def separable_upper(rho, product_covering, solver_tol=1e-7):
    """Certified upper bound on the separable distance of a two-party state,
    via the best mixture of a finite covering of product states.

    Every candidate must be a product of pure states; mixtures of products
    are separable, so the achieved mixture distance is a true upper bound.
    """
    if not product_covering:
        raise PreconditionError("product covering must be non-empty")
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    d = math.isqrt(rho.dim)
    if d * d != rho.dim:
        raise PreconditionError("state must live on a d x d tensor square")
    for cand in product_covering:
        if not _is_product(cand, d):
            raise PreconditionError(
                "covering contains a non-product candidate")
    solution = solve(ConvexApproxProblem(rho, product_covering),
                     tol=solver_tol)
    return solution.primal_value


def coherence_distance(alpha, solver_tol=1e-7):
    """Certified distance from the pure state with amplitudes alpha to the
    set of diagonal (incoherent) states."""
    if not isinstance(alpha, SchmidtVector):
        alpha = SchmidtVector(alpha)
    d = alpha.d
    target = PureState(alpha.alpha)
    basis = [PureState(np.eye(d, dtype=complex)[i]) for i in range(d)]
    solution = solve(ConvexApproxProblem(target, basis), tol=solver_tol)
    return solution.value


def _simplex_objective(p, aabs):
    s = float(np.sqrt(p) @ aabs)
    return s * s - float(p.max())


def _simplex_ascend(p, aabs, iters=300):
    best_val = _simplex_objective(p, aabs)
    best_p = p
    step = 0.1
    for _ in range(iters):
        s = float(np.sqrt(p) @ aabs)
        grad = s * aabs / np.maximum(np.sqrt(p), 1e-9)
        grad[int(np.argmax(p))] -= 1.0
        cand = project_simplex(p + step * grad)
        val = _simplex_objective(cand, aabs)
        if val > _simplex_objective(p, aabs):
            p = cand
            step = min(step * 1.25, 1.0)
        else:
            step *= 0.5
            if step < 1e-12:
                break
        if val > best_val:
            best_val, best_p = val, cand
    return best_val, best_p


def _simplex_polish(p, aabs):
    """High-precision local polish: within the region where coordinate j
    stays the largest, the objective is smooth, so a constrained local solve
    sharpens the PGA endpoint to optimizer-level accuracy."""
    from scipy.optimize import minimize

    d = aabs.size
    best_val = _simplex_objective(p, aabs)
    best_p = p
    for j in range(d):
        cons = [{"type": "eq", "fun": lambda x: x.sum() - 1.0,
                 "jac": lambda x: np.ones_like(x)}]
        for i in range(d):
            if i != j:
                cons.append({"type": "ineq",
                             "fun": (lambda x, i=i, j=j: x[j] - x[i])})

        def neg(x, j=j):
            q = np.maximum(x, 0.0)
            s = float(np.sqrt(q) @ aabs)
            return -(s * s - q[j])

        start = project_simplex(0.9 * p + 0.1 / d)
        res = minimize(neg, start, method="SLSQP", constraints=cons,
                       bounds=[(0.0, 1.0)] * d,
                       options={"maxiter": 200, "ftol": 1e-14})
        if res.success or res.status == 0:
            cand = project_simplex(np.maximum(res.x, 0.0))
            val = _simplex_objective(cand, aabs)
            if val > best_val:
                best_val, best_p = val, cand
    return best_val, best_p


def simplex_formula(alpha, budget=300):
    """Maximum over probability vectors p of (sum_i sqrt(p_i)|alpha_i|)^2 -
    max_i p_i; multi-start projected gradient ascent plus a coarse grid for
    the smallest dimensions, followed by a smooth per-region local polish."""
    if not isinstance(alpha, SchmidtVector):
        alpha = SchmidtVector(alpha)
    aabs = np.abs(alpha.alpha)
    d = alpha.d
    rng = np.random.default_rng(12345)
    starts = [np.full(d, 1.0 / d)]
    for _ in range(20):
        starts.append(rng.dirichlet(np.ones(d)))
    if d == 2:
        g = np.linspace(0.0, 1.0, 2001)
        vals = (np.sqrt(g) * aabs[0] + np.sqrt(1.0 - g) * aabs[1]) ** 2 \
            - np.maximum(g, 1.0 - g)
        i = int(np.argmax(vals))
        starts.append(np.array([g[i], 1.0 - g[i]]))
    elif d == 3:
        pts = []
        steps = np.linspace(0.0, 1.0, 51)
        for x in steps:
            for y in steps:
                if x + y <= 1.0 + 1e-12:
                    pts.append((x, y, max(0.0, 1.0 - x - y)))
        pts = np.array(pts)
        vals = (np.sqrt(pts) @ aabs) ** 2 - pts.max(axis=1)
        starts.append(pts[int(np.argmax(vals))])
    best_val, best_p = 0.0, np.full(d, 1.0 / d)
    for p0 in starts:
        val, p = _simplex_ascend(np.asarray(p0, dtype=float), aabs,
                                 iters=budget)
        if val > best_val:
            best_val, best_p = val, p
    polished, _ = _simplex_polish(best_p, aabs)
    return float(max(best_val, polished))


def werner_bracket(d, q, grid_n=201, product_covering=None, solver_tol=1e-7):
    """Two-sided certificate around werner_distance: witness-scan lower bound
    and, when a product covering is supplied (d=2 only), a mixture upper
    bound; otherwise the upper falls back to the closed form."""
    lower, ab = _scan(lambda a, b: _werner_objective(a, b, q), grid_n)
    lower = max(0.0, lower)
    closed = werner_distance(d, q)
    if product_covering is not None:
        from mixsynth.states import werner as _werner_state
        upper = separable_upper(_werner_state(d, q), product_covering,
                                solver_tol)
        mixture = f"best mixture over {len(product_covering)} product states"
    else:
        upper = closed
        mixture = "closed form"
    return DistanceBracket(lower, upper,
                           lower_witness=f"scan witness (a,b)=({ab[0]:.4g},"
                                         f"{ab[1]:.4g})",
                           upper_mixture=mixture)


def isotropic_bracket(d, q, grid_n=201, product_covering=None,
                      solver_tol=1e-7):
    """Same bracket construction for the entangled-fraction family."""
    lower, ab = _scan(lambda a, b: _isotropic_objective(a, b, d, q), grid_n)
    lower = max(0.0, lower)
    closed = isotropic_distance(d, q)
    if product_covering is not None:
        from mixsynth.states import isotropic as _isotropic_state
        upper = separable_upper(_isotropic_state(d, q), product_covering,
                                solver_tol)
        mixture = f"best mixture over {len(product_covering)} product states"
    else:
        upper = closed
        mixture = "closed form"
    return DistanceBracket(lower, upper,
                           lower_witness=f"scan witness (a,b)=({ab[0]:.4g},"
                                         f"{ab[1]:.4g})",
                           upper_mixture=mixture)
