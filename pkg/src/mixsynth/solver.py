"""Certified convex approximation: distance from a state to a convex hull.

Minimizes the trace distance between a target state and mixtures of a finite
candidate set, returning both a mixture (upper bound) and a measurement
witness (lower bound) whose gap certifies the answer.

The engine is a trust-region cutting-plane method over the probability
simplex.  Every positive-spectral-threshold projector of ``target - mixture``
yields a linear lower model ("cut") of the objective as well as a feasible
dual witness; a box-constrained LP minimizes the cut model, its dual weights
aggregate the active witnesses into a new certified witness, and short Polyak
subgradient sweeps between rounds sharpen the incumbent mixture.
"""
from collections import namedtuple

import numpy as np
from scipy.optimize import linprog

from mixsynth import _backend
from mixsynth.errors import (DimensionMismatchError, PreconditionError,
                             SolverStallError)
from mixsynth.states import DensityMatrix, PureState, _as_density, trace_distance
from mixsynth.symmetry import is_invariant

_DEFAULT_BUDGET = 200_000
_MIN_TOL = 1e-9


def project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    mask = u - css / ks > 0
    k = ks[mask][-1]
    tau = css[k - 1] / k
    w = np.maximum(v - tau, 0.0)
    s = w.sum()
    return w / s if s > 0 else np.full(v.size, 1.0 / v.size)


def _matrix_of(state):
    if isinstance(state, PureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityMatrix):
        return state.entries
    return DensityMatrix(state).entries


class ConvexApproxProblem:
    """A target state, a finite candidate set, and an optional symmetry group.

    When a symmetry group is supplied the target must already be invariant
    under it (within 1e-8 in trace distance).
    """

    def __init__(self, target, candidates, symmetry=None):
        candidates = list(candidates)
        if not candidates:
            raise PreconditionError("candidate set must be non-empty")
        self.target = target
        self.candidates = tuple(candidates)
        self.symmetry = symmetry
        tmat = _matrix_of(target)
        self.dim = tmat.shape[0]
        stack = []
        for c in candidates:
            cm = _matrix_of(c)
            if cm.shape[0] != self.dim:
                raise DimensionMismatchError(
                    "candidate dimension differs from target")
            stack.append(cm)
        self._target_matrix = tmat
        self._candidate_stack = np.stack(stack)
        if symmetry is not None:
            if symmetry.dim != self.dim:
                raise DimensionMismatchError("symmetry dimension mismatch")
            if not is_invariant(_as_density(target), symmetry, tol=1e-8):
                raise PreconditionError(
                    "target is not invariant under the supplied symmetry group")

    def __len__(self):
        return len(self.candidates)


class ConvexApproxSolution:
    """Certified answer: mixture weights, dual witness, and the bracket.

    ``value`` is the certified lower bound (the dual objective);
    ``primal_value - dual_value = gap`` bounds how far it can sit below the
    true optimum.
    """

    def __init__(self, p, witness, primal_value, dual_value, iterations,
                 weak_duality_violation=0.0):
        p = np.asarray(p, dtype=float)
        s = p.sum()
        if abs(s - 1.0) > 1e-6:
            raise PreconditionError("mixture weights do not sum to 1")
        p = p / s
        p.setflags(write=False)
        witness = np.asarray(witness, dtype=complex)
        witness = (witness + witness.conj().T) / 2.0
        w, _ = _backend.jacobi_eigh(witness)
        if w[0] < -1e-10 or w[-1] > 1.0 + 1e-10:
            raise PreconditionError(
                f"witness spectrum [{w[0]:.3e}, {w[-1]:.3e}] leaves [0, 1]")
        witness.setflags(write=False)
        self.p = p
        self.witness = witness
        self.primal_value = float(primal_value)
        self.dual_value = float(dual_value)
        self.value = float(dual_value)
        self.gap = float(primal_value - dual_value)
        self.iterations = int(iterations)
        # largest amount by which any feasible witness value ever exceeded
        # the concurrent best upper bound (0 when weak duality held at every
        # iterate, up to floating-point noise)
        self.weak_duality_violation = float(weak_duality_violation)

    def to_dict(self):
        return {
            "value": self.value,
            "gap": self.gap,
            "p": [float(x) for x in self.p],
            "witness": {
                "re": self.witness.real.tolist(),
                "im": self.witness.imag.tolist(),
            },
            "primal": self.primal_value,
            "dual": self.dual_value,
            "iterations": self.iterations,
        }

    def __repr__(self):
        return (f"ConvexApproxSolution(value={self.value:.9g}, "
                f"gap={self.gap:.3g}, iterations={self.iterations})")


def witness_objective(witness, target, candidates):
    """Dual objective tr(M rho) - max_x tr(M rho_x) of a witness matrix.

    Any witness with spectrum inside [0, 1] lower-bounds the hull distance.
    """
    m = np.asarray(witness, dtype=complex)
    tmat = _matrix_of(target)
    val = np.trace(m @ tmat).real
    best = -np.inf
    for c in candidates:
        best = max(best, np.trace(m @ _matrix_of(c)).real)
    return float(val - best)


def symmetrize_witness(witness, group):
    """Group-average a witness so it commutes with every group element.

    Each unitary element pulls the witness back as U^dag M U; antiunitary
    elements additionally conjugate the entries.  For invariant problems the
    average certifies the same bound.
    """
    m = np.asarray(witness, dtype=complex)
    acc = np.zeros_like(m)
    for e in group:
        u = e.unitary_part
        pulled = u.conj().T @ m @ u
        if e.antiunitary:
            pulled = pulled.conj()
        acc += pulled
    acc /= len(group)
    return (acc + acc.conj().T) / 2.0


def restrict_support(problem, eps):
    """Keep only candidates within 2*eps of the (pure) target.

    Mixtures attaining a distance of at most eps from a pure target never
    need support farther than 2*eps away, so the restriction preserves the
    optimum for such instances.
    """
    if not isinstance(problem.target, PureState):
        tgt = _as_density(problem.target)
        if not tgt.is_pure():
            raise PreconditionError("restrict_support requires a pure target")
    kept = [c for c in problem.candidates
            if trace_distance(_as_density(problem.target), _as_density(c))
            <= 2.0 * eps + 1e-12]
    if not kept:
        raise PreconditionError(
            f"no candidates within {2 * eps} of the target")
    return ConvexApproxProblem(problem.target, kept, problem.symmetry)


class _CutSolver:
    """Trust-region cutting-plane engine (dense witnesses as flat vectors)."""

    def __init__(self, rho, cand_stack, tol, budget):
        self.m, self.d, _ = cand_stack.shape
        self.A = cand_stack.reshape(self.m, self.d * self.d)
        self.R = np.conj(self.A)
        self.rho = rho
        self.rho_vec = np.conj(rho.reshape(self.d * self.d))
        self.tol = tol
        self.budget = budget
        self.Ms, self.cc, self.W = [], [], []
        self.protect = np.zeros(0, dtype=bool)
        self.bestU, self.bestL = np.inf, -np.inf
        self.best_p, self.best_M = None, None
        self.evals = 0
        self.wd_viol = 0.0
        self._phi_cand = None
        self._psd_rows = []
        self._psd_rhs = []

    def witness_val(self, mvec):
        tm = float(np.real(self.rho_vec @ mvec))
        tx = np.real(self.R @ mvec)
        return tm - tx.max(), tm, tx

    def add_cut(self, mvec, protect=False):
        # Clip the spectrum into [0, 1] so every stored cut is a feasible
        # witness outright; aggregation can then never drift out of bounds.
        mat = mvec.reshape(self.d, self.d)
        mat = (mat + mat.conj().T) / 2.0
        w, v = _backend.jacobi_eigh(mat)
        if w[0] < 0.0 or w[-1] > 1.0:
            mat = (v * np.clip(w, 0.0, 1.0)) @ v.conj().T
            mat = (mat + mat.conj().T) / 2.0
        mvec = mat.reshape(self.d * self.d)
        val, tm, tx = self.witness_val(mvec)
        self.Ms.append(mvec)
        self.cc.append(tm)
        self.W.append(tx)
        self.protect = np.append(self.protect, protect)
        if val > self.bestL:
            self.bestL = val
            self.best_M = mvec
        if np.isfinite(self.bestU) and val > self.bestU + 1e-12:
            self.wd_viol = max(self.wd_viol, val - self.bestU)
        return val

    def eval_f(self, p):
        self.evals += 1
        sigma = (p @ self.A).reshape(self.d, self.d)
        diff = self.rho - sigma
        lam, vecs = _backend.jacobi_eigh((diff + diff.conj().T) / 2.0)
        upper = float(lam[lam > 0].sum())
        if upper < self.bestU:
            self.bestU = upper
            self.best_p = p.copy()
        return lam, vecs, upper

    def add_spectral(self, lam, vecs):
        # Every spectral-threshold projector is a feasible witness; sweeping
        # them largest-eigenvalue-first also covers degenerate positive parts.
        order = np.argsort(lam)[::-1]
        m = np.zeros((self.d, self.d), dtype=complex)
        for j in order[:-1]:
            m = m + np.outer(vecs[:, j], vecs[:, j].conj())
            self.add_cut(m.reshape(self.d * self.d).copy())

    def prune(self, keep_gap):
        if len(self.Ms) <= 220:
            return
        wm = np.stack(self.W)
        slack = (self.bestU + keep_gap * 10) - (np.asarray(self.cc)
                                                - wm @ self.best_p)
        order = np.argsort(-slack)
        drop = [j for j in order if not self.protect[j]][: len(self.Ms) - 160]
        keep = np.ones(len(self.Ms), dtype=bool)
        keep[drop] = False
        self.Ms = [m for m, k in zip(self.Ms, keep) if k]
        self.cc = [c for c, k in zip(self.cc, keep) if k]
        self.W = [w for w, k in zip(self.W, keep) if k]
        self.protect = self.protect[keep]

    def lp_round(self, center, radius):
        k = len(self.Ms)
        c_obj = np.zeros(self.m + 1)
        c_obj[-1] = 1.0
        wm = np.stack(self.W)
        a_ub = np.concatenate([-wm, -np.ones((k, 1))], axis=1)
        b_ub = -np.asarray(self.cc)
        a_eq = np.concatenate([np.ones((1, self.m)), np.zeros((1, 1))], axis=1)
        lo = np.maximum(center - radius, 0.0)
        hi = np.minimum(center + radius, 1.0)
        bounds = [(lo[i], hi[i]) for i in range(self.m)] + [(None, None)]
        res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                      bounds=bounds, method="highs")
        if not res.success:
            return None
        phat = project_simplex(res.x[: self.m])
        mu = -np.asarray(res.ineqlin.marginals)
        active = mu > 1e-12
        self.protect[:] = False
        self.protect[active[: len(self.protect)]] = True
        total = mu.sum()
        mbar = None
        if total > 1e-12:
            mun = mu / total
            mbar = np.zeros_like(self.Ms[0])
            for w, m in zip(mun, self.Ms):
                if w > 1e-14:
                    mbar = mbar + w * m
        return phat, float(res.x[-1]), mbar

    def polyak(self, p, n):
        for _ in range(n):
            lam, vecs, upper = self.eval_f(p)
            pos = lam > 1e-14
            proj = (vecs[:, pos] @ vecs[:, pos].conj().T)
            pvec = proj.reshape(self.d * self.d)
            val, _, _ = self.witness_val(pvec)
            if val > self.bestL:
                self.add_cut(pvec)
            if self.bestU - self.bestL <= self.tol:
                return p
            g = -np.real(self.R @ pvec)
            g -= g.mean()
            gn2 = float(g @ g)
            if gn2 < 1e-30:
                return p
            p = project_simplex(p - (upper - self.bestL) / gn2 * g)
        return p

    def _phi(self, x):
        # Real coefficient vector of X in the Hermitian pairing: with M
        # parameterized as (diag(M); Re/Im of each strict upper entry),
        # tr(M X) equals _phi(X) @ z for that parameter vector z.
        d = self.d
        out = np.empty(d * d)
        out[:d] = np.real(np.diagonal(x))
        k = d
        for i in range(d):
            for j in range(i + 1, d):
                out[k] = 2.0 * np.real(x[i, j])
                out[k + 1] = 2.0 * np.imag(x[i, j])
                k += 2
        return out

    def _z_to_m(self, z):
        d = self.d
        mat = np.zeros((d, d), dtype=complex)
        mat[np.diag_indices(d)] = z[:d]
        k = d
        for i in range(d):
            for j in range(i + 1, d):
                mat[i, j] = z[k] + 1j * z[k + 1]
                mat[j, i] = z[k] - 1j * z[k + 1]
                k += 2
        return mat

    def dual_polish(self, max_lps=400):
        """Outer-approximate the dual program directly in witness space.

        The dual is an eigenvalue-constrained linear program over Hermitian
        matrices; replacing 0 <= M <= I with accumulated Rayleigh-quotient
        cuts leaves an ordinary LP whose solution is eigen-clipped into a
        feasible witness (lower bound) while the LP multipliers of the
        candidate rows recover a mixture (upper bound).  Where the
        trust-region engine crawls along a kinked plateau, this pins both
        sides within a few dozen LPs.
        """
        d, m = self.d, self.m
        nm = d * d
        if self._phi_cand is None:
            stack = self.A.reshape(m, d, d)
            self._phi_cand = np.stack([self._phi(stack[i]) for i in range(m)])
            self._phi_rho = self._phi(self.rho)
        c_obj = np.concatenate([-self._phi_rho, [1.0]])
        cand_rows = np.concatenate([self._phi_cand, -np.ones((m, 1))], axis=1)
        # diag(M) in [0, 1]; 0 <= M <= I forces every off-diagonal Re/Im
        # component into [-1/2, 1/2].
        bounds = ([(0.0, 1.0)] * d + [(-0.5, 0.5)] * (nm - d)
                  + [(None, None)])
        for _ in range(max_lps):
            if self.evals >= self.budget:
                break
            if self._psd_rows:
                a_ub = np.concatenate([cand_rows, np.stack(self._psd_rows)])
                b_ub = np.concatenate([np.zeros(m), np.asarray(self._psd_rhs)])
            else:
                a_ub, b_ub = cand_rows, np.zeros(m)
            res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, bounds=bounds,
                          method="highs")
            if not res.success:
                break
            self.evals += 1
            model_ub = -float(res.fun)
            z = res.x[:nm]
            mhat = self._z_to_m(z)
            w, v = _backend.jacobi_eigh(mhat)
            clipped = (v * np.clip(w, 0.0, 1.0)) @ v.conj().T
            self.add_cut(clipped.reshape(nm), protect=True)
            mu = -np.asarray(res.ineqlin.marginals)[:m]
            phat = project_simplex(np.maximum(mu, 0.0))
            lam, vecs, _ = self.eval_f(phat)
            self.add_spectral(lam, vecs)
            if self.bestU - self.bestL <= self.tol:
                return True
            added = 0
            for j in np.where(w < -1e-12)[0]:
                vv = np.outer(v[:, j], v[:, j].conj())
                self._psd_rows.append(np.concatenate([-self._phi(vv), [0.0]]))
                self._psd_rhs.append(0.0)
                added += 1
            for j in np.where(w > 1.0 + 1e-12)[0]:
                vv = np.outer(v[:, j], v[:, j].conj())
                self._psd_rows.append(np.concatenate([self._phi(vv), [0.0]]))
                self._psd_rhs.append(1.0)
                added += 1
            if added == 0 and model_ub - self.bestL <= max(1e-12,
                                                           0.05 * self.tol):
                break
        return self.bestU - self.bestL <= self.tol

    def run(self):
        p = np.full(self.m, 1.0 / self.m)
        self.add_cut(np.zeros(self.d * self.d, dtype=complex))
        lam, vecs, _ = self.eval_f(p)
        self.add_spectral(lam, vecs)
        radius = 0.5
        center = p
        stalled = 0
        patience = 25
        last_gap = np.inf
        while self.evals < self.budget:
            if self.bestU - self.bestL <= self.tol:
                return True
            out = self.lp_round(center, radius)
            if out is None:
                break
            phat, model_val, mbar = out
            if mbar is not None:
                self.add_cut(mbar, protect=True)
            f_center = self.bestU
            lam, vecs, upper = self.eval_f(phat)
            self.add_spectral(lam, vecs)
            if self.bestU - self.bestL <= self.tol:
                return True
            predicted = max(f_center - model_val, 1e-18)
            actual = f_center - upper
            if actual >= 0.2 * predicted:
                center = phat
                radius = min(1.0, radius * 1.6)
            else:
                radius = max(radius * 0.5, 1e-7)
                if radius <= 1e-6:
                    radius = 0.25
            center = self.polyak(center, 4)
            if self.bestU - self.bestL <= self.tol:
                return True
            gap = self.bestU - self.bestL
            if gap < last_gap - max(1e-14, 0.05 * gap):
                stalled = 0
                last_gap = gap
            else:
                stalled += 1
                if stalled >= patience:
                    # rescue for a stalled subgradient polish: pin the dual
                    # side directly, then restart from a 50/50 blend of the
                    # incumbent and uniform.  Patience doubles after each
                    # restart so the rescue can never cycle the trust-region
                    # contraction forever.
                    if self.dual_polish():
                        return True
                    center = project_simplex(
                        0.5 * self.best_p + 0.5 / self.m)
                    radius = 0.25
                    stalled = 0
                    patience *= 2
            self.prune(self.bestU - self.bestL)
        return self.bestU - self.bestL <= self.tol


def solve(problem, tol=1e-7, budget=_DEFAULT_BUDGET):
    """Solve a convex approximation problem to a certified gap of at most tol.

    Returns a ConvexApproxSolution whose ``value`` is the dual (lower-bound)
    objective.  Raises SolverStallError carrying the best certified bracket
    if the evaluation budget runs out first.
    """
    if tol < _MIN_TOL:
        raise PreconditionError(f"tol must be at least {_MIN_TOL}")
    engine = _CutSolver(problem._target_matrix, problem._candidate_stack,
                        tol, budget)
    converged = engine.run()
    best_m = engine.best_M.reshape(engine.d, engine.d)
    if problem.symmetry is not None:
        candidate = symmetrize_witness(best_m, problem.symmetry)
        val = witness_objective(candidate, problem.target, problem.candidates)
        if val >= engine.bestL:
            best_m = candidate
            engine.bestL = val
    solution = ConvexApproxSolution(
        p=engine.best_p,
        witness=best_m,
        primal_value=engine.bestU,
        dual_value=engine.bestL,
        iterations=engine.evals,
        weak_duality_violation=engine.wd_viol,
    )
    if not converged:
        raise SolverStallError(
            f"no certificate below tol={tol} within {budget} evaluations "
            f"(best bracket [{engine.bestL:.9g}, {engine.bestU:.9g}])",
            solution=solution)
    return solution


SandwichResult = namedtuple(
    "SandwichResult", ["nearest_distance", "value", "covering_radius"])


def _pure_stack(states):
    return np.stack([s.amplitudes for s in states])


def sandwich_check(target, candidates, domain_samples, tol=1e-7):
    """Bracket a hull distance between two covering-style distances.

    Returns (nearest_distance, value, covering_radius): the distance from the
    target to its nearest candidate, the certified hull distance, and the
    worst nearest-candidate distance over the sampled domain.  The squared
    first number lower-bounds ``value``; the squared last one estimates the
    worst case over the domain.
    """
    candidates = list(candidates)
    domain_samples = list(domain_samples)
    all_pure = (isinstance(target, PureState)
                and all(isinstance(c, PureState) for c in candidates)
                and all(isinstance(s, PureState) for s in domain_samples))
    if all_pure:
        pts = _pure_stack(candidates)
        best = _backend.max_sq_overlap(target.amplitudes[None, :], pts)
        nearest = float(np.sqrt(max(0.0, 1.0 - best[0])))
        if domain_samples:
            worst = _backend.max_sq_overlap(_pure_stack(domain_samples), pts)
            covering = float(np.sqrt(max(0.0, 1.0 - worst.min())))
        else:
            covering = 0.0
    else:
        tgt = _as_density(target)
        nearest = min(trace_distance(tgt, _as_density(c)) for c in candidates)
        covering = 0.0
        for s in domain_samples:
            sd = _as_density(s)
            covering = max(covering,
                           min(trace_distance(sd, _as_density(c))
                               for c in candidates))
    value = solve(ConvexApproxProblem(target, candidates), tol=tol).value
    return SandwichResult(nearest, value, covering)
