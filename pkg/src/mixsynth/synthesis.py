"""Single-qubit Clifford+T synthesis: exhaustive exact enumeration,
deterministic lookup, circuit conjugation, and the probabilistic conversion
that squares the approximation error.

Enumeration is exact: every reachable amplitude is an integer combination of
the eighth roots of unity divided by sqrt(2)^k, so states are deduplicated by
integer arithmetic instead of floating-point rounding.  States are organized
in levels by T-count (level t+1 is the Clifford closure of T applied to level
t), which makes the recorded T-counts minimal by construction.
"""
import json
import math
from collections import deque

import numpy as np

from mixsynth.covering import meridian_ball_covering
from mixsynth.errors import (CoveringValidityError, InsufficientLibraryError,
                             MixsynthError, PreconditionError,
                             SolverStallError)
from mixsynth.solver import ConvexApproxProblem, solve
from mixsynth.states import DensityMatrix, PureState, meridian_state, trace_distance
from mixsynth.symmetry import SymmetryElement, group_closure, is_invariant

_OMEGA = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

GATE_ALPHABET = "HTSXYZ"

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
GATE_MATRICES = {
    "H": np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]],
                  dtype=complex),
    "T": np.array([[1.0, 0.0], [0.0, _OMEGA]], dtype=complex),
    "S": np.array([[1.0, 0.0], [0.0, 1j]], dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1j], [1j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class Circuit:
    """A word over the gate alphabet; the first letter acts last.

    ``realized_state()`` applies the word to |0>, i.e. the product of the
    gate matrices taken right to left.
    """

    __slots__ = ("word", "t_count")

    def __init__(self, word):
        for g in word:
            if g not in GATE_ALPHABET:
                raise PreconditionError(f"unknown gate letter {g!r}")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "t_count", word.count("T"))

    def __setattr__(self, name, value):
        raise AttributeError("Circuit is immutable")

    def realized_state(self):
        v = np.array([1.0, 0.0], dtype=complex)
        for g in reversed(self.word):
            v = GATE_MATRICES[g] @ v
        return PureState(v)

    def __repr__(self):
        return f"Circuit({self.word!r}, t_count={self.t_count})"


_CONJUGATE_REWRITE = {"T": "ZST", "S": "ZS", "Y": "ZYZ",
                      "H": "H", "X": "X", "Z": "Z"}


def conjugate_circuit(circuit):
    """A circuit realizing the entrywise complex conjugate of the original's
    state, with the same T-count.

    Works letterwise: conj(T) = Z S T and conj(S) = Z S exactly, conj(Y) =
    Z Y Z exactly, and H, X, Z are real.
    """
    return Circuit("".join(_CONJUGATE_REWRITE[g] for g in circuit.word))


# ---------------------------------------------------------------------------
# Exact amplitude arithmetic: a + b w + c w^2 + d w^3 over sqrt(2)^k, where
# w = exp(i pi/4) and w^4 = -1.  A state is (k, amp0, amp1) with 4-tuple
# integer coefficients.

def _mul_w(a):
    return (-a[3], a[0], a[1], a[2])


def _mul_w2(a):
    return (-a[2], -a[3], a[0], a[1])


def _neg(a):
    return (-a[0], -a[1], -a[2], -a[3])


def _div_sqrt2(a):
    """Coefficients of a/sqrt(2), or None when they are not integers."""
    if (a[0] - a[2]) & 1 or (a[1] - a[3]) & 1:
        return None
    return ((a[1] - a[3]) // 2, (a[0] + a[2]) // 2,
            (a[1] + a[3]) // 2, (a[2] - a[0]) // 2)


def _apply_gate(letter, state):
    k, u, v = state
    if letter == "T":
        return (k, u, _mul_w(v))
    if letter == "S":
        return (k, u, _mul_w2(v))
    if letter == "Z":
        return (k, u, _neg(v))
    if letter == "X":
        return (k, v, u)
    if letter == "Y":
        return (k, _neg(_mul_w2(v)), _mul_w2(u))
    if letter == "H":
        return (k + 1,
                tuple(x + y for x, y in zip(u, v)),
                tuple(x - y for x, y in zip(u, v)))
    raise PreconditionError(f"unknown gate letter {letter!r}")


def _canonical(state):
    """Reduce the sqrt(2) exponent, then pick the least of the 8 unit-phase
    rotations, so projectively equal states share one key."""
    k, u, v = state
    while k > 0:
        du = _div_sqrt2(u)
        if du is None:
            break
        dv = _div_sqrt2(v)
        if dv is None:
            break
        k, u, v = k - 1, du, dv
    best = None
    for _ in range(8):
        flat = u + v
        if best is None or flat < best:
            best = flat
        u, v = _mul_w(u), _mul_w(v)
    return (k, best)


def _to_amplitudes(state):
    k, u, v = state
    scale = math.sqrt(2.0) ** (-k)
    powers = (1.0, _OMEGA, _OMEGA * _OMEGA, _OMEGA ** 3)
    a0 = sum(c * p for c, p in zip(u, powers)) * scale
    a1 = sum(c * p for c, p in zip(v, powers)) * scale
    return np.array([a0, a1], dtype=complex)


_CLIFFORD_LETTERS = "HSXYZ"


class SynthesisLibrary:
    """All distinct states reachable within a T-count budget, each with the
    cheapest circuit found for it."""

    def __init__(self, entries, max_t_count, partial=False, verify=True):
        # entries: iterable of (PureState, Circuit)
        self.gate_alphabet = GATE_ALPHABET
        self.max_t_count = int(max_t_count)
        self.partial = bool(partial)
        self._states = []
        self._circuits = []
        self._index = {}
        for state, circuit in entries:
            self._add(state, circuit)
        self._amps = (np.stack([s.amplitudes for s in self._states])
                      if self._states else np.zeros((0, 2), dtype=complex))
        if verify:
            for state, circuit in zip(self._states, self._circuits):
                realized = circuit.realized_state()
                if not realized.isclose(state, tol=1e-9):
                    raise MixsynthError(
                        f"library entry {circuit.word!r} does not realize its "
                        "stored state")

    @staticmethod
    def _key(state):
        a = state.amplitudes
        return (round(a[0].real, 9), round(a[0].imag, 9),
                round(a[1].real, 9), round(a[1].imag, 9))

    def _add(self, state, circuit):
        key = self._key(state)
        idx = self._index.get(key)
        if idx is None:
            self._index[key] = len(self._states)
            self._states.append(state)
            self._circuits.append(circuit)
        elif circuit.t_count < self._circuits[idx].t_count:
            self._circuits[idx] = circuit

    def __len__(self):
        return len(self._states)

    def entries(self):
        return list(zip(self._states, self._circuits))

    def _overlaps(self, state):
        return np.abs(self._amps @ state.amplitudes.conj()) ** 2

    def nearest(self, state):
        """(circuit, library state, trace distance) of the closest entry."""
        if not self._states:
            raise PreconditionError("library is empty")
        ov = self._overlaps(state)
        i = int(np.argmax(ov))
        dist = math.sqrt(max(0.0, 1.0 - float(ov[i])))
        return self._circuits[i], self._states[i], dist

    def cheapest_within(self, state, eps):
        """The lowest-T-count entry within trace distance eps (ties broken
        by distance), or None when no entry is that close."""
        ov = self._overlaps(state)
        idx = np.nonzero(ov >= 1.0 - eps * eps)[0]
        if idx.size == 0:
            return None
        best = min(idx, key=lambda i: (self._circuits[i].t_count, -ov[i]))
        dist = math.sqrt(max(0.0, 1.0 - float(ov[best])))
        return self._circuits[best], self._states[best], dist

    def save(self, path):
        """One JSON object per line: {state:{re[],im[]}, word, t_count}."""
        with open(path, "w") as fh:
            for state, circuit in zip(self._states, self._circuits):
                row = {
                    "state": {"re": [state.amplitudes[0].real,
                                     state.amplitudes[1].real],
                              "im": [state.amplitudes[0].imag,
                                     state.amplitudes[1].imag]},
                    "word": circuit.word,
                    "t_count": circuit.t_count,
                }
                fh.write(json.dumps(row) + "\n")

    @classmethod
    def load(cls, path, verify=True):
        entries = []
        max_t = 0
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                amps = np.array(row["state"]["re"], dtype=float) \
                    + 1j * np.array(row["state"]["im"], dtype=float)
                circuit = Circuit(row["word"])
                if circuit.t_count != row["t_count"]:
                    raise PreconditionError(
                        f"inconsistent t_count for word {row['word']!r}")
                entries.append((PureState(amps), circuit))
                max_t = max(max_t, circuit.t_count)
        return cls(entries, max_t_count=max_t, verify=verify)


def enumerate_library(max_t_count, max_word_length, verify=True):
    """Exhaustive levelled enumeration up to a T-count budget.

    Level 0 is the Clifford closure of |0>; level t+1 applies T to level t
    and closes under Cliffords again.  States are deduplicated exactly.  If
    the word-length cap prevents reaching some state, the library is still
    returned with ``partial=True``.
    """
    if not 0 <= max_t_count <= 16:
        raise PreconditionError("max_t_count must lie in [0, 16]")
    if max_word_length < 1 or max_word_length > 64:
        raise PreconditionError("max_word_length must lie in [1, 64]")
    start = (0, (1, 0, 0, 0), (0, 0, 0, 0))
    seen = {}      # canonical key -> (state triple, word)
    partial = [False]

    def close_clifford(new_items):
        """Clifford closure; returns all items added, including the seeds."""
        added = list(new_items)
        queue = deque(new_items)
        while queue:
            st, word = queue.popleft()
            if len(word) + 1 > max_word_length:
                for g in _CLIFFORD_LETTERS:
                    if _canonical(_apply_gate(g, st)) not in seen:
                        partial[0] = True
                continue
            for g in _CLIFFORD_LETTERS:
                child = _apply_gate(g, st)
                key = _canonical(child)
                if key not in seen:
                    item = (child, g + word)
                    seen[key] = item
                    added.append(item)
                    queue.append(item)
        return added

    root_key = _canonical(start)
    seen[root_key] = (start, "")
    frontier = close_clifford([(start, "")])
    for _ in range(max_t_count):
        t_images = []
        for st, word in frontier:
            if len(word) + 1 > max_word_length:
                if _canonical(_apply_gate("T", st)) not in seen:
                    partial[0] = True
                continue
            child = _apply_gate("T", st)
            key = _canonical(child)
            if key not in seen:
                item = (child, "T" + word)
                seen[key] = item
                t_images.append(item)
        frontier = close_clifford(t_images)
    entries = [(PureState(_to_amplitudes(st)), Circuit(word))
               for st, word in seen.values()]
    return SynthesisLibrary(entries, max_t_count=max_t_count,
                            partial=partial[0], verify=verify)


class SynthesisConfig:
    """Free parameters of the probabilistic conversion.

    The covering is built at radius c*eps inside the 2*eps ball and the
    deterministic oracle is called at accuracy c_prime*eps; any c, c_prime >
    0 with c + c_prime <= 1 preserves the squared-error guarantee.
    """

    def __init__(self, c=0.7, c_prime=0.3, delta=1e-6, group="meridian"):
        if c <= 0 or c_prime <= 0:
            raise PreconditionError("c and c_prime must be positive")
        if c + c_prime > 1.0 + 1e-12:
            raise PreconditionError("c + c_prime must not exceed 1")
        if delta <= 0:
            raise PreconditionError("delta must be positive")
        if group not in ("meridian", "trivial"):
            raise PreconditionError("group must be 'meridian' or 'trivial'")
        self.c = float(c)
        self.c_prime = float(c_prime)
        self.delta = float(delta)
        self.group = group


class Ensemble:
    """A finite mixture of circuits approximating a target state."""

    def __init__(self, items, target, certified_gap):
        probs = np.array([p for p, _, _ in items], dtype=float)
        if np.any(probs < 0):
            raise PreconditionError("ensemble probabilities must be >= 0")
        total = probs.sum()
        if abs(total - 1.0) > 1e-6:
            raise PreconditionError("ensemble probabilities must sum to 1")
        probs = probs / total
        self.items = [(float(p), c, s)
                      for p, (_, c, s) in zip(probs, items)]
        self.target = target
        self.certified_gap = float(certified_gap)
        mix = np.zeros((2, 2), dtype=complex)
        for p, _, s in self.items:
            mix += p * np.outer(s.amplitudes, s.amplitudes.conj())
        self.achieved_error = trace_distance(target.density(),
                                             DensityMatrix(mix))

    def max_t_count(self):
        return max(c.t_count for _, c, _ in self.items)

    def sample(self, rng):
        """Draw one (circuit, state) according to the probabilities."""
        probs = [p for p, _, _ in self.items]
        i = int(rng.choice(len(self.items), p=probs))
        return self.items[i][1], self.items[i][2]

    def to_dict(self):
        return {
            "achieved_error": self.achieved_error,
            "certified_gap": self.certified_gap,
            "support_size": len(self.items),
            "max_t_count": self.max_t_count(),
            "items": [{"p": p, "word": c.word, "t_count": c.t_count,
                       "state": {"re": s.amplitudes.real.tolist(),
                                 "im": s.amplitudes.imag.tolist()}}
                      for p, c, s in self.items],
        }


def deterministic_synthesize(library, target, eps):
    """Nearest library entry, required to be within eps.

    Raises InsufficientLibraryError (carrying the best distance) otherwise.
    """
    if target.dim != 2:
        raise PreconditionError("synthesis targets must be qubit states")
    circuit, state, dist = library.nearest(target)
    if dist > eps:
        raise InsufficientLibraryError(
            f"closest library entry is at distance {dist:.6g} > eps={eps}",
            best_error=dist)
    return circuit, state


_CONJ_GROUP = None


def _conjugation_group():
    global _CONJ_GROUP
    if _CONJ_GROUP is None:
        theta = SymmetryElement(np.eye(2, dtype=complex), antiunitary=True)
        _CONJ_GROUP = group_closure([theta])
    return _CONJ_GROUP


def _meridian_angle(state):
    a = state.amplitudes
    return math.atan2(a[1].real, a[0].real)


def _meridian_cover_points(t, eps, c):
    """Three-point covering of the meridian 2*eps-ball at radius c*eps."""
    if abs(c - 0.7) <= 1e-12:
        return meridian_ball_covering(t, eps * eps).points
    if 2.0 * eps >= 1.0 or math.asin(2.0 * eps) > 3.0 * math.asin(c * eps) + 1e-12:
        raise CoveringValidityError(
            f"three-point meridian covering invalid for c={c}, eps={eps}")
    off = 2.0 * math.asin(c * eps)
    return [meridian_state(t), meridian_state(t - off), meridian_state(t + off)]


def _ball_net(target, ball_radius, sep_radius, seed=0, max_points=512):
    """Greedy maximal sep_radius-separated set inside the trace-distance
    ball around a qubit target, sampled uniformly (Haar conditional)."""
    rng = np.random.default_rng(seed)
    amp = target.amplitudes
    perp = np.array([-amp[1].conj(), amp[0].conj()])
    r_max = min(1.0, ball_radius)
    accepted = []
    rejects = 0
    while rejects < max(50 * len(accepted), 2000):
        r = r_max * math.sqrt(rng.uniform())
        phase = np.exp(2j * math.pi * rng.uniform())
        psi = math.sqrt(max(0.0, 1.0 - r * r)) * amp + r * phase * perp
        ok = all(abs(np.vdot(other, psi)) ** 2 <= 1.0 - sep_radius ** 2
                 for other in accepted)
        if ok:
            accepted.append(psi)
            rejects = 0
            if len(accepted) > max_points:
                raise PreconditionError("ball net failed to saturate")
        else:
            rejects += 1
    return [PureState(v) for v in accepted]


def probabilistic_synthesize(library, target, eps, config=None,
                             solver_tol=1e-7):
    """Convert deterministic synthesis at accuracy ~eps into an ensemble with
    error at most eps**2 + delta.

    Covers the 2*eps-ball around the target at radius c*eps, synthesizes each
    covering point at accuracy c_prime*eps (plus conjugated circuits for the
    real-amplitude family), and solves the certified convex approximation
    over the realized states.  The T-count cap of the candidate set is
    lowered as far as the error budget allows before the final ensemble is
    formed.
    """
    if config is None:
        config = SynthesisConfig()
    if target.dim != 2:
        raise PreconditionError("synthesis targets must be qubit states")
    if not 0.0 < eps < 0.5:
        raise PreconditionError("eps must lie in (0, 1/2)")

    # exact library hit: a point mass certified by the trivial lower bound 0.
    # Floating-point overlaps resolve distances only to ~sqrt(ulp), so "exact"
    # means indistinguishable at that scale (and well inside the budget).
    circuit0, state0, dist0 = library.nearest(target)
    if dist0 <= min(1e-6, eps * eps):
        return Ensemble([(1.0, circuit0, state0)], target,
                        certified_gap=dist0)

    if config.group == "meridian":
        if not is_invariant(target.density(), _conjugation_group(), tol=1e-8):
            raise PreconditionError(
                "target is not in the real-amplitude (meridian) family")
        points = _meridian_cover_points(_meridian_angle(target), eps, config.c)
        use_conjugates = True
    else:
        points = _ball_net(target, 2.0 * eps, config.c * eps)
        use_conjugates = False

    oracle_eps = config.c_prime * eps
    by_key = {}

    def add_candidate(circuit, state):
        key = SynthesisLibrary._key(state)
        old = by_key.get(key)
        if old is None or circuit.t_count < old[0].t_count:
            by_key[key] = (circuit, state)

    for point in points:
        hit = library.cheapest_within(point, oracle_eps)
        if hit is None:
            _, _, best = library.nearest(point)
            raise InsufficientLibraryError(
                f"no library entry within {oracle_eps:.6g} of a covering "
                f"point (closest at {best:.6g})", best_error=best)
        circuit, state, _ = hit
        add_candidate(circuit, state)
        if use_conjugates:
            conj_circuit = conjugate_circuit(circuit)
            conj_state = PureState(state.amplitudes.conj())
            add_candidate(conj_circuit, conj_state)

    keep_radius = 2.0 * (2.0 * eps)  # twice the covered ball's radius
    candidates = [(c, s) for c, s in by_key.values()
                  if trace_distance(target.density(), s.density())
                  <= keep_radius + 1e-12]
    if not candidates:
        raise InsufficientLibraryError(
            "all candidates fell outside the support window",
            best_error=dist0)

    tol_eff = min(solver_tol, config.delta / 2.0)
    error_budget = eps * eps + config.delta
    solution, chosen = None, None
    for cap in sorted({c.t_count for c, _ in candidates}):
        subset = [(c, s) for c, s in candidates if c.t_count <= cap]
        try:
            attempt = solve(
                ConvexApproxProblem(target, [s for _, s in subset]),
                tol=tol_eff)
        except SolverStallError:
            if cap == max(c.t_count for c, _ in candidates):
                raise
            continue
        if attempt.primal_value <= error_budget - 1e-9:
            solution, chosen = attempt, subset
            break
    if solution is None:
        raise MixsynthError(
            "no candidate subset reached the eps^2 + delta budget; the "
            "library or covering is outside the guarantee's assumptions")

    items = [(p, c, s) for p, (c, s) in zip(solution.p, chosen) if p > 1e-12]
    ensemble = Ensemble(items, target, certified_gap=solution.gap)
    if abs(ensemble.achieved_error - solution.primal_value) > 1e-6:
        raise MixsynthError(
            "geometric and solver error estimates disagree beyond 1e-6")
    if ensemble.achieved_error > error_budget:
        raise MixsynthError(
            "recomputed ensemble error exceeds the eps^2 + delta budget")
    return ensemble


def tcount_experiment(targets, target_errors, library, config=None,
                      solver_tol=1e-7):
    """Deterministic vs probabilistic T-count at matched final error.

    For each meridian angle and target error e: the deterministic leg picks
    the cheapest single circuit within e; the probabilistic leg runs the
    conversion at sqrt(e), whose guarantee is e + delta.  Legs that cannot
    be served are flagged per row rather than aborting the sweep.
    """
    if config is None:
        config = SynthesisConfig()
    rows = []
    for t in sorted(targets):
        state = meridian_state(t)
        for e in sorted(target_errors):
            row = {"target_t": float(t), "target_error": float(e),
                   "det_tcount": -1, "det_error": float("nan"),
                   "prob_max_tcount": -1, "prob_error": float("nan"),
                   "support_size": 0, "det_ok": False, "prob_ok": False}
            hit = library.cheapest_within(state, e)
            if hit is not None:
                circuit, _, dist = hit
                row.update(det_tcount=circuit.t_count, det_error=dist,
                           det_ok=True)
            else:
                _, _, best = library.nearest(state)
                row["det_error"] = best
            try:
                ens = probabilistic_synthesize(
                    library, state, math.sqrt(e), config, solver_tol)
                row.update(prob_max_tcount=ens.max_t_count(),
                           prob_error=ens.achieved_error,
                           support_size=len(ens.items), prob_ok=True)
            except (InsufficientLibraryError, CoveringValidityError):
                pass
            rows.append(row)
    return rows
