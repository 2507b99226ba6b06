"""Coverings of pure-state families, ball volumes, and library-size bounds.

Distances are trace distances; between pure states that is
sqrt(1 - |<a|b>|^2), and along the real-amplitude meridian of the qubit
sphere it reduces to |sin(dt)| in the angle parameter.  Covering reports
record how they were verified (sample count and seed) so the verified flag is
a reproducible statistical claim.
"""
import math
import re

import numpy as np

from mixsynth import _backend
from mixsynth.errors import CoveringValidityError, PreconditionError
from mixsynth.states import DensityMatrix, PureState, meridian_state

_CHUNK = 262144


class CoveringReport:
    """A set of points, the radius they claim to cover at, and verification
    metadata (worst observed nearest-distance over sampled members)."""

    def __init__(self, points, radius, family, verified, worst_observed,
                 sample_count, seed):
        self.points = list(points)
        self.radius = float(radius)
        self.family = family
        self.verified = bool(verified)
        self.worst_observed = float(worst_observed)
        self.sample_count = int(sample_count)
        self.seed = int(seed)

    def to_dict(self):
        return {
            "family": self.family,
            "radius": self.radius,
            "size": len(self.points),
            "verified": self.verified,
            "worst_observed": self.worst_observed,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "points": [{"re": p.amplitudes.real.tolist(),
                        "im": p.amplitudes.imag.tolist()}
                       for p in self.points],
        }

    def __repr__(self):
        return (f"CoveringReport({self.family}, radius={self.radius:.6g}, "
                f"size={len(self.points)}, verified={self.verified})")


def _meridian_worst(point_ts, sample_ts):
    """Worst over samples of the nearest distance to the points, where both
    sets are meridian angles and the distance is |sin(dt)|."""
    diff = sample_ts[:, None] - point_ts[None, :]
    return float(np.abs(np.sin(diff)).min(axis=1).max())


def meridian_covering(eps):
    """Equally spaced covering of the whole meridian at radius eps.

    Uses ceil(pi / (2 asin eps)) points; a fine offset grid measures the
    worst nearest-distance for the verification record.
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError("meridian_covering: eps must lie in (0, 1)")
    # tiny downward nudge so exact integer ratios don't round up a point
    n = int(math.ceil(math.pi / (2.0 * math.asin(eps)) - 1e-12))
    ts = np.arange(n) * (math.pi / n)
    grid = min(2003 * n, 200_003)
    # irrational offset keeps the grid off the exact midpoints
    sample_ts = (np.arange(grid) + (math.sqrt(5.0) - 2.0)) * (math.pi / grid)
    worst = _meridian_worst(ts, sample_ts)
    return CoveringReport(
        points=[meridian_state(t) for t in ts],
        radius=eps,
        family="meridian",
        verified=worst <= eps,
        worst_observed=worst,
        sample_count=grid,
        seed=0,
    )


def meridian_ball_covering(center_t, eps):
    """Three-point covering of the meridian ball of radius 2*sqrt(eps).

    Returns {t, t +- 2 asin(0.7 sqrt(eps))}, which covers the ball at radius
    0.7*sqrt(eps).  Valid only for eps <= 0.07; beyond that three points no
    longer reach the ball's edge.
    """
    if eps > 0.07:
        raise CoveringValidityError(
            f"meridian_ball_covering: eps = {eps} exceeds the 0.07 validity "
            "threshold for the three-point construction")
    if eps <= 0.0:
        raise PreconditionError("meridian_ball_covering: eps must be positive")
    root = math.sqrt(eps)
    offset = 2.0 * math.asin(0.7 * root)
    ball_radius = 2.0 * root
    ts = np.array([center_t, center_t - offset, center_t + offset])
    half_width = math.asin(min(1.0, ball_radius))
    grid = 20_001
    # strictly interior grid with an irrational-fraction offset, so no sample
    # lands exactly on a midpoint where the distance equals the radius
    sample_ts = center_t - half_width \
        + (np.arange(grid) + (math.sqrt(5.0) - 2.0)) \
        * (2.0 * half_width / (grid + 1))
    worst = _meridian_worst(ts, sample_ts)
    radius = 0.7 * root
    return CoveringReport(
        points=[meridian_state(t) for t in ts],
        radius=radius,
        family=f"meridian-ball({center_t:.12g},{ball_radius:.12g})",
        verified=worst <= radius,
        worst_observed=worst,
        sample_count=grid,
        seed=0,
    )


_FULL_SPHERE_RE = re.compile(r"^full-sphere\((\d+)\)$")


def _haar_samples(rng, n, d):
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z


def _family_sampler(family):
    """Returns (dim, draw(rng, n) -> (n, dim) unit complex rows)."""
    if family == "meridian":
        def draw(rng, n):
            ts = rng.uniform(0.0, math.pi, n)
            return np.stack([np.cos(ts), np.sin(ts)], axis=1).astype(complex)
        return 2, draw
    m = _FULL_SPHERE_RE.match(family)
    if m:
        d = int(m.group(1))
        if d < 2 or d > 4:
            raise PreconditionError(
                "greedy_net supports full-sphere(d) only for 2 <= d <= 4")
        return d, lambda rng, n: _haar_samples(rng, n, d)
    raise PreconditionError(
        f"unsupported family {family!r}; use 'meridian' or 'full-sphere(d)'")


def greedy_net(family, eps, seed, max_points=100_000, verify_samples=100_000):
    """Maximal eps-separated set over a family, verified as an eps-covering.

    Random proposals are accepted when at least eps from every accepted
    point; sampling stops once a long run of consecutive rejections signals
    saturation.  Maximality of a separated set is what makes it a covering,
    so the verification pass estimates the worst nearest-distance over fresh
    samples.
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError("greedy_net: eps must lie in (0, 1)")
    d, draw = _family_sampler(family)
    rng = np.random.default_rng(seed)
    sep_overlap = 1.0 - eps * eps  # accept iff max |<a|b>|^2 <= this
    accepted = np.zeros((0, d), dtype=complex)
    rejects = 0
    while rejects < max(50 * len(accepted), 2000):
        batch = draw(rng, 256)
        for row in batch:
            if accepted.shape[0] == 0:
                ok = True
            else:
                ok = np.abs(accepted @ row.conj()).max() ** 2 <= sep_overlap
            if ok:
                accepted = np.vstack([accepted, row[None, :]])
                rejects = 0
                if accepted.shape[0] > max_points:
                    raise PreconditionError(
                        f"greedy_net: exceeded max_points={max_points} before "
                        "saturating")
            else:
                rejects += 1
    worst_sq = 1.0
    if verify_samples > 0:
        remaining = int(verify_samples)
        best = np.inf
        while remaining > 0:
            n = min(remaining, _CHUNK)
            samples = draw(rng, n)
            ov = _backend.max_sq_overlap(samples, accepted)
            best = min(best, float(ov.min()))
            remaining -= n
        worst_sq = best
    worst = math.sqrt(max(0.0, 1.0 - worst_sq))
    return CoveringReport(
        points=[PureState(row) for row in accepted],
        radius=eps,
        family=family,
        verified=verify_samples > 0 and worst <= eps,
        worst_observed=worst,
        sample_count=verify_samples,
        seed=seed,
    )


def ball_volume(d, eps):
    """Haar volume of the trace-distance eps-ball around a pure state."""
    if d < 1:
        raise PreconditionError("ball_volume: d must be at least 1")
    if not 0.0 < eps <= 1.0:
        raise PreconditionError("ball_volume: eps must lie in (0, 1]")
    return float(eps ** (2 * (d - 1)))


def mc_ball_volume(d, eps, center, n_samples, seed):
    """Monte Carlo estimate of the Haar volume of an eps-ball.

    Samples pure states as normalized complex Gaussian vectors and counts the
    fraction within trace distance eps of the center.  Returns (estimate,
    binomial standard error).  Deterministic given the seed.
    """
    if d > 4:
        raise PreconditionError("mc_ball_volume supports d <= 4")
    n_samples = int(n_samples)
    if n_samples < 10_000:
        raise PreconditionError("mc_ball_volume needs at least 1e4 samples")
    if isinstance(center, PureState):
        center_amp, center_mat = center.amplitudes, None
    else:
        if not isinstance(center, DensityMatrix):
            center = DensityMatrix(center)
        if center.is_pure():
            w, v = center.eig()
            amp = v[:, int(np.argmax(w))]
            center_amp, center_mat = amp / np.linalg.norm(amp), None
        else:
            center_amp, center_mat = None, center.entries
    dim = len(center_amp) if center_mat is None else center_mat.shape[0]
    if dim != d:
        raise PreconditionError("mc_ball_volume: center dimension is not d")
    rng = np.random.default_rng(seed)
    count = 0
    remaining = n_samples
    while remaining > 0:
        n = min(remaining, _CHUNK)
        samples = _haar_samples(rng, n, d)
        if center_mat is None:
            count += _backend.count_within_pure(samples, center_amp, eps)
        else:
            count += _backend.count_within_mixed(samples, center_mat, eps)
        remaining -= n
    estimate = count / n_samples
    std_error = math.sqrt(max(estimate * (1.0 - estimate), 0.0) / n_samples)
    return estimate, std_error


def g4_bound(eps, p0):
    """Closed-form upper bound on the d=4 Haar volume of the eps-ball around
    a rank-2 state whose largest eigenvalue is p0.

    Returns 0 when p0 <= 1 - eps (the ball carries no pure states) and
    eps**6 at p0 = 1 (the pure-center volume).
    """
    if not 0.0 < eps <= 0.5:
        raise PreconditionError("g4_bound: eps must lie in (0, 1/2]")
    if p0 > 1.0:
        raise PreconditionError("g4_bound: p0 cannot exceed 1")
    if p0 <= 1.0 - eps:
        return 0.0
    if p0 == 1.0:
        return float(eps ** 6)
    a = (2.0 * p0 - 1.0) / (eps + p0)
    b = p0 / (eps + p0)
    term1 = (1.0 - 6.0 * b - a * b * b) / (2.0 * a * b * b)
    u = (b - a) / a
    # ratio = (1 - log(1+u)/u) / u, series-expanded near u = 0
    if abs(u) < 1e-3:
        ratio = 0.5 - u * (1.0 / 3.0 - u * (0.25 - u * (0.2 - u / 6.0)))
    else:
        ratio = (1.0 - math.log1p(u) / u) / u
    term2 = 3.0 * (a + 1.0) / (a * a) * ratio
    return float(2.0 * (p0 + eps - 1.0) ** 3 * (term1 + term2))


class BoundsReport:
    """Two-sided bounds on covering numbers and on the bit lengths of
    deterministic vs probabilistic synthesis libraries at accuracy eps.

    ``scale_bits`` is (d-1)*log2(1/eps), the natural bit scale; covering
    numbers are reported as base-2 logs.  The deterministic bit length
    inherits the external-covering lower bound and the internal-covering
    upper bound.  Ratio diagnostics tighten both brackets to integers (bit
    lengths are integer counts) before forming prob/det.
    """

    def __init__(self, d, eps):
        if d < 2:
            raise PreconditionError("bounds_report: d must be at least 2")
        if not 0.0 < eps <= 0.5:
            raise PreconditionError("bounds_report: eps must lie in (0, 1/2]")
        self.d = int(d)
        self.eps = float(eps)
        l = (d - 1) * math.log2(1.0 / eps)
        spread = math.log2(5.0 * d * math.log(d))
        self.scale_bits = l
        self.log2_internal_cover_lower = 2.0 * l
        self.log2_internal_cover_upper = 2.0 * l + spread
        if d >= 4:
            self.log2_external_cover_lower = 2.0 * l
        else:
            self.log2_external_cover_lower = \
                2.0 * (d - 1) * math.log2(1.0 / (2.0 * eps))
        self.det_bits_lower = self.log2_external_cover_lower
        self.det_bits_upper = self.log2_internal_cover_upper
        self.prob_bits_lower = l - math.log2(d)
        self.prob_bits_upper = l + spread
        # integer-count tightening for the ratio bracket
        p_lo = math.ceil(self.prob_bits_lower - 1e-12)
        p_hi = math.floor(self.prob_bits_upper + 1e-12)
        d_lo = math.ceil(self.det_bits_lower - 1e-12)
        d_hi = math.floor(self.det_bits_upper + 1e-12)
        self.ratio_lower = p_lo / d_hi if d_hi > 0 else float("nan")
        self.ratio_upper = p_hi / d_lo if d_lo > 0 else float("nan")
        self.ratio_midpoint = 0.5 * (self.ratio_lower + self.ratio_upper)
        self.ratio_width = self.ratio_upper - self.ratio_lower

    def to_dict(self):
        return {
            "d": self.d,
            "eps": self.eps,
            "scale_bits": self.scale_bits,
            "log2_internal_cover_lower": self.log2_internal_cover_lower,
            "log2_internal_cover_upper": self.log2_internal_cover_upper,
            "log2_external_cover_lower": self.log2_external_cover_lower,
            "det_bits_lower": self.det_bits_lower,
            "det_bits_upper": self.det_bits_upper,
            "prob_bits_lower": self.prob_bits_lower,
            "prob_bits_upper": self.prob_bits_upper,
            "ratio_lower": self.ratio_lower,
            "ratio_upper": self.ratio_upper,
            "ratio_midpoint": self.ratio_midpoint,
            "ratio_width": self.ratio_width,
        }

    def __repr__(self):
        return (f"BoundsReport(d={self.d}, eps={self.eps:.6g}, "
                f"ratio=[{self.ratio_lower:.4f}, {self.ratio_upper:.4f}])")


def bounds_report(d, eps):
    """Covering-number and library-bit-length bounds at dimension d and
    accuracy eps, with the prob/det ratio bracket diagnostics."""
    return BoundsReport(d, eps)
