"""Command-line entry points.

Every subcommand is deterministic given its parameters (stochastic ones
require --seed), writes canonical JSON/CSV (sorted keys, floats at 15
significant digits), and records a run manifest next to any --out artifact,
so reruns are byte-identical.

Exit codes: 0 success, 2 precondition/usage violation (including an
insufficient synthesis library, whose payload carries the best achievable
accuracy), 3 solver stall.
"""
import json
import math
import sys

import click
import numpy as np

from mixsynth import __version__
from mixsynth.covering import (bounds_report, ball_volume, g4_bound,
                               greedy_net, mc_ball_volume,
                               meridian_ball_covering, meridian_covering)
from mixsynth.errors import (InsufficientLibraryError, MixsynthError,
                             PreconditionError, SolverStallError)
from mixsynth.measures import (SchmidtVector, coherence_distance,
                               isotropic_bracket, isotropic_distance,
                               product_net, simplex_formula, werner_bracket,
                               werner_distance)
from mixsynth.solver import sandwich_check
from mixsynth.states import (DensityMatrix, PureState, meridian_state,
                             pauli_eigenstates)
from mixsynth.synthesis import (SynthesisConfig, SynthesisLibrary,
                                enumerate_library, probabilistic_synthesize,
                                tcount_experiment)

_TCOUNT_COLUMNS = ("target_t", "target_error", "det_tcount", "det_error",
                   "prob_max_tcount", "prob_error", "support_size")


class RunManifest:
    """Record of one CLI invocation: enough to reproduce its outputs."""

    def __init__(self, subcommand, parameters, seed, outputs):
        self.subcommand = subcommand
        self.parameters = parameters
        self.seed = seed
        self.artifact_version = __version__
        self.outputs = list(outputs)

    def to_dict(self):
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "outputs": self.outputs,
        }


def _plain(obj):
    """Coerce numpy scalars/arrays so the canonical writer sees built-ins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _render(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(k)}: {_render(obj[k], indent + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        parts = [f"{inner}{_render(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return "null"
        return f"{obj:.15g}"
    return json.dumps(obj)


def canonical_json(obj):
    """Deterministic JSON text: sorted keys, 15 significant digits."""
    return _render(_plain(obj)) + "\n"


def _csv_cell(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.15g}"
    return str(v)


def _tcount_csv(rows):
    lines = [",".join(_TCOUNT_COLUMNS)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[c]) for c in _TCOUNT_COLUMNS))
    return "\n".join(lines) + "\n"


def _finish(subcommand, parameters, seed, result, out, text=None):
    """Write the result (canonical JSON unless prebuilt text) and manifest."""
    body = text if text is not None else canonical_json(result)
    manifest = RunManifest(subcommand, _plain(parameters), seed,
                           [out] if out else [])
    if out:
        with open(out, "w") as fh:
            fh.write(body)
        with open(out + ".manifest.json", "w") as fh:
            fh.write(canonical_json(manifest.to_dict()))
        click.echo(canonical_json(manifest.to_dict()), nl=False)
    else:
        click.echo(body, nl=False)


def _floats(text):
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals:
        raise PreconditionError("expected a comma-separated list of numbers")
    return vals


def _pure_from_bloch(v):
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    theta = math.acos(max(-1.0, min(1.0, v[2])))
    phi = math.atan2(v[1], v[0])
    return PureState(np.array([math.cos(theta / 2.0),
                               math.sin(theta / 2.0) * np.exp(1j * phi)]))


@click.group()
@click.version_option(version=__version__, prog_name="mixsynth")
def cli():
    """Certified convex approximation of quantum states, probabilistic
    circuit synthesis, and covering/volume verification."""


@cli.command("fig1")
@click.option("--tol", type=float, default=1e-7, show_default=True,
              help="Certified duality-gap tolerance.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_fig1(tol, out):
    """Two worked sandwich checks: the six-state octahedral net against its
    worst corner, and a four-point meridian covering against its worst
    midpoint.  In both, the certified mixture error equals the squared
    deterministic error."""
    corners = [_pure_from_bloch((sx, sy, sz))
               for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
    res_a = sandwich_check(_pure_from_bloch((1, 1, 1)), pauli_eigenstates(),
                           corners, tol=tol)
    eps_b = math.sin(math.pi / 8.0)
    cov_b = meridian_covering(eps_b)
    grid = (np.arange(4001) + 0.414) * (math.pi / 4001)
    res_b = sandwich_check(meridian_state(math.pi / 8.0), cov_b.points,
                           [meridian_state(t) for t in grid], tol=tol)
    anchor_a = (math.sqrt(3.0) - 1.0) / (2.0 * math.sqrt(3.0))
    anchor_b = (1.0 - 1.0 / math.sqrt(2.0)) / 2.0
    checks = (
        abs(res_a.nearest_distance ** 2 - res_a.value) <= 1e-8
        and abs(res_b.nearest_distance ** 2 - res_b.value) <= 1e-8
        and abs(res_a.value - anchor_a) <= 1e-6
        and abs(res_b.value - anchor_b) <= 1e-6
    )
    if not checks:
        raise MixsynthError("sandwich consistency checks failed")
    result = {
        "eps_a": res_a.nearest_distance,
        "eps2_a": res_a.value,
        "eps_b": res_b.nearest_distance,
        "eps2_b": res_b.value,
    }
    _finish("fig1", {"tol": tol}, None, result, out)


@cli.command("synth")
@click.option("--t", "angle", type=float, required=True,
              help="Meridian angle of the target state.")
@click.option("--eps", type=float, required=True,
              help="Deterministic accuracy being converted.")
@click.option("--delta", type=float, default=1e-6, show_default=True)
@click.option("--library-path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--seed", type=int, required=True,
              help="Seed for sampling one circuit from the ensemble.")
@click.option("--tol", type=float, default=1e-7, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_synth(angle, eps, delta, library_path, seed, tol, out):
    """Convert deterministic synthesis at accuracy eps into an ensemble with
    error at most eps^2 + delta, then sample one circuit from it."""
    library = SynthesisLibrary.load(library_path)
    config = SynthesisConfig(delta=delta)
    ensemble = probabilistic_synthesize(library, meridian_state(angle), eps,
                                        config=config, solver_tol=tol)
    circuit, _ = ensemble.sample(np.random.default_rng(seed))
    result = ensemble.to_dict()
    result["target_angle"] = angle
    result["eps"] = eps
    result["sampled"] = {"word": circuit.word, "t_count": circuit.t_count}
    params = {"t": angle, "eps": eps, "delta": delta,
              "library_path": library_path, "tol": tol}
    _finish("synth", params, seed, result, out)


@cli.command("tcount")
@click.option("--library-path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--targets", default="0.3,0.6,0.9,1.2", show_default=True,
              help="Comma-separated meridian angles.")
@click.option("--errors", default="0.01,0.02,0.04", show_default=True,
              help="Comma-separated final target errors.")
@click.option("--delta", type=float, default=1e-6, show_default=True)
@click.option("--tol", type=float, default=1e-7, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_tcount(library_path, targets, errors, delta, tol, fmt, out):
    """Deterministic vs probabilistic T-count sweep at matched final error."""
    library = SynthesisLibrary.load(library_path)
    rows = tcount_experiment(_floats(targets), _floats(errors), library,
                             config=SynthesisConfig(delta=delta),
                             solver_tol=tol)
    params = {"library_path": library_path, "targets": targets,
              "errors": errors, "delta": delta, "tol": tol, "format": fmt}
    if fmt == "csv":
        _finish("tcount", params, None, None, out, text=_tcount_csv(rows))
    else:
        _finish("tcount", params, None, {"rows": rows}, out)


@cli.command("covering")
@click.option("--family", required=True,
              help="'meridian' or 'full-sphere(d)' with 2 <= d <= 4.")
@click.option("--eps", type=float, required=True)
@click.option("--method", type=click.Choice(["greedy", "uniform", "ball"]),
              default="greedy", show_default=True)
@click.option("--center-t", type=float, default=None,
              help="Ball center angle (method=ball).")
@click.option("--seed", type=int, default=None,
              help="Required for method=greedy.")
@click.option("--max-points", type=int, default=100_000, show_default=True)
@click.option("--verify-samples", type=int, default=100_000,
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_covering(family, eps, method, center_t, seed, max_points,
                 verify_samples, out):
    """Build and verify a covering of a pure-state family."""
    if method == "greedy":
        if seed is None:
            raise PreconditionError("method=greedy requires --seed")
        report = greedy_net(family, eps, seed=seed, max_points=max_points,
                            verify_samples=verify_samples)
    elif method == "uniform":
        if family != "meridian":
            raise PreconditionError("method=uniform covers 'meridian' only")
        report = meridian_covering(eps)
    else:
        if center_t is None:
            raise PreconditionError("method=ball requires --center-t")
        report = meridian_ball_covering(center_t, eps)
    params = {"family": family, "eps": eps, "method": method,
              "center_t": center_t, "max_points": max_points,
              "verify_samples": verify_samples}
    _finish("covering", params, seed, report.to_dict(), out)


@cli.command("volume")
@click.option("--d", "dim", type=int, required=True)
@click.option("--eps", type=float, required=True)
@click.option("--n", "n_samples", type=int, default=1_000_000,
              show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--p0", type=float, default=None,
              help="Largest eigenvalue of a rank-2 diagonal center; "
                   "omit for a pure center.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_volume(dim, eps, n_samples, seed, p0, out):
    """Monte Carlo ball-volume estimate, with the closed forms that bound
    it (exact for pure centers; rank-2 upper bound for d=4)."""
    if p0 is None:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        center = PureState(amps)
        closed = ball_volume(dim, eps)
        upper = None
    else:
        mat = np.zeros((dim, dim), dtype=complex)
        mat[0, 0] = p0
        mat[1, 1] = 1.0 - p0
        center = DensityMatrix(mat)
        closed = None
        upper = g4_bound(eps, p0) if dim == 4 and eps <= 0.5 else None
    estimate, std_error = mc_ball_volume(dim, eps, center, n_samples, seed)
    result = {
        "d": dim, "eps": eps, "p0": p0, "n_samples": n_samples,
        "estimate": estimate, "std_error": std_error,
        "closed_form": closed, "upper_bound": upper,
    }
    params = {"d": dim, "eps": eps, "n": n_samples, "p0": p0}
    _finish("volume", params, seed, result, out)


@cli.command("bounds")
@click.option("--d", "dim", type=int, required=True)
@click.option("--eps", type=float, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_bounds(dim, eps, out):
    """Covering-number and library-bit-length bounds with the
    probabilistic/deterministic ratio bracket."""
    _finish("bounds", {"d": dim, "eps": eps}, None,
            bounds_report(dim, eps).to_dict(), out)


@cli.command("measures")
@click.option("--measure", type=click.Choice(["werner", "isotropic",
                                              "coherence"]), required=True)
@click.option("--d", "dim", type=int, default=2, show_default=True)
@click.option("--q", default=None,
              help="Comma-separated family parameters (werner/isotropic).")
@click.option("--alpha", default=None,
              help="Comma-separated amplitudes (coherence); normalized.")
@click.option("--grid-n", type=int, default=201, show_default=True)
@click.option("--covering-eps", type=float, default=None,
              help="Factor-net radius for a product-covering upper bound "
                   "(werner/isotropic, d=2 only).")
@click.option("--seed", type=int, default=None,
              help="Required with --covering-eps.")
@click.option("--tol", type=float, default=1e-7, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_measures(measure, dim, q, alpha, grid_n, covering_eps, seed, tol,
                 out):
    """Distance-to-set brackets: witness-scan lower bounds, covering-mixture
    upper bounds, and the matching closed forms."""
    rows = []
    if measure in ("werner", "isotropic"):
        if q is None:
            raise PreconditionError(f"--measure {measure} requires --q")
        covering = None
        if covering_eps is not None:
            if dim != 2:
                raise PreconditionError(
                    "product coverings are built for d=2 only")
            if seed is None:
                raise PreconditionError("--covering-eps requires --seed")
            covering = product_net(covering_eps, seed)
        for qv in sorted(_floats(q)):
            if measure == "werner":
                bracket = werner_bracket(dim, qv, grid_n, covering, tol)
                closed = werner_distance(dim, qv)
            else:
                bracket = isotropic_bracket(dim, qv, grid_n, covering, tol)
                closed = isotropic_distance(dim, qv)
            rows.append({
                "measure": measure,
                "params": {"d": dim, "q": qv, "grid_n": grid_n,
                           "covering_eps": covering_eps},
                "lower": bracket.lower,
                "upper": bracket.upper,
                "closed_form": closed,
            })
    else:
        if alpha is None:
            raise PreconditionError("--measure coherence requires --alpha")
        vec = np.asarray(_floats(alpha), dtype=complex)
        vec = vec / np.linalg.norm(vec)
        sv = SchmidtVector(vec)
        lower = coherence_distance(sv, solver_tol=tol)
        rows.append({
            "measure": "coherence",
            "params": {"d": sv.d, "alpha": list(np.abs(vec).real)},
            "lower": lower,
            "upper": lower + tol,
            "closed_form": simplex_formula(sv),
        })
    params = {"measure": measure, "d": dim, "q": q, "alpha": alpha,
              "grid_n": grid_n, "covering_eps": covering_eps, "tol": tol}
    _finish("measures", params, seed, {"rows": rows}, out)


@cli.command("library")
@click.option("--max-t", type=int, default=10, show_default=True)
@click.option("--max-len", type=int, default=36, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_library(max_t, max_len, out):
    """Enumerate the exact gate-word library and save it as JSONL."""
    library = enumerate_library(max_t, max_len)
    library.save(out)
    result = {"entries": len(library), "max_t_count": library.max_t_count,
              "partial": library.partial, "path": out}
    manifest = RunManifest("library", {"max_t": max_t, "max_len": max_len},
                           None, [out])
    with open(out + ".manifest.json", "w") as fh:
        fh.write(canonical_json(manifest.to_dict()))
    click.echo(canonical_json(result), nl=False)


def main(argv=None):
    """Entry point mapping failures to documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 2
    except click.exceptions.ClickException as exc:
        exc.show()
        return 2
    except InsufficientLibraryError as exc:
        sys.stderr.write(canonical_json({
            "error": "insufficient-library",
            "message": str(exc),
            "best_error": exc.best_error,
        }))
        return 2
    except PreconditionError as exc:
        sys.stderr.write(canonical_json({
            "error": "precondition", "message": str(exc)}))
        return 2
    except SolverStallError as exc:
        payload = {"error": "solver-stall", "message": str(exc)}
        if exc.solution is not None:
            payload["bracket"] = [exc.solution.dual_value,
                                  exc.solution.primal_value]
        sys.stderr.write(canonical_json(payload))
        return 3
    except MixsynthError as exc:
        sys.stderr.write(canonical_json({
            "error": "internal", "message": str(exc)}))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
