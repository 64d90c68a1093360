"""Command-line surface: JSON job in, CSV/JSON artifacts out.

Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 property
violation (verify command).  Errors are emitted as machine-readable JSON on
standard error; outputs are written atomically (temp file + rename) and
floats printed with 17 significant digits for lossless round-trips.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .applications import (farkas_ritt_fixed_point, lindelof_region_comparison,
                           metric_ball_diameter, orbit_boundary_escape)
from .densities import (DiscValuedMaps, MetricKind, annulus_density,
                        caratheodory_density, density_bound)
from .domains import ApproachRegionParams, UnitDisc, domain_from_json
from .errors import InvMetricError, NumericError, PointOutsideDomainError
from .geodesy import (caratheodory_distance_lower, completeness_probe,
                      distance, poincare_disc_distance)
from .maps import (AffineMap, BlaschkeProduct, MobiusMap, Polynomial,
                   RationalMap, random_disc_self_map)
from .mobius import MobiusTransform

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_PROPERTY = 0, 1, 2, 3

_VALIDATION_ERRORS = (ValueError, KeyError, TypeError,
                      PointOutsideDomainError, json.JSONDecodeError)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _cplx(v) -> complex:
    """Accept a number or an [re, im] pair."""
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"expected a number or [re, im] pair, got {v!r}")


def _cplx_json(z: complex) -> list[float]:
    return [z.real, z.imag]


def map_from_json(obj: dict):
    kind = obj.get("type")
    if kind == "polynomial":
        return Polynomial([_cplx(c) for c in obj["coefficients"]])
    if kind == "blaschke":
        return BlaschkeProduct([_cplx(a) for a in obj["zeros"]],
                               float(obj.get("phase", 0.0)))
    if kind == "mobius":
        return MobiusMap(MobiusTransform(_cplx(obj.get("a", 0.0)),
                                         float(obj.get("theta", 0.0))))
    if kind == "rational":
        return RationalMap([_cplx(c) for c in obj["numerator"]],
                           [_cplx(c) for c in obj["denominator"]])
    if kind == "affine":
        return AffineMap(_cplx(obj.get("scale", 1.0)),
                         _cplx(obj.get("offset", 0.0)))
    raise ValueError(f"unknown map type {kind!r}")


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".invmetric-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            _fmt(v) if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _metric(job: dict) -> MetricKind:
    name = job.get("metric", "kobayashi").upper()
    try:
        return MetricKind[name]
    except KeyError:
        raise ValueError(f"unknown metric {job.get('metric')!r}") from None


# -- command handlers ---------------------------------------------------------


def _cmd_density(job, out, seed, tol):
    domain = domain_from_json(job["domain"])
    metric = _metric(job)
    xi = _cplx(job.get("xi", 1.0))
    rows = []
    for pv in job["points"]:
        z = _cplx(pv)
        b = density_bound(domain, metric, z, xi)
        rows.append([z.real, z.imag, xi.real, xi.imag,
                     b.lower, b.upper, int(b.exact)])
    _write_csv(os.path.join(out, "density.csv"),
               ["z_re", "z_im", "xi_re", "xi_im", "lower", "upper", "exact"],
               rows)
    return EXIT_OK


def _cmd_distance(job, out, seed, tol):
    domain = domain_from_json(job["domain"])
    metric = _metric(job)
    rows = []
    for zv, wv in job["pairs"]:
        z, w = _cplx(zv), _cplx(wv)
        r = distance(domain, metric, z, w)
        rows.append([z.real, z.imag, w.real, w.imag,
                     r.value, r.lower, r.upper, r.method])
    _write_csv(os.path.join(out, "distance.csv"),
               ["z_re", "z_im", "w_re", "w_im",
                "value", "lower", "upper", "method"], rows)
    return EXIT_OK


def _cmd_geodesic(job, out, seed, tol):
    domain = domain_from_json(job["domain"])
    metric = _metric(job)
    z, w = _cplx(job["z"]), _cplx(job["w"])
    r = distance(domain, metric, z, w)
    ts, pts = r.path.sample(8)
    _write_csv(os.path.join(out, "geodesic.csv"), ["t", "x", "y"],
               [[float(t), p.real, p.imag] for t, p in zip(ts, pts)])
    _write_json(os.path.join(out, "geodesic.json"), {
        "value": r.value, "lower": r.lower, "upper": r.upper,
        "method": r.method,
        "path": [_cplx_json(p) for p in pts]})
    return EXIT_OK


def _cmd_fixed_point(job, out, seed, tol):
    f = map_from_json(job["map"])
    rep = farkas_ritt_fixed_point(f, tol=tol if tol else 1e-12)
    # per-iteration trace, re-run from the primary start
    z, trace = 0j, []
    for n in range(rep.iterations):
        z = f(z)
        trace.append([n + 1, z.real, z.imag, abs(f(z) - z)])
    _write_csv(os.path.join(out, "fixed_point_trace.csv"),
               ["iteration", "z_re", "z_im", "residual"], trace)
    _write_json(os.path.join(out, "fixed_point.json"), {
        "point": _cplx_json(rep.point),
        "iterations": rep.iterations,
        "residual": rep.residual,
        "epsilon_margin": rep.epsilon_margin,
        "observed_contraction": rep.observed_contraction,
        "restart_points": [_cplx_json(p) for p in rep.restart_points],
        "restart_iterations": list(rep.restart_iterations)})
    return EXIT_OK


def _cmd_regions(job, out, seed, tol):
    domain = domain_from_json(job.get("domain", {"type": "disc"}))
    p = _cplx(job.get("p", 1.0))
    params = ApproachRegionParams(
        float(job.get("alpha", 2.0)), float(job.get("beta", 2.0)),
        float(job.get("r0", 0.5)))
    rep = lindelof_region_comparison(
        domain, p, params, n_samples=int(job.get("n_samples", 400)), seed=seed)
    _write_json(os.path.join(out, "regions.json"), {
        "alphas": list(rep.alphas), "betas": list(rep.betas),
        "n_samples": rep.n_samples,
        "gamma_counts": list(rep.gamma_counts),
        "m_counts": list(rep.m_counts),
        "gamma_in_m_ratio": [list(r) for r in rep.gamma_in_m_ratio],
        "m_in_gamma_ratio": [list(r) for r in rep.m_in_gamma_ratio],
        "beta_for_alpha": list(rep.beta_for_alpha),
        "alpha_for_beta": list(rep.alpha_for_beta)})
    return EXIT_OK


def _cmd_orbit(job, out, seed, tol):
    domain = domain_from_json(job.get("domain", {"type": "disc"}))
    phis = [MobiusTransform(_cplx(o.get("a", 0.0)), float(o.get("theta", 0.0)))
            for o in job["automorphisms"]]
    P = _cplx(job.get("P", 0.0))
    kspec = job.get("K", {"radius": 0.5, "n": 64})
    rad, n = float(kspec["radius"]), int(kspec.get("n", 64))
    ang = np.exp(2j * math.pi * np.arange(n) / n)
    K = np.concatenate([rad * ang, 0.5 * rad * ang, [0.0]])
    V = (_cplx(job["V"]["center"]), float(job["V"]["radius"]))
    rep = orbit_boundary_escape(domain, phis, P, K, V)
    _write_csv(os.path.join(out, "orbit.csv"),
               ["j", "image_diameter", "contained"],
               [[j, d, int(c)] for j, d, c in rep.steps])
    _write_json(os.path.join(out, "orbit.json"), {
        "escape_index": rep.escape_index,
        "steps": [[j, d, bool(c)] for j, d, c in rep.steps]})
    return EXIT_OK


def _cmd_balls(job, out, seed, tol):
    domain = domain_from_json(job.get("domain", {"type": "disc"}))
    metric = _metric(job)
    radius = float(job.get("radius", 1.0))
    nd = int(job.get("n_directions", 64))
    rows = []
    for cv in job["centers"]:
        c = _cplx(cv)
        rows.append([c.real, c.imag,
                     metric_ball_diameter(domain, c, radius, nd, metric)])
    _write_csv(os.path.join(out, "balls.csv"),
               ["center_re", "center_im", "euclidean_diameter"], rows)
    return EXIT_OK


def _cmd_completeness(job, out, seed, tol):
    domain = domain_from_json(job["domain"])
    metric = _metric(job)
    z0 = _cplx(job.get("z0", 0.0))
    target = _cplx(job["boundary_target"])
    eps = [float(e) for e in job.get("epsilons",
                                     [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    table = completeness_probe(domain, metric, z0, target, eps,
                               side=job.get("side", "lower"))
    _write_csv(os.path.join(out, "completeness.csv"), ["epsilon", "length"],
               [[e, v] for e, v in table])
    return EXIT_OK


def _cmd_annulus_gap(job, out, seed, tol):
    r = float(job.get("r_inner", 0.2))
    n = int(job.get("n_samples", 64))
    from .domains import Annulus
    domain = Annulus(r)
    rows = []
    all_positive = True
    for k in range(n):
        z = math.sqrt(r) * np.exp(2j * math.pi * k / n)
        kob = annulus_density(r, z)
        car = caratheodory_density(domain, z, 1.0).lower
        gap = kob - car
        all_positive &= gap > 0.0
        rows.append([z.real, z.imag, kob, car, gap])
    _write_csv(os.path.join(out, "annulus_gap.csv"),
               ["z_re", "z_im", "kobayashi_exact",
                "caratheodory_lower", "gap"], rows)
    _write_json(os.path.join(out, "annulus_gap.json"),
                {"r_inner": r, "n_samples": n,
                 "gap_positive_everywhere": bool(all_positive)})
    return EXIT_OK


def _cmd_verify(job, out, seed, tol):
    """Seeded randomized property suites; exit 3 on any violation."""
    rng = np.random.default_rng(seed)
    disc = UnitDisc()
    failures = []
    report = {"seed": seed}

    # triangle inequality for the closed-form disc distance
    worst = 0.0
    for _ in range(200):
        a, b, c = (_rand_disc(rng, 0.97) for _ in range(3))
        slack = (poincare_disc_distance(a, b) + poincare_disc_distance(b, c)
                 - poincare_disc_distance(a, c))
        worst = min(worst, slack)
    report["triangle_min_slack"] = worst
    if worst < -1e-12:
        failures.append("triangle")

    # distance-decreasing under random disc self-maps
    worst = 0.0
    for _ in range(200):
        f = random_disc_self_map(rng)
        z, w = _rand_disc(rng, 0.95), _rand_disc(rng, 0.95)
        worst = max(worst, poincare_disc_distance(f(z), f(w))
                    - poincare_disc_distance(z, w))
    report["distance_decreasing_max_excess"] = worst
    if worst > 1e-9:
        failures.append("distance-decreasing")

    # conformal invariance under random disc automorphisms
    worst = 0.0
    for _ in range(200):
        m = MobiusTransform(_rand_disc(rng, 0.9), rng.uniform(0, 2 * math.pi))
        z, w = _rand_disc(rng, 0.95), _rand_disc(rng, 0.95)
        worst = max(worst, abs(poincare_disc_distance(m.apply(z), m.apply(w))
                               - poincare_disc_distance(z, w)))
    report["conformal_invariance_max_error"] = worst
    if worst > 1e-12:
        failures.append("conformal-invariance")

    report["failures"] = failures
    report["passed"] = not failures
    _write_json(os.path.join(out, "verify.json"), report)
    return EXIT_OK if not failures else EXIT_PROPERTY


def _rand_disc(rng, radius: float) -> complex:
    r = radius * math.sqrt(rng.uniform())
    t = rng.uniform(0.0, 2.0 * math.pi)
    return r * complex(math.cos(t), math.sin(t))


_COMMANDS = {
    "density": _cmd_density,
    "distance": _cmd_distance,
    "geodesic": _cmd_geodesic,
    "fixed-point": _cmd_fixed_point,
    "regions": _cmd_regions,
    "orbit": _cmd_orbit,
    "balls": _cmd_balls,
    "completeness": _cmd_completeness,
    "annulus-gap": _cmd_annulus_gap,
    "verify": _cmd_verify,
}


def _error_json(exc: BaseException, code: int) -> str:
    return json.dumps({"error": type(exc).__name__,
                       "message": str(exc), "exit_code": code})


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="invmetric",
        description="Invariant metrics of planar domains: densities, "
                    "distances, geodesics, and applications.")
    parser.add_argument("--job", required=True, help="JSON job file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized suites")
    parser.add_argument("--tol", type=float, default=None,
                        help="tolerance override where applicable")
    args = parser.parse_args(argv)

    try:
        with open(args.job) as fh:
            job = json.load(fh)
        command = job.get("command")
        handler = _COMMANDS.get(command)
        if handler is None:
            raise ValueError(f"unknown command {command!r}")
        seed = int(job.get("seed", args.seed))
        return handler(job, args.out, seed, args.tol)
    except PointOutsideDomainError as exc:
        print(_error_json(exc, EXIT_VALIDATION), file=sys.stderr)
        return EXIT_VALIDATION
    except _VALIDATION_ERRORS as exc:
        if isinstance(exc, InvMetricError):
            print(_error_json(exc, EXIT_NUMERIC), file=sys.stderr)
            return EXIT_NUMERIC
        print(_error_json(exc, EXIT_VALIDATION), file=sys.stderr)
        return EXIT_VALIDATION
    except (InvMetricError, ArithmeticError) as exc:
        print(_error_json(exc, EXIT_NUMERIC), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
