"""Command-line front end: sweep, resonance, transform, verify, lift.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import config
from .darboux import (
    check_gauge,
    closed_transforms,
    parallel_section,
    random_lightlike,
    transform_pcq,
)
from .errors import GeometryError
from .integrators import DEFAULT_SCHEME, MIN_STEPS, SCHEMES
from .minkowski import inner
from .monodromy import (
    DEFAULT_STEPS,
    TOL_RES,
    default_window,
    find_cover_resonance,
    find_resonance,
    monodromy,
    sweep,
)
from .polarised import (
    ARC_LENGTH,
    NEG_ARC_LENGTH,
    TOL_PCQ,
    candidate_linear_cq,
    grid,
    linear_cq,
    verify_pcq,
)
from .space_forms import project_many

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


def fmt(x):
    return "%.17g" % x


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v

    return conv


def _steps(text):
    v = int(text)
    if v < MIN_STEPS:
        raise argparse.ArgumentTypeError(f"must be >= {MIN_STEPS}")
    return v


def _grid(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("must be >= 2")
    return v


def build_parser():
    ap = _Parser(prog="darboux-monodromy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--curve", required=True, help="curve definition JSON")
        p.add_argument("--steps", type=_steps, default=None, help=f"integrator steps (default {DEFAULT_STEPS})")
        p.add_argument("--scheme", choices=SCHEMES, default=None, help=f"integrator (default {DEFAULT_SCHEME})")
        p.add_argument("--tol-res", type=_positive(float), default=None,
                       help=f"resonance tolerance relative to ||M||_F (default {TOL_RES:g})")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    def window(p):
        p.add_argument("--mu-min", type=float, default=None)
        p.add_argument("--mu-max", type=float, default=None)
        p.add_argument("--grid", type=_grid, default=None, help="number of mu grid points (default 1500)")

    p = sub.add_parser("sweep", help="monodromy over a mu grid (CSV)")
    common(p)
    window(p)
    p = sub.add_parser("resonance", help="resonance points (JSON)")
    common(p)
    window(p)
    p.add_argument("--lmax", type=_positive(int), default=None, help="largest cover to search (default 1)")
    p = sub.add_parser("transform", help="Darboux transforms at one mu (CSV)")
    common(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--seeds", type=_positive(int), default=None, help="number of random lightlike seeds (default 3)")
    p.add_argument("--eigen", action="store_true", help="use the two monodromy null eigenlines as seeds")
    p = sub.add_parser("verify", help="invariant suite (JSON report)")
    common(p)
    p.add_argument("--mu", type=float, nargs="+", default=None, help="spectral parameters to test")
    p.add_argument("--lcq", action="store_true", help="test q + tX even for explicit polarisations")
    p = sub.add_parser("lift", help="lift and projection table (CSV)")
    common(p)
    p.add_argument("--grid", type=_grid, default=None, help="number of samples (default 64)")
    return ap


def _param(args, run, name, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return run.get(name, default)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def cmd_sweep(curve, args, run):
    sw = _sweep(curve, args, run)
    rows = []
    for r, th in zip(sw.results, sw.theta_unwrapped):
        rows.append([r.mu, r.trace, r.defect, r.branch, th, np.cos(th), np.sin(th)])
    return _csv(["mu", "trace", "defect", "branch", "theta_unwrapped", "re_lambda", "im_lambda"], rows)


def _sweep(curve, args, run):
    mu_min = _param(args, run, "mu_min", None)
    mu_max = _param(args, run, "mu_max", None)
    mu_min, mu_max = default_window(curve, mu_max, mu_min)
    return sweep(curve, mu_min, mu_max, int(_param(args, run, "grid", 1500)),
                 int(_param(args, run, "steps", DEFAULT_STEPS)),
                 _param(args, run, "scheme", DEFAULT_SCHEME),
                 float(_param(args, run, "tol_res", TOL_RES)), eigen=False)


def cmd_resonance(curve, args, run):
    sw = _sweep(curve, args, run)
    lmax = int(_param(args, run, "lmax", 1))
    pts = find_resonance(sw)
    if lmax >= 2:
        pts += find_cover_resonance(sw, lmax)
    pts.sort(key=lambda r: (r.mu_star, r.cover))
    return json.dumps([p.as_dict() for p in pts], indent=2) + "\n"


def cmd_transform(curve, args, run):
    steps = int(_param(args, run, "steps", DEFAULT_STEPS))
    scheme = _param(args, run, "scheme", DEFAULT_SCHEME)
    mu = float(args.mu)
    if args.eigen:
        mono = monodromy(curve, mu, steps, scheme, float(_param(args, run, "tol_res", TOL_RES)))
        transforms = closed_transforms(curve, mono, steps, scheme)
    else:
        rng = np.random.default_rng(int(_param(args, run, "seed", 0)))
        seeds = random_lightlike(rng, int(_param(args, run, "seeds", 3)))
        transforms = [parallel_section(curve, mu, X0, steps, scheme) for X0 in seeds]
    rows = []
    for i, t in enumerate(transforms):
        for k in range(t.s.size):
            x = t.points[k]
            rows.append([i, t.s[k], x[0], x[1], int(t.at_infinity[k]), *t.Xhat[k], t.closure_residual])
    header = ["seed_index", "s", "x1", "x2", "at_infinity", "X0", "X1", "X2", "X3", "closure_residual"]
    return _csv(header, rows)


def cmd_lift(curve, args, run):
    n = int(_param(args, run, "grid", 64))
    s = grid(curve.period, n)
    x, _ = curve.path(s)
    X, Xp = curve.lift(s)
    pts, _ = project_many(X, curve.space_form)
    rows = []
    for k in range(n):
        rows.append([s[k], x[k, 0], x[k, 1], *X[k], *Xp[k], inner(X[k], curve.q), inner(Xp[k], Xp[k]),
                     pts[k, 0], pts[k, 1]])
    header = ["s", "x1", "x2", "X0", "X1", "X2", "X3", "Xp0", "Xp1", "Xp2", "Xp3",
              "inner_X_q", "inner_Xp_Xp", "proj_x1", "proj_x2"]
    return _csv(header, rows)


def _default_mus(curve):
    k = curve.kappa
    if curve.polarisation == NEG_ARC_LENGTH:
        return [k / 2 - 0.5, k / 2 - 1.0, k / 2 - 2.0]
    if curve.polarisation == ARC_LENGTH:
        return [-k / 2 + 0.5, -k / 2 + 1.0, -k / 2 + 2.0]
    return [0.5, 1.0, 2.0]


def run_checks(curve, mus, steps, scheme, seed=0, lcq=False, samples=1024):
    """The invariant suite behind ``verify``; returns a list of check dicts."""
    checks = []

    def add(name, value, tol):
        checks.append({"name": name, "max_residual": float(value), "tolerance": tol, "pass": bool(value <= tol)})

    s = grid(curve.period, samples)
    X, Xp = curve.lift(s)
    add("lift_normalisation", np.max(np.abs(inner(X, curve.q) + 1.0)), 1e-12)
    add("lift_null", np.max(np.abs(inner(X, X))) + np.max(np.abs(inner(X, Xp))), 1e-10)
    arc = curve.polarisation in (ARC_LENGTH, NEG_ARC_LENGTH)
    if arc or lcq:
        sign = -1.0 if curve.polarisation == NEG_ARC_LENGTH else 1.0
        p = linear_cq(curve, samples) if arc else candidate_linear_cq(curve, samples, sign)
        add("linear_cq", verify_pcq(curve, p).max_residual, TOL_PCQ)
    rng = np.random.default_rng(seed)
    X0, _ = curve.lift(np.array(0.0))
    for mu in mus:
        mono = monodromy(curve, mu, steps, scheme, eigen=False)
        add(f"defect[mu={mu:g}]", mono.defect, 1e-8)
        if arc:
            sign = -1.0 if curve.polarisation == NEG_ARC_LENGTH else 1.0
            p0 = curve.q + sign * mu * X0
            add(f"fixed_vector[mu={mu:g}]", np.linalg.norm(mono.M @ p0 - p0), 1e-8)
            pl = linear_cq(curve, samples)(mu)
            add(f"timelike_norm[mu={mu:g}]", np.max(np.abs(inner(pl, pl) + curve.kappa + 2 * sign * mu)), 1e-9)
            ev = np.linalg.eigvals(mono.M)
            add(f"unit_modulus[mu={mu:g}]", np.max(np.abs(np.abs(ev) - 1.0)), 1e-6)
        seeds = random_lightlike(rng, 2)
        t1, t2 = (parallel_section(curve, mu, x, steps, scheme) for x in seeds)
        pair = inner(t1.Xhat, t2.Xhat)
        add(f"pairing_constancy[mu={mu:g}]", np.max(np.abs(pair - pair[0])) / max(1.0, abs(pair[0])), 1e-8)
        if mono.branch in ("UNIT_CIRCLE", "REAL_PAIR", "IDENTITY"):
            transforms = closed_transforms(curve, mono, steps, scheme)
            add(f"closed_transforms[mu={mu:g}]", max(t.closure_residual for t in transforms), 1e-6)
            best = max(transforms, key=_conditioning)
            g = check_gauge(curve, best, mu, [0.0, 0.37 * mu], seed=seed)
            add(f"gauge[mu={mu:g}]", max(e.max_discrepancy for e in g), 1e-5)
            if arc:
                sg, per = best.grid()
                p = linear_cq(curve, s=sg)
                p.periodic = per
                ph = transform_pcq(p, mu, best.splitting(sg), best.splitting_derivatives(sg))
                keep = best.immersed()[best._index(sg)]
                add(f"transform_pcq[mu={mu:g}]", verify_pcq(best, ph, mask=keep).max_residual, 1e-6)
    return checks


def _conditioning(t):
    """Smallest normalised pairing between a transform and its curve."""
    X, _ = t.curve.lift(t.s)
    pr = np.abs(inner(X, t.Xhat)) / (np.linalg.norm(X, axis=1) * np.linalg.norm(t.Xhat, axis=1))
    return float(np.min(pr))


def cmd_verify(curve, args, run, raw):
    mus = _param(args, run, "mu", None) or _default_mus(curve)
    checks = run_checks(curve, [float(m) for m in mus], int(_param(args, run, "steps", DEFAULT_STEPS)),
                        _param(args, run, "scheme", DEFAULT_SCHEME), int(_param(args, run, "seed", 0)),
                        lcq=args.lcq)
    report = {"checks": checks, "config_echo": raw}
    failed = [c["name"] for c in checks if not c["pass"]]
    return json.dumps(report, indent=2) + "\n", failed


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        curve, raw = config.load(args.curve)
    except (config.ConfigError, GeometryError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run = raw.get("run", {}) if isinstance(raw, dict) else {}
    try:
        if args.command == "verify":
            text, failed = cmd_verify(curve, args, run, raw)
            _emit(text, args.out)
            if failed:
                print("failed checks: " + ", ".join(failed), file=sys.stderr)
                return EXIT_NUMERIC
            return EXIT_OK
        handler = {"sweep": cmd_sweep, "resonance": cmd_resonance, "transform": cmd_transform,
                   "lift": cmd_lift}[args.command]
        _emit(handler(curve, args, run), args.out)
    except GeometryError as exc:
        print(f"numeric failure {exc.code}: {exc} {exc.details or ''}".rstrip(), file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
