"""Command-line front end: ``hemipwi <command> [options]``.

Every command writes a JSON sidecar next to its outputs holding the full
configuration, so ``hemipwi rerun <sidecar>`` reproduces the run exactly.
"""

import argparse
import json
import sys
import warnings

import numpy as np

from . import coverage, density, io, oracles, returnplot
from .pwi import Protocol
from .sphere import normalize

DEFAULTS = {"eps": 1e-3, "delta": 1e-6, "iters": 20000, "grid": 1024, "bins": 1000,
            "seeds_per_bin": 10, "seeds": 2000, "workers": 1}

# rough step budget past which a run is flagged as slow
LONG_RUN_STEPS = 5e10


class ConfigError(ValueError):
    pass


def _protocol(cfg):
    try:
        return Protocol.from_degrees(cfg["alpha"], cfg["beta"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _warn_if_long(steps):
    if steps > LONG_RUN_STEPS:
        print(f"warning: about {steps:.1e} map steps, this will take a long time", file=sys.stderr)


def _check_eps(cfg):
    if cfg["eps"] <= 0:
        raise ConfigError("--eps must be positive")
    if cfg.get("delta") is not None and not 0 < cfg["delta"] < cfg["eps"]:
        raise ConfigError("--delta must satisfy 0 < delta < eps")
    if cfg["iters"] < 0:
        raise ConfigError("--iters must be non-negative")


def cmd_render(cfg):
    prot = _protocol(cfg)
    _check_eps(cfg)
    _warn_if_long(0.79 * cfg["grid"] ** 2 * (cfg["iters"] + 1))
    img, grid = density.render_exceptional_set(prot, cfg["eps"], cfg["iters"], cfg["grid"],
                                               cfg["workers"])
    out = cfg["out"]
    io.write_ppm(out + ".ppm", img)
    io.write_grid(out + ".grid", grid)
    screen = density.ergodicity_screen(grid)
    results = {"defined_pixels": int(grid.defined.sum()),
               "invalid_pixels": grid.n_invalid_in_disk, **screen}
    return results, {"image": out + ".ppm", "grid": out + ".grid"}


def cmd_mix(cfg):
    prot = _protocol(cfg)
    pattern = density.pattern_from_expression(cfg["pattern"]) if cfg.get("pattern") else None
    img, valid = density.advect_pattern(prot, cfg["iters"], pattern, cfg["grid"], cfg["workers"])
    out = cfg["out"]
    io.write_ppm(out + ".ppm", img)
    _, inside = density.pixel_centers(cfg["grid"])
    return {"invalid_pixels": int(np.count_nonzero(inside & ~valid))}, {"image": out + ".ppm"}


def cmd_returnplot(cfg):
    prot = _protocol(cfg)
    _check_eps(cfg)
    _warn_if_long(cfg["bins"] * cfg["seeds_per_bin"] * (cfg["iters"] + 1))
    h = returnplot.build(prot, cfg["eps"], cfg["delta"], cfg["bins"], cfg["seeds_per_bin"],
                         cfg["iters"], cfg["workers"], cfg.get("jitter_seed"))
    out = cfg["out"]
    io.write_histogram_csv(out + ".csv", h.counts)
    io.write_ppm(out + ".ppm", returnplot.log_render(h))
    results = {"T": h.T, "delta_theta": h.delta_theta, "empty_fraction": returnplot.empty_fraction(h),
               "substituted_seeds": h.substituted, "dropped_seeds": h.dropped}
    return results, {"histogram": out + ".csv", "image": out + ".ppm"}


def cmd_coverage(cfg):
    prot = _protocol(cfg)
    _check_eps(cfg)
    results = {}
    if cfg["method"] in ("direct", "both"):
        d = coverage.phi_direct(prot, cfg["eps"], cfg["iters"], cfg["grid"], cfg["workers"])
        results["phi_direct"] = d.phi
        results["invalid_pixels"] = d.dropped
    if cfg["method"] in ("density", "both"):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            s = coverage.phi_density(prot, cfg["eps"], cfg["delta"], cfg["iters"], cfg["seeds"],
                                     cfg["workers"], cfg.get("jitter_seed"))
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        results["phi_density"] = s.phi
        results["substituted_seeds"] = s.substituted
        results["dropped_seeds"] = s.dropped
    if "phi_direct" in results and "phi_density" in results:
        results["abs_diff"] = abs(results["phi_direct"] - results["phi_density"])
    print(json.dumps(results))
    return results, {}


def cmd_sweep(cfg):
    _check_eps(cfg)
    if cfg.get("alphas"):
        alphas, betas = cfg["alphas"], cfg["betas"] or cfg["alphas"]
    else:
        alphas = betas = coverage.coarse_grid(cfg["coarse"]).tolist()
    for v in list(alphas) + list(betas):
        if not 0 <= v <= 180:
            raise ConfigError("sweep angles must lie in [0, 180] degrees")
    rows = coverage.sweep(alphas, betas, cfg["eps"], cfg["iters"], cfg["delta"], cfg["seeds"],
                          cfg["grid"], cfg["workers"])
    out = cfg["out"]
    coverage.write_sweep_csv(out + ".csv", rows)
    errors = [r for r in rows if "error" in r]
    results = {"rows": len(rows), "failed": len(errors),
               "errors": [{k: r[k] for k in ("alpha_deg", "beta_deg", "error")} for r in errors]}
    return results, {"table": out + ".csv"}


def oracle_report(phi, rational, eps, n_iter, heights=100):
    """Run the single-axis checks and return a list of ``(name, passed, value)``."""
    p = oracles.SingleAxisProtocol.from_fraction(*rational) if rational else \
        oracles.SingleAxisProtocol.irrational(phi)
    prot = Protocol(float(np.mod(p.phi, np.pi)), 0.0)
    z = np.linspace(-0.9, 0.9, heights)
    r = np.sqrt(1.0 - z**2)
    s = coverage.phi_density(prot, eps, min(1e-6, eps / 10), n_iter, 200)
    if p.is_rational:
        q = p.rational[1]
        # seeds just inside the line come back to it once per period of q steps
        pts = normalize(np.stack([r, np.full_like(z, -1e-9), z], axis=-1))
        _, n2, status = density.count_returns(pts, prot, eps, n_iter)
        err = float(np.max(np.abs(n2 / (n_iter + 1) - 1.0 / q)))
        return [("no boundary hits", bool(np.all(status == 0)), int(np.count_nonzero(status))),
                (f"seed density = 1/{q}", err <= 1.0 / (n_iter + 1) + 1e-12, err),
                ("density coverage = eps*q within 10%", abs(s.phi - eps * q) <= 0.1 * eps * q, s.phi),
                ("limiting coverage 0", oracles.analytic_phi(p) == 0.0, oracles.analytic_phi(p))]
    # deepest point of each height circle; never lands on the line for irrational turns
    pts = np.stack([np.zeros_like(z), -r, z], axis=-1)
    _, n2, status = density.count_returns(pts, prot, eps, n_iter)
    rel = np.abs(n2 / (n_iter + 1) / oracles.analytic_rho(z, eps) - 1.0)
    return [("no boundary hits", bool(np.all(status == 0)), int(np.count_nonzero(status))),
            ("density = 2 eps / l(z) within 5%", bool(np.all(rel <= 0.05)), float(rel.max())),
            ("density coverage = 1 within 0.05", abs(s.phi - 1.0) <= 0.05, s.phi),
            ("limiting coverage 1", oracles.analytic_phi(p) == 1.0, oracles.analytic_phi(p))]


def cmd_oracle_check(cfg):
    if cfg.get("phi_rat"):
        checks = oracle_report(None, tuple(cfg["phi_rat"]), cfg["eps"], cfg["iters"])
    else:
        checks = oracle_report(cfg["phi_rad"], None, cfg["eps"], cfg["iters"])
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    results = {"checks": [{"name": n, "passed": bool(ok), "value": d} for n, ok, d in checks]}
    results["all_passed"] = all(ok for _, ok, _ in checks)
    return results, {}


COMMANDS = {"render": cmd_render, "mix": cmd_mix, "returnplot": cmd_returnplot,
            "coverage": cmd_coverage, "sweep": cmd_sweep, "oracle-check": cmd_oracle_check}


def _add_common(p, protocol=True):
    if protocol:
        p.add_argument("--alpha", type=float, required=True, help="first rotation, degrees")
        p.add_argument("--beta", type=float, required=True, help="second rotation, degrees")
    p.add_argument("--eps", type=float, default=DEFAULTS["eps"])
    p.add_argument("--delta", type=float, default=DEFAULTS["delta"])
    p.add_argument("--iters", type=int, default=DEFAULTS["iters"])
    p.add_argument("--workers", type=int, default=DEFAULTS["workers"])
    p.add_argument("--out", default="hemipwi_out", help="output path prefix")


def build_parser():
    ap = argparse.ArgumentParser(prog="hemipwi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="colour the approximate exceptional set")
    _add_common(p)
    p.add_argument("--grid", type=int, default=DEFAULTS["grid"])

    p = sub.add_parser("mix", help="advect a scalar pattern")
    _add_common(p)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--pattern", help="expression in x, y, z, phi and np")

    p = sub.add_parser("returnplot", help="binned return histogram")
    _add_common(p)
    p.add_argument("--bins", type=int, default=DEFAULTS["bins"])
    p.add_argument("--seeds-per-bin", type=int, default=DEFAULTS["seeds_per_bin"])
    p.add_argument("--jitter-seed", type=int)

    p = sub.add_parser("coverage", help="area fraction of the exceptional set")
    _add_common(p)
    p.add_argument("--method", choices=["direct", "density", "both"], default="both")
    p.add_argument("--grid", type=int, default=DEFAULTS["grid"])
    p.add_argument("--seeds", type=int, default=DEFAULTS["seeds"])
    p.add_argument("--jitter-seed", type=int)

    p = sub.add_parser("sweep", help="coverage over a grid of protocols")
    _add_common(p, protocol=False)
    p.add_argument("--coarse", type=int, default=5, help="n x n grid over [30, 150] degrees")
    p.add_argument("--alphas", type=float, nargs="+")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--seeds", type=int, default=DEFAULTS["seeds"])

    p = sub.add_parser("oracle-check", help="compare single-axis runs with closed forms")
    _add_common(p, protocol=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi-rad", type=float, help="irrational rotation angle in radians")
    g.add_argument("--phi-rat", type=int, nargs=2, metavar=("P", "Q"), help="angle p*pi/q")
    p.set_defaults(iters=100000)

    p = sub.add_parser("rerun", help="repeat a run from its JSON sidecar")
    p.add_argument("sidecar")
    p.add_argument("--out", help="new output prefix (default: the recorded one)")
    return ap


def execute(command, cfg):
    results, outputs = COMMANDS[command](cfg)
    sidecar = cfg["out"] + ".json"
    io.write_sidecar(sidecar, command, cfg, results, outputs)
    return results


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            doc = io.read_sidecar(args.sidecar)
            cfg = doc["config"]
            if args.out:
                cfg["out"] = args.out
            command = doc["command"]
        else:
            cfg = {k: v for k, v in vars(args).items() if k != "command"}
            command = args.command
        results = execute(command, cfg)
    except (ConfigError, ValueError) as exc:
        return _fail("invalid_config", exc, 2)
    except OSError as exc:
        return _fail("io_error", exc, 3)
    except Exception as exc:  # noqa: BLE001 - reported as machine-readable JSON
        return _fail("internal_error", exc, 1)
    if command == "oracle-check" and not results["all_passed"]:
        return 1
    return 0


def _fail(kind, exc, code):
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
