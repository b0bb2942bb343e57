"""Batch command-line front-end.

Subcommands: spectrum | sandwich | capacity | squeeze | metric |
smoothing-audit.  Every run resolves to a flat parameter map (defaults,
then config file, then explicit flags), which is embedded verbatim in
the output together with the package version; identical resolved
configs produce byte-identical output.

Exit codes: 0 success, 2 invalid parameters or parse failure, 3 scan
budget exhausted (partial result still written), 4 audit failure.
"""
import argparse
import sys
from typing import Optional

import numpy as np

from . import __version__
from .capacity import (candidate_pool, capacity_hyperboloid,
                       capacity_of_hamiltonian, nonsqueezing_verdict)
from .contact import ContactIsotopy, SupportMeta
from .domains import (Hyperboloid, IntegrableDomain, StarDomain,
                      build_smoothed_well, containment_audit, sandwich_solve)
from .errors import AuditError, DomainError, ParseError, ScanBudgetError
from .exprs import hamiltonian_from_expression, random_hamiltonian
from .growth import dw_bound_check, equivalence_and_order, random_family, scaling_family
from .jsonio import dumps_json, fmt_float, load_config, merge_config, write_csv
from .orbits import characteristic_spectrum
from . import sampling
from .smoothing import smoothed_symplectization, symplectize_ambient, symplecticity_defect

_DEFAULTS = {
    "spectrum": {"n": 2, "k": 1, "a": 1.0, "b": 1.0, "C": 3.0, "top": 10.0,
                 "eps": None, "labels": 1000, "budget": None, "csv": None,
                 "seed": 0},
    "sandwich": {"expr": None, "n": 2, "k": 1, "M": None, "m": None,
                 "rho0": None, "rho1": None, "samples": 100_000, "seed": 0},
    "capacity": {"hyperboloid": False, "expr": None, "n": 2, "k": 1,
                 "a": 1.0, "b": 1.0, "seed": 0},
    "squeeze": {"n": 2, "k": 1, "a": 1.0, "b": 1.0, "s": 1.5,
                "candidates": 5, "samples": 10_000, "eps": 0.05, "seed": 0},
    "metric": {"family": "scaling", "s": 2.0, "count": 5, "n": 2, "k": 1,
               "grid": 10_000, "pool": 8, "seed": 0},
    "smoothing-audit": {"n": 2, "k": 1, "eps": 0.05, "points": 1000,
                        "amplitude": 0.1, "seed": 0},
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="symcone",
        description="deterministic batch computations on cone geometry")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (same keys as flags)")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int)

    sp = sub.add_parser("spectrum", help="closed-characteristic actions")
    common(sp)
    for name, typ in (("n", int), ("k", int), ("a", float), ("b", float),
                      ("C", float), ("top", float), ("eps", float),
                      ("labels", int), ("budget", int)):
        sp.add_argument(f"--{name}", type=typ)
    sp.add_argument("--csv", help="also write the spectrum table to this path")

    sp = sub.add_parser("sandwich", help="hyperboloid sandwich certificate")
    common(sp)
    sp.add_argument("--expr")
    for name, typ in (("n", int), ("k", int), ("M", float), ("m", float),
                      ("rho0", float), ("rho1", float), ("samples", int)):
        sp.add_argument(f"--{name}", type=typ)

    sp = sub.add_parser("capacity", help="capacity value or enclosure")
    common(sp)
    sp.add_argument("--hyperboloid", action="store_true", default=None)
    sp.add_argument("--expr")
    for name, typ in (("n", int), ("k", int), ("a", float), ("b", float)):
        sp.add_argument(f"--{name}", type=typ)

    sp = sub.add_parser("squeeze", help="non-squeezing sweep")
    common(sp)
    for name, typ in (("n", int), ("k", int), ("a", float), ("b", float),
                      ("s", float), ("candidates", int), ("samples", int),
                      ("eps", float)):
        sp.add_argument(f"--{name}", type=typ)

    sp = sub.add_parser("metric", help="pseudo-metric on a family")
    common(sp)
    sp.add_argument("--family", choices=["scaling", "random"])
    for name, typ in (("s", float), ("count", int), ("n", int), ("k", int),
                      ("grid", int), ("pool", int)):
        sp.add_argument(f"--{name}", type=typ)

    sp = sub.add_parser("smoothing-audit", help="smoothed symplectization checks")
    common(sp)
    for name, typ in (("n", int), ("k", int), ("eps", float), ("points", int),
                      ("amplitude", float)):
        sp.add_argument(f"--{name}", type=typ)
    return p


def _resolve(args: argparse.Namespace) -> dict:
    cmd = args.command
    defaults = _DEFAULTS[cmd]
    cfg = load_config(args.config) if args.config else {}
    overrides = {k: getattr(args, k.replace("-", "_"))
                 for k in defaults if hasattr(args, k.replace("-", "_"))}
    params = merge_config(defaults, cfg, overrides, known=list(defaults))
    params["command"] = cmd
    return params


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(params: dict, result) -> str:
    return dumps_json({"config": params, "version": __version__,
                       "result": result})


def _spectrum_result(spec) -> dict:
    return {
        "group_i": list(spec.group_i),
        "group_ii_min_bound": spec.group_ii_min_bound,
        "window_top": spec.window_top,
        "scan_min_floor": spec.scan_min_floor,
        "labels_scanned": spec.labels_scanned,
        "scan_confirms_bound": spec.scan_confirms_bound,
        "partial": spec.partial,
    }


def _spectrum_csv(spec, params: dict) -> str:
    import io

    rows = []
    for i, act in enumerate(spec.group_i, start=1):
        rows.append(("i", str(i), act, "exact"))
    for label, floor in spec.scan_entries:
        e = label.c[label.n - label.k]
        flag = "ok" if floor >= spec.group_ii_min_bound * (1 - 1e-3) else "below"
        rows.append(("ii", fmt_float(e), floor, flag))
    buf = io.StringIO()
    write_csv(buf, ("group", "index_or_label", "action", "bound_flag"), rows,
              preamble=[f"version: {__version__}",
                        "config: " + " ".join(
                            f"{k}={params[k]}" for k in sorted(params))])
    return buf.getvalue()


def cmd_spectrum(params: dict) -> int:
    eps = params["eps"] if params["eps"] is not None else params["C"] / 12.0
    well = build_smoothed_well(params["C"], eps)
    D = IntegrableDomain(n=params["n"], k=params["k"], a=params["a"],
                         b=params["b"], well=well)
    try:
        spec = characteristic_spectrum(D, params["top"],
                                       scan_labels=params["labels"],
                                       budget=params["budget"])
    except ScanBudgetError as exc:
        spec = exc.partial
        text = _envelope(params, _spectrum_result(spec))
        _emit(text, params.get("out"))
        if params["csv"]:
            _emit(_spectrum_csv(spec, params), params["csv"])
        print(f"symcone: {exc}", file=sys.stderr)
        return 3
    _emit(_envelope(params, _spectrum_result(spec)), params.get("out"))
    if params["csv"]:
        _emit(_spectrum_csv(spec, params), params["csv"])
    return 0


def _hamiltonian_from_params(params: dict):
    if not params.get("expr"):
        raise ParseError("an --expr Hamiltonian expression is required")
    given = [params.get(key) for key in ("M", "m", "rho0", "rho1")]
    meta = None
    if any(v is not None for v in given):
        if any(v is None for v in given):
            raise ParseError("support metadata requires all of M, m, rho0, rho1")
        if params["m"] <= 0:
            raise DomainError("not in g+: need a positive inner floor m")
        meta = SupportMeta(M=params["M"], m=params["m"],
                           rho0=params["rho0"], rho1=params["rho1"])
    return hamiltonian_from_expression(params["expr"], n=params["n"],
                                       k=params["k"], meta=meta)


def cmd_sandwich(params: dict) -> int:
    H = _hamiltonian_from_params(params)
    cert = sandwich_solve(H)
    report = containment_audit(H, cert, samples=params["samples"],
                               seed=params["seed"])
    result = {
        "inner": {"a": cert.inner.a, "b": cert.inner.b},
        "outer": {"a": cert.outer.a, "b": cert.outer.b},
        "provenance": cert.provenance,
        "audit": {"samples_inner": report.samples_inner,
                  "samples_outer": report.samples_outer,
                  "violations": report.violations,
                  "box_halfwidth": report.box_halfwidth},
    }
    _emit(_envelope(params, result), params.get("out"))
    if report.violations:
        print(f"symcone: containment audit failed with "
              f"{report.violations} violations", file=sys.stderr)
        return 4
    return 0


def cmd_capacity(params: dict) -> int:
    if params["hyperboloid"]:
        V = Hyperboloid(n=params["n"], k=params["k"], a=params["a"],
                        b=params["b"])
        w = capacity_hyperboloid(V)
    elif params.get("expr"):
        w = capacity_of_hamiltonian(_hamiltonian_from_params(params))
    else:
        raise ParseError("need --hyperboloid or --expr")
    result = {"lo": w.lo, "hi": w.hi, "exact": w.exact}
    _emit(_envelope(params, result), params.get("out"))
    return 0


def cmd_squeeze(params: dict) -> int:
    V = Hyperboloid(n=params["n"], k=params["k"], a=params["a"], b=params["b"])
    pool = candidate_pool(params["n"], params["k"], params["candidates"],
                          seed=params["seed"], eps=params["eps"])
    report = nonsqueezing_verdict(V, params["s"], pool,
                                  samples=params["samples"],
                                  seed=params["seed"])
    result = {
        "domain": {"n": V.n, "k": V.k, "a": V.a, "b": V.b},
        "s": params["s"],
        "theoretical": report.theoretical,
        "verdict": report.verdict,
        "candidates": [
            {"id": c.cid, "escapes": c.escapes,
             "witness_point": None if c.witness_point is None
             else list(c.witness_point),
             "displacement": c.displacement}
            for c in report.candidates
        ],
    }
    _emit(_envelope(params, result), params.get("out"))
    return 4 if report.verdict == "CONTRADICTION" else 0


def cmd_metric(params: dict) -> int:
    kw = dict(seed=params["seed"], grid_points=params["grid"],
              pool_size=params["pool"])
    if params["family"] == "scaling":
        s = params["s"]
        fam = scaling_family(scales=(1.0, s), **kw)
        pair = ("f", f"{s:g}f")
    else:
        fam = random_family(count=params["count"], n=params["n"],
                            k=params["k"], **kw)
        pair = None
    report = equivalence_and_order(fam)
    dw = {f"{i}|{j}": dw_bound_check(fam, i, j)
          for i in fam.elements for j in fam.elements if i < j}
    result = {
        "classes": [list(c) for c in report.classes],
        "distances": {f"{i}|{j}": {"lo": d.lo, "hi": d.hi}
                      for (i, j), d in sorted(report.distances.items())},
        "edges": {fmt_float(eps): [list(e) for e in edges]
                  for eps, edges in report.edges.items()},
        "antisymmetry_ok": report.antisymmetry_ok,
        "dw_bound": dw,
    }
    if pair is not None:
        d = (result["distances"].get(f"{pair[0]}|{pair[1]}")
             or result["distances"].get(f"{pair[1]}|{pair[0]}"))
        result["headline"] = {"pair": list(pair), "distance": d}
    _emit(_envelope(params, result), params.get("out"))
    if not report.antisymmetry_ok or not all(v["ok"] for v in dw.values()):
        print("symcone: metric audit failed", file=sys.stderr)
        return 4
    return 0


def cmd_smoothing_audit(params: dict) -> int:
    n, k, eps = params["n"], params["k"], params["eps"]
    pts = params["points"]
    seed = params["seed"]
    gen = random_hamiltonian(n, k, seed=seed, amplitude=params["amplitude"])
    iso = ContactIsotopy(gen)
    sm = smoothed_symplectization(iso, eps)
    cert = sm.certificate

    rng = sampling.rng(seed + 1)
    dirs = sampling.sphere_points(n, pts, seed + 2)
    r_in = eps * rng.uniform(0.05, 0.999, size=pts)
    zs_in = np.sqrt(r_in)[:, None] * dirs
    moved = np.linalg.norm(sm(zs_in) - zs_in, axis=1)
    identity_max = float(np.max(moved))

    r_out = cert.K_factor * eps * rng.uniform(1.001, 4.0, size=pts)
    zs_out = np.sqrt(r_out)[:, None] * dirs
    direct = symplectize_ambient(iso, zs_out)
    agree_max = float(np.max(np.linalg.norm(sm(zs_out) - direct, axis=1)))

    r_all = np.concatenate([
        eps * rng.uniform(0.05, 0.999, size=34),
        eps * rng.uniform(1.001, cert.K_factor, size=33),
        cert.K_factor * eps * rng.uniform(1.001, 4.0, size=33),
    ])
    zs_all = np.sqrt(r_all)[:, None] * sampling.sphere_points(n, 100, seed + 3)
    defect = float(np.max(symplecticity_defect(sm, zs_all)))

    checks = {
        "identity_ball_max_move": identity_max,
        "identity_ball_pass": bool(identity_max < 1e-9),
        "agreement_max_diff": agree_max,
        "agreement_pass": bool(agree_max < 1e-6),
        "symplecticity_defect": defect,
        "symplecticity_pass": bool(defect < 1e-6),
    }
    result = {"M": cert.M, "m": cert.m, "K_factor": cert.K_factor,
              "eps": eps, "checks": checks}
    _emit(_envelope(params, result), params.get("out"))
    ok = all(v for key, v in checks.items() if key.endswith("_pass"))
    if not ok:
        print("symcone: smoothing audit failed", file=sys.stderr)
        return 4
    return 0


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "sandwich": cmd_sandwich,
    "capacity": cmd_capacity,
    "squeeze": cmd_squeeze,
    "metric": cmd_metric,
    "smoothing-audit": cmd_smoothing_audit,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        params = _resolve(args)
        params["out"] = args.out
        return _DISPATCH[args.command](params)
    except (ParseError, DomainError) as exc:
        print(f"symcone: {exc}", file=sys.stderr)
        return 2
    except ScanBudgetError as exc:
        print(f"symcone: {exc}", file=sys.stderr)
        return 3
    except AuditError as exc:
        print(f"symcone: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
