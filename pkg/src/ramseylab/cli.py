"""Command-line front end.

Every subcommand emits one RLAB-REPORT 1 JSON document: a config block
(sufficient to re-run), a result block, and a verification block.  Output
is deterministic for a fixed config — byte-identical apart from the
timestamp — which is what makes `verify` possible: it re-runs the config
and compares result blocks.

Exit codes: 0 success, 1 verified-negative or failed verification,
2 internal error, 64 usage, 74 file I/O.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Optional

from . import census as census_mod
from . import tournaments
from .bitset import mask_of
from .communities import dependent_random_choice
from .digraphs import (
    Digraph,
    compute_layering,
    degree_profile,
    grid_digraph,
    hypercube_bound_sum,
    hypercube_digraph,
    parse_dgraph,
    path_digraph,
    ramsey_bounds,
    random_layered_digraph,
    transitive_digraph,
    write_dgraph,
)
from .errors import RetriesExhausted
from .lowerbound import (
    DESK_PROFILE,
    PAPER_PROFILE,
    build_D0_and_R,
    build_height_h_guest,
    build_lower_host,
    check_host_property,
    front_index_diagnostic,
    verify_no_embedding,
)
from .profiles import run_desk_graded_pipeline, run_desk_pipeline
from .tournaments import (
    Tournament,
    check_median_certificate,
    median_order_exact,
    median_order_local,
    parse_tourn,
    qr_tournament,
    random_tournament,
    rotational_tournament,
    transitive_tournament,
    write_tourn,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_USAGE = 64
EXIT_IO = 74

FORMAT_TAG = "RLAB-REPORT 1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as e:
        sys.stderr.write(f"cannot write {out}: {e}\n")
        sys.exit(EXIT_IO)


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        sys.stderr.write(f"cannot read {path}: {e}\n")
        sys.exit(EXIT_IO)


def _write_view(path: Optional[str], text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        sys.stderr.write(f"cannot write {path}: {e}\n")
        sys.exit(EXIT_IO)


def _digraph_dot(G: Digraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in range(G.n):
        lines.append(f"  {v};")
    for u, v in G.edges:
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _guest_from_config(cfg: dict) -> Digraph:
    fam = cfg["family"]
    if fam == "grid":
        return grid_digraph(cfg["dim"], cfg["side"])
    if fam == "hypercube":
        return hypercube_digraph(cfg["dim"])
    if fam == "path":
        orient = [1 if ch == "+" else 0 for ch in cfg["orientation"]]
        return path_digraph(orient)
    if fam == "transitive":
        return transitive_digraph(cfg["n"])
    if fam == "random-layered":
        G, _ = random_layered_digraph(
            cfg["layer_sizes"], cfg["max_degree"], cfg["w"], cfg["seed"]
        )
        return G
    if fam == "file":
        G, _ = parse_dgraph(_read_text(cfg["path"]))
        return G
    raise UsageError(f"unknown digraph family {fam!r}")


def _host_from_config(cfg: dict) -> Tournament:
    fam = cfg["family"]
    if fam == "random":
        return random_tournament(cfg["n"], cfg["seed"])
    if fam == "transitive":
        return transitive_tournament(cfg["n"])
    if fam == "rotational":
        return rotational_tournament(cfg["n"])
    if fam == "qr":
        return qr_tournament(cfg["n"])
    if fam == "file":
        return parse_tourn(_read_text(cfg["path"]))
    raise UsageError(f"unknown tournament family {fam!r}")


# --- runners: config dict in, (result, verification, exit_code) out -------


def run_gen_digraph(cfg: dict):
    G = _guest_from_config(cfg)
    L = compute_layering(G)
    result = {
        "n": G.n,
        "m": len(G.edges),
        "height": L.height,
        "width": L.width,
        "layer_sizes": L.layer_sizes(),
        "dgraph": write_dgraph(G, L),
    }
    verification = {
        "status": "verified",
        "checks": [{"name": "acyclic-and-graded", "ok": True}],
    }
    return result, verification, EXIT_OK


def run_gen_tournament(cfg: dict):
    T = _host_from_config(cfg)
    result = {"n": T.n, "tourn": write_tourn(T)}
    verification = {
        "status": "verified",
        "checks": [{"name": "antisymmetry", "ok": True}],
    }
    return result, verification, EXIT_OK


def run_median_order(cfg: dict):
    T = _host_from_config(cfg["host"])
    if cfg["mode"] == "exact":
        mo = median_order_exact(T)
    else:
        mo = median_order_local(T, cfg["order_seed"])
    cert = check_median_certificate(T, mo.order)
    result = {
        "n": T.n,
        "mode": cfg["mode"],
        "order": list(mo.order),
        "forward_edges": mo.forward_edges,
        "certificate": cert,
    }
    verification = {
        "status": "verified" if cert else "failed",
        "checks": [{"name": "in-degree-certificate", "ok": cert}],
    }
    return result, verification, EXIT_OK if cert else EXIT_NEGATIVE


def run_drc(cfg: dict):
    T = _host_from_config(cfg["host"])
    n = T.n
    half = n // 2
    L = mask_of(range(half))
    R = mask_of(range(half, n))
    A = L
    try:
        res = dependent_random_choice(
            T,
            L,
            R,
            A,
            cfg["k"],
            cfg["delta"],
            cfg["s"],
            Fraction(cfg["d"]),
            cfg["seed"],
            mode=cfg["mode"],
        )
    except RetriesExhausted as e:
        return (
            {"n": n, "error": str(e)},
            {"status": "failed", "checks": [{"name": "drc-conclusions", "ok": False}]},
            EXIT_NEGATIVE,
        )
    ok = bool(res.community)
    result = {"n": n, **res.to_dict(), "community_passed": res.community.passed}
    verification = {
        "status": "verified" if ok else "failed",
        "checks": [
            {"name": "family-avoided", "ok": res.family_checked},
            {"name": "m-floor", "ok": res.M.bit_count() >= res.m_required},
            {"name": "community", "ok": ok},
        ],
    }
    return result, verification, EXIT_OK if ok else EXIT_NEGATIVE


def run_build_structure(cfg: dict):
    if cfg["graded"]:
        from .profiles import DESK_ORDER_MODE, desk_graded_guest, desk_graded_params
        from .structure import audit_graded_structure, build_graded_structure, structure_report

        G, L = desk_graded_guest()
        p = desk_graded_params()
        T = random_tournament(p.n_required, cfg["host_seed"])
        gs = build_graded_structure(
            T, G, L, p, cfg["seed"], order_mode=DESK_ORDER_MODE
        )
        rep = structure_report(audit_graded_structure(T, gs))
        sizes = {"a": [a.bit_count() for a in gs.A]}
    else:
        from .profiles import DESK_ORDER_MODE, desk_params, desk_tuning
        from .structure import audit_structure, build_structure, structure_report

        p = desk_params()
        T = random_tournament(p.n_required, cfg["host_seed"])
        es = build_structure(
            T, p, desk_tuning(), cfg["seed"], order_mode=DESK_ORDER_MODE
        )
        rep = structure_report(audit_structure(T, es))
        sizes = {
            "layers": [a.bit_count() for a in es.layer_sets()],
            "bases": [es.base_rung(i).bit_count() for i in range(1, p.h + 1)],
        }
    result = {"n_host": T.n, "sizes": sizes, "audit": rep}
    verification = {
        "status": "verified" if rep["passed"] else "failed",
        "checks": rep["checks"],
    }
    return result, verification, EXIT_OK if rep["passed"] else EXIT_NEGATIVE


def run_embed(cfg: dict):
    from .embedding import PipelineReport

    report = PipelineReport()
    if cfg["graded"]:
        emb, T = run_desk_graded_pipeline(cfg["seed"], report=report)
    else:
        emb, T = run_desk_pipeline(cfg["seed"], report=report)
    result = {
        "n_host": T.n,
        "mapping": emb.to_dict(),
        "pipeline": {
            "base_checks": len(report.base_checks),
            "base_all_passed": all(bool(c) for c in report.base_checks),
            "cond3_checks": len(report.cond3_checks),
            "cond3_all_passed": all(bool(c) for _, _, c in report.cond3_checks),
            "resamples": report.resamples,
        },
    }
    verification = {
        "status": "verified" if emb.verified else "failed",
        "checks": [{"name": "edges-forward-injective", "ok": emb.verified}],
    }
    return result, verification, EXIT_OK if emb.verified else EXIT_NEGATIVE


def run_ramsey_exact(cfg: dict):
    G = _guest_from_config(cfg["guest"])
    res = census_mod.oriented_ramsey_exact(G, cfg["max_n"])
    witness_ok = None
    if res.witness_code is not None:
        W = res.witness()
        witness_ok = not census_mod.contains_digraph(W, G)
    result = {
        "guest_n": G.n,
        "found": res.found,
        "value": res.value,
        "checked_up_to": res.checked_up_to,
        "witness_code": res.witness_code,
        "witness_n": res.witness_n,
    }
    checks = []
    if witness_ok is not None:
        checks.append({"name": "witness-avoids-guest", "ok": witness_ok})
    status = "verified" if (witness_ok in (True, None)) else "failed"
    verification = {"status": status, "checks": checks}
    if not res.found:
        return result, verification, EXIT_NEGATIVE
    return result, verification, EXIT_OK if status == "verified" else EXIT_NEGATIVE


def run_census(cfg: dict):
    n = cfg["n"]
    counts = census_mod.census_counts(n)
    checks = []
    for i in range(1, min(n, 6) + 1):
        oracle = len(census_mod.census_counts_oracle(i))
        checks.append(
            {"name": f"oracle-n{i}", "ok": oracle == counts[i - 1]}
        )
    ok = all(c["ok"] for c in checks)
    result = {"n": n, "counts": counts}
    verification = {"status": "verified" if ok else "failed", "checks": checks}
    return result, verification, EXIT_OK if ok else EXIT_NEGATIVE


def run_lowerbound(cfg: dict):
    profile = DESK_PROFILE if cfg["profile"] == "desk" else PAPER_PROFILE
    D0, R, prov = build_D0_and_R(cfg["n"], cfg["delta"], profile, cfg["seed"])
    G, L = build_height_h_guest(D0, cfg["height"])
    H = max(1, -(-cfg["height"] // 2) - 1)
    T, parts = build_lower_host(R, H)
    rep = verify_no_embedding(G, T, cfg["budget"])
    result = {
        "provenance": prov,
        "guest_n": G.n,
        "guest_height": L.height,
        "host_n": T.n,
        "host_parts": H,
        "verdict": rep.verdict,
        "nodes": rep.nodes,
    }
    if cfg.get("x"):
        host = check_host_property(R, cfg["x"])
        result["host_check"] = {
            "mode": host.mode,
            "passed": host.passed,
            "worst_W": host.worst_W,
            "vacuous": host.vacuous,
        }
    ok = rep.verdict == "exact-not-found"
    verification = {
        "status": "verified" if ok else ("failed" if rep.verdict == "found" else "unverified"),
        "checks": [{"name": "no-embedding", "ok": ok}],
    }
    return result, verification, EXIT_OK if ok else EXIT_NEGATIVE


def run_verify_embedding(cfg: dict):
    G = _guest_from_config(cfg["guest"])
    T = _host_from_config(cfg["host"])
    from .embedding import verify_embedding

    phi = {int(a): int(b) for a, b in cfg["pairs"]}
    ok = verify_embedding(G, T, phi)
    result = {"guest_n": G.n, "host_n": T.n, "ok": ok}
    verification = {
        "status": "verified" if ok else "failed",
        "checks": [{"name": "edges-forward-injective", "ok": ok}],
    }
    return result, verification, EXIT_OK if ok else EXIT_NEGATIVE


def run_bounds(cfg: dict):
    G = _guest_from_config(cfg["guest"])
    L = compute_layering(G)
    prof = degree_profile(G, L)
    rep = ramsey_bounds(prof, L, G.n)
    result = {
        "n": G.n,
        "height": L.height,
        "width": L.width,
        "max_degree": prof.max_degree,
        "main_bound": str(rep.main_bound),
        "main_bound_digits": len(str(rep.main_bound)),
        "easy_bound": str(rep.easy_bound),
        "refined_bound": str(rep.refined_bound) if rep.refined_bound is not None else None,
    }
    checks = []
    for d in range(1, cfg["identity_max"] + 1):
        got, want = hypercube_bound_sum(d)
        checks.append({"name": f"refined-sum-closed-form-d{d}", "ok": got == want})
    ok = all(c["ok"] for c in checks)
    result["identity_checked_to"] = cfg["identity_max"]
    verification = {"status": "verified" if ok else "failed", "checks": checks}
    return result, verification, EXIT_OK if ok else EXIT_NEGATIVE


RUNNERS: dict[str, Callable] = {
    "gen-digraph": run_gen_digraph,
    "gen-tournament": run_gen_tournament,
    "median-order": run_median_order,
    "drc": run_drc,
    "build-structure": run_build_structure,
    "embed": run_embed,
    "ramsey-exact": run_ramsey_exact,
    "census": run_census,
    "lowerbound": run_lowerbound,
    "verify-embedding": run_verify_embedding,
    "bounds": run_bounds,
}


def run_verify(cfg: dict):
    text = _read_text(cfg["report"])
    try:
        rep = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"not a JSON report: {e}")
    if rep.get("format") != FORMAT_TAG:
        raise UsageError(f"report format is {rep.get('format')!r}, want {FORMAT_TAG!r}")
    cmd = rep.get("command")
    if cmd == "verify":
        raise UsageError("cannot verify a verify report")
    if cmd not in RUNNERS:
        raise UsageError(f"unknown command in report: {cmd!r}")
    result, verification, _code = RUNNERS[cmd](rep["config"])
    fresh = json.loads(json.dumps(_jsonable(result), sort_keys=True))
    match = fresh == rep.get("result")
    reverified = verification.get("status") == "verified"
    out = {
        "command": cmd,
        "result_matches": match,
        "reverified": reverified,
    }
    ok = match and reverified
    ver = {
        "status": "verified" if ok else "failed",
        "checks": [
            {"name": "result-identical", "ok": match},
            {"name": "checks-pass-on-rerun", "ok": reverified},
        ],
    }
    return out, ver, EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> _Parser:
    p = _Parser(prog="ramseylab", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="worker threads for compiled kernels")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--out", default=None, help="report path (default stdout)")
        return sp

    def guest_args(sp, prefix=""):
        sp.add_argument(f"--{prefix}family", required=True,
                        choices=["grid", "hypercube", "path", "transitive",
                                 "random-layered", "file"])
        sp.add_argument(f"--{prefix}dim", type=int)
        sp.add_argument(f"--{prefix}side", type=int)
        sp.add_argument(f"--{prefix}orientation")
        sp.add_argument(f"--{prefix}n", type=int)
        sp.add_argument(f"--{prefix}layer-sizes", type=int, nargs="+")
        sp.add_argument(f"--{prefix}max-degree", type=int)
        sp.add_argument(f"--{prefix}w", type=int, default=1)
        sp.add_argument(f"--{prefix}path")
        sp.add_argument(f"--{prefix}seed", type=int)

    def host_args(sp):
        sp.add_argument("--family", required=True,
                        choices=["random", "transitive", "rotational", "qr", "file"])
        sp.add_argument("--n", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--path")

    sp = add("gen-digraph", help="generate an acyclic graded guest")
    guest_args(sp)
    sp.add_argument("--dot", help="also write a DOT view here")

    sp = add("gen-tournament", help="generate a host tournament")
    host_args(sp)
    sp.add_argument("--dot", help="also write a DOT view here")

    sp = add("median-order", help="median order with relocation certificate")
    host_args(sp)
    sp.add_argument("--mode", choices=["local", "exact"], default="local")
    sp.add_argument("--order-seed", type=int, help="shuffle seed for local mode")

    sp = add("drc", help="dependent random choice on a random split")
    host_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--d", required=True, help="density floor, e.g. 1/3")
    sp.add_argument("--mode", choices=["out", "in"], default="out", dest="drc_mode")
    sp.add_argument("--drc-seed", type=int, required=True)

    sp = add("build-structure", help="community ladder on a random host (desk profile)")
    sp.add_argument("--graded", action="store_true")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--host-seed", type=int)

    sp = add("embed", help="full desk pipeline: host, ladder, layer embedding")
    sp.add_argument("--graded", action="store_true")
    sp.add_argument("--seed", type=int, required=True)

    sp = add("ramsey-exact", help="exact oriented Ramsey number via the census")
    guest_args(sp)
    sp.add_argument("--max-n", type=int, default=census_mod.MAX_CENSUS_N)

    sp = add("census", help="tournament counts up to isomorphism")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--csv", help="write counts as CSV here")

    sp = add("lowerbound", help="guest/host pair with a verified non-embedding")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--profile", choices=["desk", "paper"], default="desk")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--height", type=int, default=4)
    sp.add_argument("--budget", type=int, default=10_000_000)
    sp.add_argument("--x", type=int, help="also run the host cut check at this x")

    sp = add("verify", help="re-run a report's config and compare results")
    sp.add_argument("--report", required=True)

    sp = add("verify-embedding", help="check a mapping written as JSON pairs")
    sp.add_argument("--pairs", required=True,
                    help='JSON list of [guest, host] pairs, or @file')
    guest_args(sp, prefix="guest-")
    sp.add_argument("--host-family", required=True,
                    choices=["random", "transitive", "rotational", "qr", "file"])
    sp.add_argument("--host-n", type=int)
    sp.add_argument("--host-seed", type=int)
    sp.add_argument("--host-path")

    sp = add("bounds", help="exact big-integer host-size bounds for a guest")
    guest_args(sp)
    sp.add_argument("--identity-max", type=int, default=20)

    return p


def _guest_cfg(args, prefix="") -> dict:
    g = lambda name: getattr(args, (prefix + name).replace("-", "_"))
    fam = g("family")
    cfg = {"family": fam}
    if fam == "grid":
        if g("dim") is None or g("side") is None:
            raise UsageError("grid needs --dim and --side")
        cfg.update(dim=g("dim"), side=g("side"))
    elif fam == "hypercube":
        if g("dim") is None:
            raise UsageError("hypercube needs --dim")
        cfg.update(dim=g("dim"))
    elif fam == "path":
        if not g("orientation") or set(g("orientation")) - set("+-"):
            raise UsageError("path needs --orientation over '+'/'-'")
        cfg.update(orientation=g("orientation"))
    elif fam == "transitive":
        if g("n") is None:
            raise UsageError("transitive needs --n")
        cfg.update(n=g("n"))
    elif fam == "random-layered":
        if g("layer-sizes") is None or g("max-degree") is None or g("seed") is None:
            raise UsageError("random-layered needs --layer-sizes, --max-degree, --seed")
        cfg.update(
            layer_sizes=g("layer-sizes"), max_degree=g("max-degree"),
            w=g("w"), seed=g("seed"),
        )
    elif fam == "file":
        if g("path") is None:
            raise UsageError("file needs --path")
        cfg.update(path=g("path"))
    return cfg


def _host_cfg(args, prefix="") -> dict:
    g = lambda name: getattr(args, (prefix + name).replace("-", "_"))
    fam = g("family")
    cfg = {"family": fam}
    if fam == "random":
        if g("n") is None or g("seed") is None:
            raise UsageError("random host needs --n and --seed")
        cfg.update(n=g("n"), seed=g("seed"))
    elif fam in ("transitive", "rotational", "qr"):
        if g("n") is None:
            raise UsageError(f"{fam} host needs --n")
        cfg.update(n=g("n"))
    elif fam == "file":
        if g("path") is None:
            raise UsageError("file host needs --path")
        cfg.update(path=g("path"))
    return cfg


def _config_from_args(args) -> dict:
    cmd = args.command
    if cmd == "gen-digraph":
        return _guest_cfg(args)
    if cmd == "gen-tournament":
        return _host_cfg(args)
    if cmd == "median-order":
        cfg = {"host": _host_cfg(args), "mode": args.mode, "order_seed": args.order_seed}
        if args.mode == "local" and args.order_seed is None:
            raise UsageError("local mode needs --order-seed")
        return cfg
    if cmd == "drc":
        return {
            "host": _host_cfg(args),
            "k": args.k, "delta": args.delta, "s": args.s, "d": args.d,
            "mode": args.drc_mode, "seed": args.drc_seed,
        }
    if cmd == "build-structure":
        return {
            "graded": args.graded,
            "seed": args.seed,
            "host_seed": args.host_seed if args.host_seed is not None else args.seed,
        }
    if cmd == "embed":
        return {"graded": args.graded, "seed": args.seed}
    if cmd == "ramsey-exact":
        return {"guest": _guest_cfg(args), "max_n": args.max_n}
    if cmd == "census":
        return {"n": args.n}
    if cmd == "lowerbound":
        return {
            "n": args.n, "delta": args.delta, "profile": args.profile,
            "seed": args.seed, "height": args.height, "budget": args.budget,
            "x": args.x,
        }
    if cmd == "verify":
        return {"report": args.report}
    if cmd == "verify-embedding":
        raw = args.pairs
        if raw.startswith("@"):
            raw = _read_text(raw[1:])
        try:
            pairs = json.loads(raw)
        except json.JSONDecodeError as e:
            raise UsageError(f"--pairs is not JSON: {e}")
        return {
            "guest": _guest_cfg(args, prefix="guest-"),
            "host": _host_cfg(args, prefix="host-"),
            "pairs": pairs,
        }
    if cmd == "bounds":
        return {"guest": _guest_cfg(args), "identity_max": args.identity_max}
    raise UsageError(f"unknown command {cmd!r}")


def _set_threads(n: int) -> None:
    if n < 1:
        raise UsageError("--threads must be >= 1")
    try:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except Exception:
        pass  # threads are an optimization; absence of numba is fine


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _set_threads(args.threads)
        cfg = _config_from_args(args)
        if args.command == "verify":
            result, verification, code = run_verify(cfg)
        else:
            result, verification, code = RUNNERS[args.command](cfg)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except SystemExit:
        raise
    except Exception as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_ERROR
    report = {
        "format": FORMAT_TAG,
        "command": args.command,
        "config": cfg,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "result": result,
        "verification": verification,
    }
    _emit(report, args.out)
    if args.command == "gen-digraph" and args.dot:
        _write_view(args.dot, _digraph_dot(_guest_from_config(cfg)))
    if args.command == "gen-tournament" and args.dot:
        _write_view(args.dot, tournaments.to_dot(_host_from_config(cfg)))
    if args.command == "census" and args.csv:
        rows = "".join(f"{i + 1},{c}\n" for i, c in enumerate(result["counts"]))
        _write_view(args.csv, "n,count\n" + rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
