"""Command-line front end.

Every command prints one JSON envelope
{"tool", "version", "command", "config", "result", "elapsed_ms"}.
``test`` exits 0 for scattered, 1 for not scattered; every command exits 2
on bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .certify import (
    aut_sp_compose,
    aut_sp_decompose,
    gammaL1_sieve,
    random_sl_input,
    random_sp_element,
    sl_certificate,
    sp_certificate,
    spread_constraints,
)
from .ff import Field, FieldError, parse_field
from .linpoly import FamilyPoly, LinearizedPoly, is_ell_normalized, lp_binomial, make_linpoly, pseudoregulus
from .matgroup import EmbeddingContext, eta, frobenius_block, phi
from .matrix import Matrix
from .scatter import is_scattered_kernel, is_scattered_pairs, probe_exceptional

SEARCH_CAP = 200_000
_SEARCH_CHUNK = 64


class PolySyntaxError(ValueError):
    def __init__(self, text: str, col: int, msg: str):
        super().__init__(f"poly:1:{col + 1}: {msg} in {text!r}")
        self.col = col


# -- parsing ---------------------------------------------------------------------


def parse_int_range(text: str) -> list[int]:
    """'3..11', '0,1,3' or '5'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _json_at(text: str, start: int, value: str):
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise PolySyntaxError(text, start + exc.pos, exc.msg) from None


def _split_params(text: str, start: int) -> dict[str, tuple[str, int]]:
    """key=value pairs separated by commas outside brackets, with offsets."""
    out, depth, cur, cur_at = {}, 0, "", start
    for i, ch in enumerate(text[start:] + ",", start):
        if ch == "," and depth == 0:
            if cur.strip():
                if "=" not in cur:
                    raise PolySyntaxError(text, cur_at, f"expected key=value, got {cur.strip()!r}")
                k, v = cur.split("=", 1)
                out[k.strip()] = (v.strip(), cur_at + len(k) + 1)
            cur, cur_at = "", i + 1
            continue
        depth += ch == "["
        depth -= ch == "]"
        if depth < 0:
            raise PolySyntaxError(text, i, "unbalanced ']'")
        cur += ch
    if depth:
        raise PolySyntaxError(text, len(text), "unbalanced '['")
    return out


def base_level(F: Field, q: int | None) -> int:
    if q is None:
        if F.level == 0:
            raise FieldError(f"{F.literal} has no proper subfield level to use as F_q")
        return F.level - 1
    for i, L in enumerate(F.levels[:-1]):
        if L.order == q:
            return i
    raise FieldError(f"F_{q} is not a proper level of {F.literal}")


def parse_poly(text: str, F: Field, base: int) -> LinearizedPoly | FamilyPoly:
    """``coeffs=[c0, c1, ...]``, ``pseudoregulus:s=1`` or ``lp:s=1,delta=[...]``.

    Coefficients are integers or flat F_p digit lists.
    """
    text = text.strip()
    q = F.levels[base].order
    n = F.degree // F.levels[base].degree
    if text.startswith("coeffs="):
        vals = _json_at(text, 7, text[7:])
        if not isinstance(vals, list):
            raise PolySyntaxError(text, 7, "expected a list of coefficients")
        return make_linpoly(F, vals, base)
    m = re.match(r"(pseudoregulus|lp)\s*:", text)
    if not m:
        raise PolySyntaxError(text, 0, "expected coeffs=..., pseudoregulus:... or lp:...")
    params = _split_params(text, m.end())
    values = {k: _json_at(text, at, v) for k, (v, at) in params.items()}
    if "s" not in values or not isinstance(values["s"], int):
        raise PolySyntaxError(text, m.end(), "missing integer parameter s")
    if m.group(1) == "pseudoregulus":
        return pseudoregulus(q, n, values["s"])
    if "delta" not in values:
        raise PolySyntaxError(text, m.end(), "missing parameter delta")
    fam = lp_binomial(q, n, values["s"], values["delta"])
    return fam


def parse_matrix(text: str, F: Field) -> Matrix:
    rows = json.loads(text)
    return Matrix(F, [[F.element(v).value for v in row] for row in rows])


# -- commands ------------------------------------------------------------------------


def _resolve_poly(args) -> tuple[LinearizedPoly, FamilyPoly | None]:
    F = parse_field(args.field)
    got = parse_poly(args.poly, F, base_level(F, args.q))
    if isinstance(got, FamilyPoly):
        return got.poly, got
    return got, None


def cmd_test(args) -> tuple[dict, int]:
    f, fam = _resolve_poly(args)
    ell = fam.index if args.ell is None and fam else args.ell
    if ell is None:
        raise ValueError("--ell is required for explicit coefficients")
    methods = {"kernel": ["kernel"], "pairs": ["pairs"], "rank": ["rank"], "all": ["kernel", "rank", "pairs"]}
    reports = []
    for meth in methods[args.method]:
        if meth == "pairs":
            reports.append(is_scattered_pairs(f, ell))
        else:
            reports.append(is_scattered_kernel(f, ell, "rank" if meth == "rank" else "fibers"))
    verdicts = {r.scattered for r in reports}
    if len(verdicts) != 1:
        raise AssertionError("methods disagree")
    main = reports[0].to_json()
    main["normalized"] = is_ell_normalized(f, ell).ok
    if fam:
        main["family"] = {"kind": fam.kind, "params": fam.params, "conditions": fam.conditions}
    if len(reports) > 1:
        main["checks"] = [r.to_json() for r in reports[1:]]
    if args.deterministic:
        _zero_times(main)
    return main, 0 if reports[0].scattered else 1


def _zero_times(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "elapsed_ms":
                obj[k] = 0
            else:
                _zero_times(v)
    elif isinstance(obj, list):
        for v in obj:
            _zero_times(v)


def search_candidates(F: Field, base: int, ells: list[int], kmax: int, coeff_level: int | None = None):
    """All monic ell-normalized polynomials with q-degree <= kmax, canonical order.

    Order: ell ascending, then k ascending, then the free coefficients
    (positions 0..k-1 except ell) lexicographically by integer value.
    """
    q_deg = F.levels[base].degree
    n = F.degree // q_deg
    pool = range(F.levels[coeff_level].order if coeff_level is not None else F.order)
    for ell in ells:
        if not 0 <= ell < n:
            raise ValueError(f"ell = {ell} outside 0..{n - 1}")
        for k in range(0, min(kmax, n - 1) + 1):
            if k == ell:
                continue
            free = [i for i in range(k) if i != ell]
            for vals in itertools.product(pool, repeat=len(free)):
                c = [0] * (k + 1)
                c[k] = 1
                for i, v in zip(free, vals):
                    c[i] = v
                if ell > 0 and c[0] == 0:
                    continue
                yield ell, tuple(c)


def count_candidates(F: Field, base: int, ells: list[int], kmax: int, coeff_level: int | None = None) -> int:
    n = F.degree // F.levels[base].degree
    size = F.levels[coeff_level].order if coeff_level is not None else F.order
    total = 0
    for ell in ells:
        for k in range(0, min(kmax, n - 1) + 1):
            if k == ell:
                continue
            free = [i for i in range(k) if i != ell]
            if ell > 0 and 0 in free:
                total += (size - 1) * size ** (len(free) - 1)
            elif ell > 0 and k == 0:
                total += 1
            else:
                total += size ** len(free)
    return total


def _search_chunk(job):
    literal, base, items = job
    F = parse_field(literal)
    out = []
    for ell, coeffs in items:
        f = LinearizedPoly(F, coeffs, base)
        out.append((ell, len(coeffs) - 1, list(coeffs), is_scattered_kernel(f, ell).scattered))
    return out


def cmd_search(args) -> tuple[dict, int]:
    F = parse_field(args.field)
    base = base_level(F, args.q)
    ells = parse_int_range(args.ell_range) if args.ell_range else ([args.ell] if args.ell is not None else [])
    coeff_level = base_level(F, args.coeffs_in) if args.coeffs_in else None
    total = count_candidates(F, base, ells, args.kmax, coeff_level)
    if total > args.cap:
        raise ValueError(f"{total} candidates exceed the cap {args.cap}; restrict --kmax, --ell or --coeffs-in")
    cands = list(search_candidates(F, base, ells, args.kmax, coeff_level))
    jobs = [(F.literal, base, cands[i : i + _SEARCH_CHUNK]) for i in range(0, len(cands), _SEARCH_CHUNK)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            parts = list(ex.map(_search_chunk, jobs))
    else:
        parts = [_search_chunk(j) for j in jobs]
    rows = [r for part in parts for r in part]
    results = [{"ell": ell, "k": k, "coeffs": c, "scattered": s} for ell, k, c, s in rows]
    digest = hashlib.sha256(json.dumps(results, separators=(",", ":")).encode()).hexdigest()
    found = [
        {"ell": r["ell"], "k": r["k"], "poly": LinearizedPoly(F, tuple(r["coeffs"]), base).to_json()}
        for r in results
        if r["scattered"]
    ]
    n_sc = len(found)
    summary = {
        "field": F.literal,
        "grid": {"ell": ells, "kmax": args.kmax, "coeffs_in": args.coeffs_in},
        "counts": {"tested": len(results), "scattered": n_sc, "not_scattered": len(results) - n_sc},
        "scattered": found,
        "determinism_hash": digest,
    }
    if args.format == "csv":
        summary["_rows"] = [
            {"ell": r["ell"], "k": r["k"], "coeffs": " ".join(map(str, r["coeffs"])), "scattered": int(r["scattered"])}
            for r in results
        ]
    return summary, 0


def cmd_probe(args) -> tuple[dict, int]:
    f, fam = _resolve_poly(args)
    ell = fam.index if args.ell is None and fam else args.ell
    if ell is None:
        raise ValueError("--ell is required for explicit coefficients")
    rep = probe_exceptional(fam or f, ell, args.depth).to_json()
    if args.deterministic:
        _zero_times(rep)
    return rep, 0


def cmd_embed(args) -> tuple[dict, int]:
    ctx = EmbeddingContext(args.q, args.m, args.n)
    show = set(args.show.split(",")) if args.show != "all" else {"C", "Mbar", "M", "phi", "eta"}
    out = {"q": ctx.q, "m": ctx.m, "n": ctx.n, "field": ctx.top.literal,
           "gamma": list(ctx.mid(ctx.gamma).flat)}
    if "C" in show:
        out["C"] = ctx.companion.tolist()
    if "Mbar" in show:
        out["Mbar"] = ctx.frobenius.tolist()
    if "M" in show:
        out["M"] = frobenius_block(ctx).tolist()
    if "phi" in show:
        a = ctx.mid.element(json.loads(args.a)) if args.a else ctx.mid(ctx.gamma)
        out["phi"] = {"a": list(a.flat), "matrix": phi(a, ctx).tolist()}
    if "eta" in show:
        T = parse_matrix(args.T, ctx.mid) if args.T else Matrix.diagonal(ctx.mid, [ctx.gamma] + [1] * (ctx.n - 1))
        out["eta"] = {"T": T.to_json(), "matrix": eta(T, ctx).tolist()}
    return out, 0


def cmd_certify(args) -> tuple[dict, int]:
    if args.d % args.e:
        raise ValueError("e must divide d")
    ctx = EmbeddingContext(args.q, args.d // args.e, args.e)
    rng = np.random.default_rng(args.seed)
    certs = []
    for _ in range(args.samples):
        if args.kind == "sl":
            beta, j = random_sl_input(ctx, rng)
            certs.append(sl_certificate(beta, j, ctx))
        else:
            el = random_sp_element(ctx, rng)
            T, j = aut_sp_compose(el)
            if aut_sp_decompose(T, j, ctx) != el:
                raise AssertionError("decomposition round trip failed")
            certs.append(sp_certificate(el))
    docs = [c.to_json() for c in certs]
    ok = sum(d["verified"] for d in docs)
    out = {
        "kind": args.kind,
        "params": {"q": args.q, "e": args.e, "d": args.d, "seed": args.seed},
        "samples": args.samples,
        "verified": ok,
        "bound": certs[0].bound if certs else None,
        "max_rank": max((c.rank for c in certs), default=None),
        "ranks": [c.rank for c in certs],
    }
    if args.full:
        out["certificates"] = docs
    return out, 0 if ok == args.samples else 1


def cmd_sieve(args) -> tuple[dict, int]:
    qs = parse_int_range(args.q_list)
    ds = parse_int_range(args.d)
    if args.odd_only:
        ds = [d for d in ds if d % 2]
    if args.even_only or args.kind == "spread":
        ds = [d for d in ds if d % 2 == 0]
    fn = gammaL1_sieve if args.kind == "gammaL1" else spread_constraints
    rows = []
    for q in qs:
        for d in ds:
            for k in range(d + 1):
                for ell in range(d + 1):
                    if max(k, ell) != d or k == ell:
                        continue
                    rows.append(fn(q, k, ell).to_json())
    tally: dict[str, int] = {}
    for r in rows:
        tally[r["verdict"]] = tally.get(r["verdict"], 0) + 1
    unresolved_nm = sum(1 for r in rows if r["verdict"] == "unresolved" and r["k"] != 0)
    out = {"kind": args.kind, "q": qs, "d": ds, "counts": tally,
           "unresolved_non_monomial": unresolved_nm, "rows": rows}
    if args.kind == "spread":
        out["survivors"] = sorted({(r["d"], r["k"], r["ell"]) for r in rows if r["verdict"] == "survivor"})
    if args.format == "csv":
        out["_rows"] = [{k: v for k, v in r.items() if k != "notes"} for r in rows]
    return out, 0


def cmd_families(args) -> tuple[dict, int]:
    from .ff import extension_field, norm_rel

    q, n = args.q, args.n
    out = {"q": q, "n": n, "pseudoregulus": [], "lp": []}
    for s in range(1, n):
        fam = pseudoregulus(q, n, s)
        out["pseudoregulus"].append({"s": s, "poly": str(fam.poly), "conditions": fam.conditions})
    F, base = extension_field(q, n)
    for s in range(1, (n + 1) // 2):
        if 2 * s >= n:
            break
        good = [d for d in range(1, F.order) if norm_rel(F(d), base).value != 1]
        out["lp"].append({"s": s, "index": s, "gcd_ok": math.gcd(s, n) == 1,
                          "deltas_with_norm_not_1": len(good), "deltas_total": F.order - 1})
    return out, 0


COMMANDS = {
    "test": cmd_test,
    "search": cmd_search,
    "probe": cmd_probe,
    "embed": cmd_embed,
    "certify": cmd_certify,
    "sieve": cmd_sieve,
    "families": cmd_families,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--deterministic", action="store_true",
                        help="report elapsed_ms as 0 so repeated runs are byte-identical")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--field", required=True, help="field literal p^[d1,d2,...]")
    poly.add_argument("--q", type=int, help="order of the F_q level (default: level below the top)")
    poly.add_argument("--ell", type=int)
    poly.add_argument("--poly", required=True)

    ap = argparse.ArgumentParser(prog="scatterlab", description="Scattered linearized polynomial toolkit")
    ap.add_argument("--version", action="version", version=f"scatterlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", parents=[common, poly], help="test one polynomial")
    p.add_argument("--method", choices=["kernel", "pairs", "rank", "all"], default="kernel")

    p = sub.add_parser("search", parents=[common], help="exhaustive search over normalized polynomials")
    p.add_argument("--field", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--ell-range", dest="ell_range", help="e.g. 0..3 or 0,2")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--coeffs-in", dest="coeffs_in", type=int, help="restrict coefficients to the level of this order")
    p.add_argument("--cap", type=int, default=SEARCH_CAP)

    p = sub.add_parser("probe", parents=[common, poly], help="test over extensions m = 1..depth")
    p.add_argument("--depth", type=int, default=2)

    p = sub.add_parser("embed", parents=[common], help="show phi, eta and the Frobenius blocks")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--show", default="all", help="comma list of C,Mbar,M,phi,eta or 'all'")
    p.add_argument("--a", help="element of F_{q^m} for phi, as int or flat digit list")
    p.add_argument("--T", help="n x n matrix over F_{q^m} for eta, as JSON rows")

    p = sub.add_parser("certify", parents=[common], help="batch rank certificates")
    p.add_argument("kind", choices=["sl", "sp"])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--full", action="store_true", help="include every certificate")

    p = sub.add_parser("sieve", parents=[common], help="arithmetic sieves over (k, ell)")
    p.add_argument("--kind", choices=["gammaL1", "spread"], default="gammaL1")
    p.add_argument("--q", dest="q_list", required=True, help="e.g. 3 or 2,3,4 or 2..9")
    p.add_argument("--d", required=True, help="e.g. 3..11")
    p.add_argument("--odd-only", action="store_true")
    p.add_argument("--even-only", action="store_true")

    p = sub.add_parser("families", parents=[common], help="list family members for (q, n)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return ap


def _to_csv(result: dict) -> str:
    rows = result.get("_rows")
    if rows is None:
        raise ValueError("csv output is available for search and sieve only")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()) if rows else ["empty"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _config(args) -> dict:
    # worker count and output path do not change the result, so they stay out
    # of the report to keep it identical across parallelism degrees
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("jobs", "out")}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        result, code = COMMANDS[args.command](args)
        fmt = args.format
        text = _to_csv(result) if fmt == "csv" else None
    except (ValueError, FieldError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"scatterlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    result.pop("_rows", None)
    if text is None:
        elapsed = 0 if args.deterministic else int((time.perf_counter() - t0) * 1000)
        env = {"tool": "scatterlab", "version": __version__, "command": args.command,
               "config": _config(args), "result": result, "elapsed_ms": elapsed}
        text = json.dumps(env, indent=2, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


if __name__ == "__main__":
    sys.exit(main())
