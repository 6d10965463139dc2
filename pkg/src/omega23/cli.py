"""Command-line front end.

Subcommands: generate, verify, certify, search-a, spinor, oracle. All
reports are UTF-8 JSON with sorted keys; identical configuration and seed
give byte-identical output except for the timing fields. Exit codes:
0 all requested checks pass, 1 check failure, 2 usage or build error,
3 inconclusive certification.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import sympy

from . import resolved_seed
from .certify import CertifyError, certify_generation
from .fields import (FieldError, elem_to_json, field_to_json, is_square,
                     make_field)
from .forms import (FormsError, OrthoSpace, in_omega, isotropic_count,
                    is_isometry, omega_order, gram_matrix, reflection_decomposition,
                    spinor_norm, witt_type)
from .generators import (GenError, build_pair, classify, default_a,
                         pair_to_json, pair_to_text, search_a)
from .linalg import LinalgError, Matrix
from .verify import (VerifyError, load_claims, verify_caseA_identities,
                     verify_caseB_identities, verify_order_claims,
                     verify_structural)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

_BUILD_ERRORS = (FieldError, FormsError, GenError, LinalgError, VerifyError,
                 CertifyError, ValueError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _diag("usage", message)
        raise SystemExit(EXIT_USAGE)


def _diag(kind: str, detail: str):
    print(json.dumps({"error": kind, "detail": detail}, sort_keys=True),
          file=sys.stderr)


def _parse_q(text: str):
    q = int(text)
    fac = sympy.factorint(q)
    if len(fac) != 1:
        raise FieldError(f"q = {q} is not a prime power")
    [(p, f)] = fac.items()
    if p == 2:
        raise FieldError("q must be odd")
    return make_field(int(p), int(f))


def _parse_a(ctx, text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) == 1:
        return int(parts[0])
    return [int(c) for c in parts]


def _emit(doc: dict, text: str | None, args) -> None:
    if args.format == "json":
        payload = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    else:
        payload = (text if text is not None else json.dumps(doc, indent=2)) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _pair_params(args, ctx, a_parsed):
    return {
        "n": args.n,
        "q": ctx.q,
        "a": "default" if a_parsed is None else a_parsed,
        "force": bool(getattr(args, "force", False)),
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_generate(args) -> int:
    ctx = _parse_q(args.q)
    a = _parse_a(ctx, args.a)
    pair = build_pair(args.n, ctx, a, force=args.force)
    doc = {
        "command": "generate",
        "params": _pair_params(args, ctx, a),
        "pair": pair_to_json(pair),
    }
    _emit(doc, pair_to_text(pair), args)
    return EXIT_OK


def _report_lines(report) -> list:
    out = [f"[{'ok' if report.ok else 'FAIL'}] params {report.params}"]
    for c in report.checks:
        out.append(f"  {c.status:4s} {c.name}: expected {c.expected}; got {c.actual}")
    return out


def _cmd_verify(args) -> int:
    ctx = _parse_q(args.q)
    a = _parse_a(ctx, args.a)
    pair = build_pair(args.n, ctx, a, force=args.force)
    reports = []
    if args.suite in ("structural", "all"):
        reports.append(verify_structural(pair, forced=args.force))
    if args.suite in ("case", "all"):
        if pair.tag.case == "A":
            reports.append(verify_caseA_identities(pair, forced=args.force))
        else:
            reports.append(verify_caseB_identities(pair, forced=args.force))
    if args.claims:
        reports.append(verify_order_claims(load_claims()))
    ok = all(r.ok for r in reports)
    doc = {
        "command": "verify",
        "params": {**_pair_params(args, ctx, a), "suite": args.suite,
                   "claims": bool(args.claims)},
        "ok": ok,
        "reports": [r.to_json() for r in reports],
    }
    lines = []
    for r in reports:
        lines.extend(_report_lines(r))
    _emit(doc, "\n".join(lines), args)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_certify(args) -> int:
    ctx = _parse_q(args.q)
    a = _parse_a(ctx, args.a)
    pair = build_pair(args.n, ctx, a, force=args.force)
    result = certify_generation(
        pair,
        restrict_to_s9=args.restrict_s9,
        seed=args.seed,
        budget_seconds=args.budget,
        backend=args.backend,
    )
    doc = {
        "command": "certify",
        "params": {**_pair_params(args, ctx, a),
                   "restrict_s9": bool(args.restrict_s9),
                   "seed": resolved_seed(args.seed)},
        "certificate": result.to_json(),
    }
    text = (f"verdict {result.verdict}: order {result.computed_order} "
            f"vs target {result.target_order} "
            f"({result.base_size} base points, orbits {list(result.orbit_sizes)})")
    _emit(doc, text, args)
    if result.verdict == "Generates":
        return EXIT_OK
    if result.verdict == "ProperSubgroup":
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE


def _cmd_search_a(args) -> int:
    ctx = _parse_q(args.q)
    found = search_a(args.n, ctx, all=True)
    dflt = default_a(args.n, ctx)
    doc = {
        "command": "search-a",
        "params": {"n": args.n, "q": ctx.q},
        "field": field_to_json(ctx),
        "values": [elem_to_json(ctx, v._arr()) for v in found.values],
        "count": len(found.values),
        "default": elem_to_json(ctx, dflt._arr()),
        "inequality": {
            "label": found.inequality,
            "lhs": found.lhs,
            "rhs": found.rhs,
            "holds": found.guaranteed,
        },
    }
    text = (f"{len(found.values)} admissible parameter(s); default {doc['default']}; "
            f"{found.inequality}: {found.lhs} > {found.rhs} is {found.guaranteed}")
    _emit(doc, text, args)
    return EXIT_OK if found.values else EXIT_FAIL


def _load_matrix(ctx, path: str) -> Matrix:
    raw = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    obj = json.loads(raw)
    if isinstance(obj, dict):
        return Matrix.from_json(ctx, obj)
    return Matrix.from_rows(ctx, [[ctx.coerce(e) for e in row] for row in obj])


def _eps_of_gram(ctx, j: Matrix) -> str:
    n = j.rows
    if n % 2:
        return "circ"
    d = j.det()
    sign = ctx.coerce((-1) ** (n // 2))
    disc = ctx.mul(sign, d)
    return "plus" if is_square(ctx, disc) else "minus"


def _cmd_spinor(args) -> int:
    ctx = _parse_q(args.q)
    g = _load_matrix(ctx, args.matrix)
    if args.gram:
        j = _load_matrix(ctx, args.gram)
        space = OrthoSpace(n=j.rows, ctx=ctx, J=j, eps=_eps_of_gram(ctx, j))
    else:
        tag = classify(g.rows)
        space = gram_matrix(tag.case, g.rows, ctx)
    if g.rows != space.n or g.cols != space.n:
        raise FormsError(
            f"matrix is {g.rows}x{g.cols}, Gram is {space.n}x{space.n}")
    if not is_isometry(space, g):
        raise FormsError("matrix does not preserve the form; "
                         "spinor norm is undefined")
    theta = spinor_norm(space, g)
    member = in_omega(space, g)
    doc = {
        "command": "spinor",
        "params": {"q": ctx.q, "n": space.n,
                   "gram": "user" if args.gram else "case"},
        "field": field_to_json(ctx),
        "determinant": elem_to_json(ctx, g.det()),
        "spinor_square": theta.square,
        "in_kernel": member.ok,
        "reasons": list(member.reasons),
        "reflection_count": len(reflection_decomposition(space, g)),
    }
    text = (f"spinor class {'trivial' if theta.square else 'nontrivial'}; "
            f"det {doc['determinant']}; kernel member: {member.ok}")
    _emit(doc, text, args)
    return EXIT_OK


def _batched_dets(mats: np.ndarray, p: int) -> np.ndarray:
    n = mats.shape[1]
    if n == 1:
        return mats[:, 0, 0] % p
    if n == 2:
        return (mats[:, 0, 0] * mats[:, 1, 1]
                - mats[:, 0, 1] * mats[:, 1, 0]) % p
    if n == 3:
        a = mats
        return (
            a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
            - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
            + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])
        ) % p
    raise FormsError("brute-force enumeration supports n <= 3 only")


def _enumerate_so(ctx, n: int):
    """All determinant-one isometries of the identity form, batched."""
    if ctx.f != 1:
        raise FormsError("brute-force enumeration supports prime fields only")
    p = ctx.p
    total = p ** (n * n)
    if total > 10 ** 8:
        raise FormsError(f"q^(n^2) = {total} exceeds the enumeration cap")
    out = []
    chunk = 1 << 15
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((idx.size, n * n), dtype=np.int64)
        t = idx.copy()
        for k in range(n * n):
            digits[:, k] = t % p
            t //= p
        mats = digits.reshape(-1, n, n)
        gram = np.einsum("mki,mkj->mij", mats, mats) % p
        iso = np.all(gram == np.eye(n, dtype=np.int64), axis=(1, 2))
        det1 = _batched_dets(mats, p) == 1
        for m in mats[iso & det1]:
            out.append(Matrix(ctx, m[:, :, None]))
    return out


def _cmd_oracle(args) -> int:
    ctx = _parse_q(args.q)
    n = args.n
    if args.what == "omega-order":
        if n % 2 == 0:
            raise FormsError("the order oracle enumerates odd dimensions")
        space = OrthoSpace(n=n, ctx=ctx, J=Matrix.identity(ctx, n), eps="circ")
        so = _enumerate_so(ctx, n)
        kernel = [g for g in so if in_omega(space, g).ok]
        formula = omega_order(n, "circ", ctx.q)
        match = len(kernel) == formula
        doc = {
            "command": "oracle",
            "params": {"what": args.what, "n": n, "q": ctx.q},
            "so_order": len(so),
            "omega_order_bruteforce": len(kernel),
            "index": len(so) // max(1, len(kernel)),
            "omega_order_formula": str(formula),
            "match": match,
        }
        text = (f"|SO| = {len(so)}, |kernel| = {len(kernel)} "
                f"(index {doc['index']}); formula {formula}; match {match}")
    else:
        if n % 2:
            raise FormsError("the type oracle classifies even dimensions")
        space = OrthoSpace(n=n, ctx=ctx, J=Matrix.identity(ctx, n), eps="plus")
        count = isotropic_count(space)
        q, m = ctx.q, n // 2
        plus_count = (q ** m - 1) * (q ** (m - 1) + 1)
        minus_count = (q ** m + 1) * (q ** (m - 1) - 1)
        if count == plus_count:
            classified = "plus"
        elif count == minus_count:
            classified = "minus"
        else:
            raise FormsError(f"isotropic count {count} matches neither type")
        formula = witt_type(n, ctx.q)
        match = classified == formula
        doc = {
            "command": "oracle",
            "params": {"what": args.what, "n": n, "q": ctx.q},
            "isotropic_nonzero": count,
            "classified": classified,
            "dispatch": formula,
            "match": match,
        }
        text = (f"{count} nonzero isotropic vectors -> type {classified}; "
                f"dispatch says {formula}; match {match}")
    _emit(doc, text, args)
    return EXIT_OK if doc["match"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> _Parser:
    top = _Parser(prog="omega23",
                  description="involution/order-3 generator toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, with_pair=True):
        if with_pair:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--q", required=True,
                           help="odd prime power, e.g. 3 or 27")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--output", default=None)

    g = sub.add_parser("generate", description="build a generator pair")
    common(g)
    g.add_argument("--a", default=None,
                   help="field element: int, or comma-separated coefficients")
    g.add_argument("--force", action="store_true",
                   help="skip the admissibility screen")
    g.set_defaults(fn=_cmd_generate)

    v = sub.add_parser("verify", description="run identity batteries")
    common(v)
    v.add_argument("--a", default=None)
    v.add_argument("--force", action="store_true")
    v.add_argument("--suite", choices=("structural", "case", "all"),
                   default="all")
    v.add_argument("--claims", action="store_true",
                   help="also run the full order-claims table")
    v.set_defaults(fn=_cmd_verify)

    c = sub.add_parser("certify", description="certify the generated order")
    common(c)
    c.add_argument("--a", default=None)
    c.add_argument("--force", action="store_true")
    c.add_argument("--restrict-s9", action="store_true", dest="restrict_s9")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--budget", type=float, default=None,
                   help="wall-clock budget in seconds")
    c.add_argument("--backend", choices=("auto", "numba", "numpy"),
                   default=None)
    c.set_defaults(fn=_cmd_certify)

    s = sub.add_parser("search-a", description="list admissible parameters")
    common(s)
    s.set_defaults(fn=_cmd_search_a)

    sp = sub.add_parser("spinor", description="spinor norm of a matrix")
    sp.add_argument("--q", required=True)
    sp.add_argument("--matrix", required=True,
                    help="JSON file with the matrix; '-' reads stdin")
    sp.add_argument("--gram", default=None,
                    help="JSON file with a Gram matrix (default: case Gram)")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--output", default=None)
    sp.set_defaults(fn=_cmd_spinor)

    o = sub.add_parser("oracle", description="brute-force cross-checks")
    common(o)
    o.add_argument("--what", choices=("omega-order", "witt-type"),
                   required=True)
    o.set_defaults(fn=_cmd_oracle)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _BUILD_ERRORS as exc:
        _diag(type(exc).__name__, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
