"""Batch command-line front end.

Exit codes: 0 success, 1 usage or I/O failure, 2 verification failure.
All numeric text output uses 17 significant digits with lowercase
exponents; identical configuration and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import algebra, circuit, decomposition as dec, fock, oracle, zassenhaus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _rng(seed):
    if seed is None:
        env = os.environ.get("ZASSUCC_SEED")
        if env is None:
            raise SystemExit("a seed is required (--seed or ZASSUCC_SEED)")
        seed = int(env)
    return np.random.Generator(np.random.Philox(int(seed)))


def _load_params(path: str, n=None) -> fock.ClusterParams:
    with open(path) as fh:
        return fock.ClusterParams.from_dict(json.load(fh), n=n)


def cmd_algebra_check(args) -> int:
    n = args.blocks
    tol = args.tol
    if args.restricted:
        rep = oracle.build_restricted(fock.ClusterParams(n=n))
        A = {(i, j): rep.A_r(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        B = {k: rep.B_r(k) for k in range(1, n + 1)}
        comm = lambda p, q: p @ q - q @ p
        norm = lambda m: float(np.linalg.norm(m, "fro"))
    else:
        if n > 3:
            print("error: full Fock space capped at 3 blocks; use --restricted",
                  file=sys.stderr)
            return EXIT_USAGE
        modes = fock.default_modes(n)
        A = {(i, j): fock.build_A(i, j, modes)
             for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        B = {k: fock.build_B(k, modes) for k in range(1, n + 1)}
        comm = lambda p, q: p.commutator(q)
        norm = lambda m: m.norm()

    worst = EXIT_OK
    rows = []
    for (i, j), aij in sorted(A.items()):
        for (k, l), akl in sorted(A.items()):
            rows.append((f"[A{i}{j},A{k}{l}]", norm(comm(aij, akl))))
    for i, bi in sorted(B.items()):
        for k, bk in sorted(B.items()):
            if i <= k:
                rows.append((f"[B{i},B{k}]", norm(comm(bi, bk))))
    for (i, j), aij in sorted(A.items()):
        for k, bk in sorted(B.items()):
            expected = None
            if k == i:
                expected = B[j]
            elif k == j:
                expected = B[i]
            lhs = comm(aij, bk)
            resid = norm(lhs - expected) if expected is not None else norm(lhs)
            rows.append((f"[A{i}{j},B{k}]", resid))
    for name, resid in rows:
        print(f"{name} residual={_fmt(resid)}")
        if resid > tol:
            print(f"error: identity {name} violated ({_fmt(resid)} > {_fmt(tol)})",
                  file=sys.stderr)
            worst = EXIT_VERIFY
    return worst


def cmd_nma_check(args) -> int:
    if args.depth < 1:
        print("error: --depth must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.t1_file or args.t2_file:
        if not (args.t1_file and args.t2_file):
            print("error: --t1-file and --t2-file go together", file=sys.stderr)
            return EXIT_USAGE
        try:
            with open(args.t1_file) as fh:
                t1_spec = json.load(fh)
            with open(args.t2_file) as fh:
                t2_spec = json.load(fh)
            modes = fock.ModeIndexing(n_orb=int(t1_spec["n_orb"]), n_occ=int(t1_spec["n_occ"]))
            t1 = fock.build_T1_general(
                {tuple(int(t) for t in k.split(",")): float(v)
                 for k, v in t1_spec["mu"].items()}, modes)
            t2 = fock.build_T2prime_general(
                {tuple(int(t) for t in k.split(",")): float(v)
                 for k, v in t2_spec["mu"].items()}, modes)
        except (OSError, KeyError, ValueError) as exc:
            print(f"error: malformed operator file: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report = algebra.check_nma(t2, t1, depth=args.depth, tol=args.tol)
    else:
        modes = fock.default_modes(args.blocks)
        rng = _rng(args.seed)
        params = _random_params(args.blocks, rng)
        x = fock.build_X(params, modes)
        y = fock.build_Y(params, modes)
        report = algebra.check_nma(x, y, depth=args.depth, tol=args.tol)
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.holds else EXIT_VERIFY


def _random_params(n: int, rng, scale: float = 0.5) -> fock.ClusterParams:
    mu_pair = {(i, j): float(rng.uniform(-scale, scale))
               for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    mu_single = {k: float(rng.uniform(-scale, scale)) for k in range(1, n + 1)}
    return fock.ClusterParams(n=n, mu_pair=mu_pair, mu_single=mu_single)


def cmd_decompose(args) -> int:
    try:
        params = _load_params(args.params)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read params: {exc}", file=sys.stderr)
        return EXIT_USAGE
    plan = dec.decompose(params, method=args.method)
    residual = circuit.circuit_residual(plan, params)
    out = plan.to_dict()
    out["residual"] = residual
    print(json.dumps(out))
    if args.emit_circuit:
        layout = circuit.BlockRegisterLayout.default(params.n)
        text = circuit.export_text(circuit.emit(plan, layout, prune=args.prune),
                                   sign_flip=args.sign_flip)
        with open(args.emit_circuit, "w") as fh:
            fh.write(text)
    if residual > args.tol:
        print(f"error: oracle residual {_fmt(residual)} exceeds tolerance",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_trotter_bench(args) -> int:
    try:
        params = _load_params(args.params)
        k_list = [int(t) for t in args.k.split(",") if t]
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = oracle.trotter_compare(params, k_list, use_restricted=not args.full)
    csv = report.to_csv()
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(csv)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(csv)
    baseline = report.rows[0][1]
    if baseline > args.tol:
        print(f"error: exact-plan baseline {_fmt(baseline)} exceeds tolerance",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_zassenhaus(args) -> int:
    if args.order < 1:
        print("error: --order must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    rng = _rng(args.seed)
    params = _random_params(args.blocks, rng)
    x, y = algebra.from_params(params)
    worst = 0.0
    if args.order >= 2:
        rec = zassenhaus.casas_recursion(x, y, args.order)
        clo = zassenhaus.closed_form(x, y, args.order)
        for n, (a, b) in enumerate(zip(rec.terms, clo.terms), start=1):
            diff = (a - b).norm()
            worst = max(worst, diff)
            print(f"order {n}: |C_n(recursion) - C_n(closed)| = {_fmt(diff)}")
    else:
        print(f"order 1: |C_n(recursion) - C_n(closed)| = {_fmt(0.0)}")
    modes = fock.default_modes(params.n)
    xm = fock.build_X(params, modes)
    ym = fock.build_Y(params, modes)
    _, duhamel_resid = zassenhaus.duhamel_check(xm, ym, quad_order=args.quad_order)
    print(f"duhamel residual = {_fmt(duhamel_resid)}")
    if args.compare and (worst > args.tol or duhamel_resid > args.tol):
        print("error: Zassenhaus cross-checks exceed tolerance", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zassucc",
        description="2D-block unitary pair coupled-cluster Zassenhaus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra-check", help="verify A/B structure constants")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--restricted", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_algebra_check)

    p = sub.add_parser("nma-check", help="test the no-mixed-adjoint property")
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--t1-file")
    p.add_argument("--t2-file")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_nma_check)

    p = sub.add_parser("decompose", help="emit an exact finite factor plan")
    p.add_argument("--params", required=True)
    p.add_argument("--method", choices=("closed", "phi", "star"), default="phi")
    p.add_argument("--emit-circuit")
    p.add_argument("--prune", action="store_true")
    p.add_argument("--sign-flip", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("trotter-bench", help="Trotter error vs the exact plan")
    p.add_argument("--params", required=True)
    p.add_argument("--k", required=True, help="comma-separated step counts")
    p.add_argument("--out")
    p.add_argument("--full", action="store_true", help="use the full Fock space")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_trotter_bench)

    for name in ("zassenhaus", "duhamel-check"):
        p = sub.add_parser(name, help="per-order recursion/closed-form table "
                                      "and the Duhamel residual")
        p.add_argument("--order", type=int, default=8)
        p.add_argument("--blocks", type=int, default=3)
        p.add_argument("--compare", action="store_true")
        p.add_argument("--quad-order", type=int, default=32)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--seed", type=int)
        p.set_defaults(func=cmd_zassenhaus)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(f"error: {exc.code}", file=sys.stderr)
            return EXIT_USAGE
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
