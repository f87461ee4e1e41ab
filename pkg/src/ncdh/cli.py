"""Command-line operator surface.

Subcommands: params, keygen, exchange, encrypt, decrypt, attack (alg41 /
eigen / det), order, qdet, bench. All state moves through JSON files with
lowercase-hex numeric fields; every randomized subcommand demands an
explicit --seed or --random. Exit codes: 0 success, 1 usage, 2 domain error
(the error class name goes to stderr).
"""

import argparse
import json
import os
import random
import sys

import numpy as np

from . import _backend
from .attacks import (
    CommutativeInstance,
    conjugation_table_attack,
    determinant_reduction,
    eigenvalue_attack,
    power_determinant_scan,
    random_commutative_instance,
    report_to_dict,
)
from .errors import NcdhError
from .field import Fp
from .ncmatrix import SquareMatrix, nc_determinant, quasideterminant
from .platform import PlatformMatrix, element_order, unit_group_order, warmup_backend
from .protocol import (
    exchange,
    keygen,
    keypair_from_dict,
    keypair_to_dict,
    params_from_dict,
    params_to_dict,
    read_json,
    setup,
    token_from_dict,
    token_to_dict,
    write_json,
)
from .encryption import (
    hybrid_decrypt,
    hybrid_encrypt,
    hybrid_from_dict,
    hybrid_to_dict,
    textbook_decrypt,
    textbook_encrypt,
    textbook_from_dict,
    textbook_to_dict,
)
from .s3 import GroupAlgebra


def _hex(v: int) -> str:
    return format(int(v), "x")


def _unhex(s: str) -> int:
    return int(s, 16)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if getattr(args, "random", False):
        seed = int.from_bytes(os.urandom(8), "big")
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    raise SystemExit2("a randomized subcommand needs --seed or --random")


class SystemExit2(NcdhError):
    """Usage-level failure raised after parsing (mapped to exit 1)."""


def _write_matrix_file(path: str, p: int, m: PlatformMatrix) -> None:
    write_json(path, {"p": _hex(p), "m": m.to_hex_list()})


def _read_matrix_file(path: str) -> tuple[int, PlatformMatrix]:
    d = read_json(path)
    p = _unhex(d["p"])
    return p, PlatformMatrix.from_hex_list(d["m"], p)


def _read_instance_file(path: str) -> CommutativeInstance:
    d = read_json(path)
    p = _unhex(d["p"])

    def mat(key):
        vals = [_unhex(s) for s in d[key]]
        return np.array(vals, dtype=np.int64).reshape(2, 2)

    return CommutativeInstance.build(p, mat("x"), mat("ya"), mat("yb"))


def _instance_to_dict(inst: CommutativeInstance) -> dict:
    def hexlist(m):
        return [_hex(v) for v in np.asarray(m).reshape(-1)]

    return {
        "p": _hex(inst.p),
        "x": hexlist(inst.x),
        "ya": hexlist(inst.token_a),
        "yb": hexlist(inst.token_b),
    }


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- subcommand handlers -------------------------------------------------------

def cmd_params(args) -> int:
    seed = _resolve_seed(args)
    params = setup(
        args.p,
        seed,
        steps=args.steps,
        min_order=args.min_order,
        max_order=args.max_order,
        context=args.context,
    )
    write_json(args.out, params_to_dict(params))
    print(f"params written to {args.out} (n = {params.n})")
    return 0


def cmd_keygen(args) -> int:
    params = params_from_dict(read_json(args.params))
    seed = _resolve_seed(args)
    kp = keygen(params, random.Random(seed))
    write_json(args.out, keypair_to_dict(params, kp), private=True)
    print(f"keypair written to {args.out}")
    if args.token_out:
        write_json(args.token_out, token_to_dict(params.p, kp.Y))
        print(f"public token written to {args.token_out}")
    return 0


def cmd_exchange(args) -> int:
    params = params_from_dict(read_json(args.params))
    result = exchange(params, args.seed_a, args.seed_b)
    key_a = result.alice_secret.key.hex()
    key_b = result.bob_secret.key.hex()
    print(key_a)
    print(key_b)
    if key_a != key_b or result.alice_secret.K != result.bob_secret.K:
        raise AssertionError("exchange completeness violated")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        write_json(os.path.join(args.out_dir, "ya.json"), token_to_dict(params.p, result.alice.Y))
        write_json(os.path.join(args.out_dir, "yb.json"), token_to_dict(params.p, result.bob.Y))
        key_path = os.path.join(args.out_dir, "key.hex")
        fd = os.open(key_path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "w") as fh:
            fh.write(key_a + "\n")
        print(f"transcript written to {args.out_dir}", file=sys.stderr)
    return 0


def cmd_encrypt(args) -> int:
    params = params_from_dict(read_json(args.params))
    _, token = token_from_dict(read_json(args.to), params.p)
    rng = random.Random(_resolve_seed(args))
    if args.textbook:
        if not args.matrix:
            raise SystemExit2("--textbook needs --matrix with the message matrix file")
        mp, message = _read_matrix_file(args.matrix)
        if mp != params.p:
            raise SystemExit2("message matrix modulus does not match params")
        ct = textbook_encrypt(params, token, message, rng)
        write_json(args.out, textbook_to_dict(ct))
    else:
        if not args.infile:
            raise SystemExit2("hybrid encryption needs --in with the message bytes")
        with open(args.infile, "rb") as fh:
            message = fh.read()
        ct = hybrid_encrypt(params, token, message, rng)
        write_json(args.out, hybrid_to_dict(ct))
    print(f"ciphertext written to {args.out}")
    return 0


def cmd_decrypt(args) -> int:
    params, kp = keypair_from_dict(read_json(args.key))
    d = read_json(args.infile)
    if args.textbook:
        ct = textbook_from_dict(d, params.p)
        message = textbook_decrypt(kp, ct)
        _write_matrix_file(args.out, params.p, message)
    else:
        ct = hybrid_from_dict(d, params.p)
        plain = hybrid_decrypt(kp, ct)
        with open(args.out, "wb") as fh:
            fh.write(plain)
    print(f"plaintext written to {args.out}")
    return 0


def cmd_attack_alg41(args) -> int:
    params = params_from_dict(read_json(args.params))
    _, ya = token_from_dict(read_json(args.ya), params.p)
    _, yb = token_from_dict(read_json(args.yb), params.p)
    warmup_backend()
    report = conjugation_table_attack(
        params, ya, yb, mode=args.mode, threads=args.threads
    )
    d = report_to_dict(report)
    from .protocol import kdf

    d["key"] = kdf(report.recovered_key).hex()
    _emit(args, d)
    return 0


def _load_or_generate_instance(args):
    if args.instance:
        return _read_instance_file(args.instance), None
    if not args.random:
        raise SystemExit2("provide --instance FILE, or --random with --p and --seed")
    if args.p is None:
        raise SystemExit2("--random needs --p")
    rng = random.Random(_resolve_seed(args))
    inst, a, b, honest = random_commutative_instance(rng, args.p, nonsplit=args.nonsplit or None)
    return inst, (a, honest)


def cmd_attack_eigen(args) -> int:
    inst, secrets = _load_or_generate_instance(args)
    report = eigenvalue_attack(inst)
    d = report_to_dict(report)
    if secrets is not None:
        a, honest = secrets
        d["true_a"] = _hex(a)
        d["honest_key_matches"] = bool(np.array_equal(report.recovered_key, honest))
        d["instance"] = _instance_to_dict(inst)
    _emit(args, d)
    return 0


def cmd_attack_det(args) -> int:
    inst, secrets = _load_or_generate_instance(args)
    cong = determinant_reduction(inst)
    d = {"residue": _hex(cong.residue), "modulus": _hex(cong.modulus)}
    if secrets is not None:
        a, _ = secrets
        d["true_a"] = _hex(a)
        d["congruence_holds"] = a % cong.modulus == cong.residue
        d["instance"] = _instance_to_dict(inst)
    _emit(args, d)
    return 0


def cmd_order(args) -> int:
    if args.group:
        if args.p is None:
            raise SystemExit2("--group needs --p")
        print(unit_group_order(args.p))
        return 0
    if args.params:
        params = params_from_dict(read_json(args.params))
        print(element_order(params.X))
        return 0
    if args.matrix:
        _, m = _read_matrix_file(args.matrix)
        print(element_order(m))
        return 0
    raise SystemExit2("order needs --group, --params or --matrix")


def _read_qdet_matrix(path: str) -> SquareMatrix:
    d = read_json(path)
    p = _unhex(d["p"])
    n = int(d["n"])
    entries = d["entries"]
    if len(entries) != n * n:
        raise SystemExit2(f"expected {n * n} entries, got {len(entries)}")
    ring_name = d.get("ring", "fp")
    if ring_name == "fp":
        ring = Fp(p)
        elems = [ring(_unhex(e)) for e in entries]
    elif ring_name == "fps3":
        ring = GroupAlgebra(p)
        elems = [ring.element([_unhex(c) for c in e]) for e in entries]
    else:
        raise SystemExit2(f"unknown ring {ring_name!r}; expected fp or fps3")
    rows = tuple(tuple(elems[i * n + j] for j in range(n)) for i in range(n))
    return SquareMatrix(rows, ring)


def _element_payload(value) -> object:
    if hasattr(value, "coeffs"):
        return [_hex(c) for c in value.coeffs]
    return _hex(int(value))


def cmd_qdet(args) -> int:
    m = _read_qdet_matrix(args.matrix)
    if args.pos is not None:
        i, j = args.pos
        value = quasideterminant(m, i, j)
        _emit(args, {"kind": "quasideterminant", "i": i, "j": j, "value": _element_payload(value)})
        return 0
    row_order = [int(v) for v in args.row_order.split(",")] if args.row_order else None
    col_order = [int(v) for v in args.col_order.split(",")] if args.col_order else None
    value = nc_determinant(m, row_order, col_order)
    _emit(args, {"kind": "nc-determinant", "value": _element_payload(value)})
    return 0


def _bench_kernel_comparison(params, token):
    """Time table build + normalized scan under both kernel builds."""
    import time

    from .platform import CONV

    builds = [("numpy", _backend._build_table_np, _backend._scan_normalized_np)]
    if _backend.BACKEND == "numba":
        builds.insert(0, ("numba", _backend._build_table_nb, _backend._scan_normalized_nb))
    p, n = params.p, params.n
    for label, build, scan in builds:
        t0 = time.perf_counter()
        table, hashes = build(params.X.arr, n, p, CONV)
        order = np.argsort(hashes, kind="stable").astype(np.int64)
        scan(token.arr, p, 0, p, True, table, hashes[order], order)
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
        print(f"# kernel-compare p={p} n={n} build+scan[{label}] {elapsed_ms:.3f} ms")


def cmd_bench(args) -> int:
    warmup_backend()
    primes = [int(v) for v in args.p.split(",")]
    modes = ("naive", "normalized") if args.mode == "both" else (args.mode,)
    rows = []
    print(f"# backend={_backend.BACKEND} threads={_backend.thread_count(args.threads)}")
    for p in primes:
        for t in range(args.trials):
            params = setup(
                p,
                seed=args.seed + 1000 * t,
                steps=args.steps,
                min_order=args.min_order,
                max_order=args.max_order,
            )
            result = exchange(params, args.seed + 1000 * t + 1, args.seed + 1000 * t + 2)
            for mode in modes:
                report = conjugation_table_attack(
                    params, result.alice.Y, result.bob.Y, mode=mode, threads=args.threads
                )
                if report.recovered_key != result.alice_secret.K:
                    raise AssertionError("benchmark attack failed to recover the honest key")
                rows.append(
                    (p, params.n, mode, report.ops, report.table_size, report.elapsed_s * 1000.0)
                )
                print(
                    f"# p={p} n={params.n} mode={mode} backend={_backend.BACKEND} "
                    f"ops={report.ops} elapsed_ms={report.elapsed_s * 1000.0:.3f}"
                )
            if t == 0:
                _bench_kernel_comparison(params, result.alice.Y)
    scan = power_determinant_scan(args.scan_p, args.scan_trials, random.Random(args.seed))
    print(
        f"# nc-det power scan: p={args.scan_p} trials={scan.trials} differs={scan.differs} "
        f"rate={scan.differs / scan.trials:.2f}"
    )
    lines = ["p,n,mode,ops,table_size,elapsed_ms"]
    lines += [f"{p},{n},{m},{o},{ts},{ms:.3f}" for p, n, m, o, ts, ms in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"# csv written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncdh",
        description="Conjugation-masked key exchange over 2x2 matrices on F_p[S3], with attacks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None, help="64-bit seed")
        p.add_argument("--random", action="store_true", help="draw a fresh random seed")

    p_params = sub.add_parser("params", help="generate public parameters")
    p_params.add_argument("--p", type=int, required=True)
    add_seed(p_params)
    p_params.add_argument("--steps", type=int, default=8)
    p_params.add_argument("--min-order", type=int, default=1 << 12)
    p_params.add_argument("--max-order", type=int, default=None)
    p_params.add_argument("--context", default="")
    p_params.add_argument("-o", "--out", required=True)
    p_params.set_defaults(func=cmd_params)

    p_keygen = sub.add_parser("keygen", help="generate a keypair against params")
    p_keygen.add_argument("--params", required=True)
    add_seed(p_keygen)
    p_keygen.add_argument("-o", "--out", required=True)
    p_keygen.add_argument("--token-out", default=None)
    p_keygen.set_defaults(func=cmd_keygen)

    p_ex = sub.add_parser("exchange", help="run both sides of one exchange")
    p_ex.add_argument("--params", required=True)
    p_ex.add_argument("--seed-a", type=int, required=True)
    p_ex.add_argument("--seed-b", type=int, required=True)
    p_ex.add_argument("--out-dir", default=None, help="write ya.json, yb.json, key.hex")
    p_ex.set_defaults(func=cmd_exchange)

    p_enc = sub.add_parser("encrypt", help="hybrid (default) or textbook encryption")
    p_enc.add_argument("--params", required=True)
    p_enc.add_argument("--to", required=True, help="recipient token file")
    add_seed(p_enc)
    p_enc.add_argument("--in", dest="infile", default=None, help="message bytes (hybrid)")
    p_enc.add_argument("--textbook", action="store_true")
    p_enc.add_argument("--matrix", default=None, help="message matrix file (textbook)")
    p_enc.add_argument("-o", "--out", required=True)
    p_enc.set_defaults(func=cmd_encrypt)

    p_dec = sub.add_parser("decrypt", help="decrypt with a keypair file")
    p_dec.add_argument("--key", required=True)
    p_dec.add_argument("--in", dest="infile", required=True)
    p_dec.add_argument("--textbook", action="store_true")
    p_dec.add_argument("-o", "--out", required=True)
    p_dec.set_defaults(func=cmd_decrypt)

    p_attack = sub.add_parser("attack", help="cryptanalysis")
    attack_sub = p_attack.add_subparsers(dest="attack_kind", required=True)

    p_a41 = attack_sub.add_parser("alg41", help="table attack on the platform group")
    p_a41.add_argument("--params", required=True)
    p_a41.add_argument("--ya", required=True)
    p_a41.add_argument("--yb", required=True)
    p_a41.add_argument("--mode", choices=("naive", "normalized"), default="normalized")
    p_a41.add_argument("--threads", type=int, default=None)
    p_a41.add_argument("-o", "--out", default=None)
    p_a41.set_defaults(func=cmd_attack_alg41)

    for name, handler, help_text in (
        ("eigen", cmd_attack_eigen, "eigenvalue reduction on a commutative 2x2 instance"),
        ("det", cmd_attack_det, "determinant congruence on a commutative 2x2 instance"),
    ):
        sp = attack_sub.add_parser(name, help=help_text)
        sp.add_argument("--instance", default=None, help="instance file {p, x, ya, yb}")
        sp.add_argument("--p", type=int, default=None)
        add_seed(sp)
        sp.add_argument("--nonsplit", action="store_true", help="force F_p^2 eigenvalues (--random)")
        sp.add_argument("-o", "--out", default=None)
        sp.set_defaults(func=handler)

    p_order = sub.add_parser("order", help="element order or platform group order")
    p_order.add_argument("--group", action="store_true")
    p_order.add_argument("--p", type=int, default=None)
    p_order.add_argument("--params", default=None)
    p_order.add_argument("--matrix", default=None)
    p_order.set_defaults(func=cmd_order)

    p_qdet = sub.add_parser("qdet", help="quasideterminant / nc-determinant of a matrix file")
    p_qdet.add_argument("--matrix", required=True)
    p_qdet.add_argument("--pos", type=int, nargs=2, default=None, metavar=("I", "J"))
    p_qdet.add_argument("--row-order", default=None)
    p_qdet.add_argument("--col-order", default=None)
    p_qdet.add_argument("-o", "--out", default=None)
    p_qdet.set_defaults(func=cmd_qdet)

    p_bench = sub.add_parser("bench", help="attack cost benchmark (CSV)")
    p_bench.add_argument("--p", default="31,61")
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.add_argument("--trials", type=int, default=3)
    p_bench.add_argument("--steps", type=int, default=6)
    p_bench.add_argument("--min-order", type=int, default=64)
    p_bench.add_argument("--max-order", type=int, default=1 << 14)
    p_bench.add_argument("--mode", choices=("naive", "normalized", "both"), default="both")
    p_bench.add_argument("--threads", type=int, default=None)
    p_bench.add_argument("--scan-p", type=int, default=101)
    p_bench.add_argument("--scan-trials", type=int, default=100)
    p_bench.add_argument("-o", "--out", default=None)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NcdhError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
