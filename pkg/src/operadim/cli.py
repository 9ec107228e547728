"""Command-line front end with a resumable JSON-lines result cache.

Commands: dim, certify, dual, gk, linearize, presets.  Every rank computation
is keyed by (operad, degree, prime) in an append-only cache file so that
long multi-prime certifications can be killed and resumed; a recomputation
that disagrees with the cache aborts loudly rather than guessing which value
to trust.

Exit codes: 0 success/certified, 1 usage or input errors, 2 defect found
(for `gk` this is the interesting outcome: the operad is not Koszul),
3 certification did not reach the `certified` verdict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence

from .certify import certify_rank, is_prime_u63, probe_prime
from .consequences import SparseRowMatrix, dump_matrix, expand_consequences
from .dual import dual_relations
from .identities import (
    Identity,
    IdentityError,
    format_identity,
    linearize,
    parse_identity,
    parse_identity_file,
    preset,
    preset_names,
    validate_multilinear,
)
from .modlinalg import PrimeField, rank_mod_p
from .monomials import dim_free
from .series import gk_defect, poincare

DEFAULT_CACHE = ".operad-cache.jsonl"
CACHE_ENV_VAR = "OPERADIM_CACHE"
DEGREE_GUARDRAIL = 6

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEFECT = 2
EXIT_UNCERTIFIED = 3


class CliError(Exception):
    """Input or environment problem reported to the user; exits with status 1."""


class CacheConflictError(CliError):
    pass


# --- result cache ------------------------------------------------------------

@dataclass(frozen=True)
class RunRecord:
    operad: str
    degree: int
    prime: int
    monomial_count: int
    row_count: int
    rank: int
    dim: int
    wall_time_ms: float
    timestamp: str

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.operad, self.degree, self.prime)


class ResultCache:
    """Append-only JSONL store of RunRecords, keyed by (operad, degree, prime)."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._records: dict[tuple[str, int, int], RunRecord] = {}
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = RunRecord(**json.loads(line))
                    except (TypeError, ValueError) as exc:
                        raise CliError(
                            f"corrupt cache line {lineno} in {path}: {exc}"
                        ) from exc
                    self._check_conflict(rec)
                    self._records[rec.key] = rec

    def _check_conflict(self, rec: RunRecord) -> None:
        old = self._records.get(rec.key)
        if old is not None and old.rank != rec.rank:
            raise CacheConflictError(
                f"cache conflict for {rec.key}: cached rank {old.rank} vs "
                f"recomputed rank {rec.rank}; refusing to continue"
            )

    def get(self, operad: str, degree: int, prime: int) -> Optional[RunRecord]:
        with self._lock:
            return self._records.get((operad, degree, prime))

    def put(self, rec: RunRecord) -> None:
        with self._lock:
            self._check_conflict(rec)
            if rec.key in self._records:
                return  # identical result already stored; keep append-only file lean
            self._records[rec.key] = rec
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(rec)) + "\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# --- shared plumbing ---------------------------------------------------------

def _load_operad(args: argparse.Namespace) -> tuple[str, list[Identity]]:
    """Resolve --preset/--identities into a cache key and an identity list."""
    if getattr(args, "preset", None):
        return args.preset, list(preset(args.preset).identities)
    path = getattr(args, "identities", None)
    if not path:
        raise CliError("one of --preset or --identities is required")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read identity file: {exc}") from exc
    ids = parse_identity_file(text)
    if not ids:
        raise CliError(f"no identities found in {path}")
    for ident in ids:
        report = validate_multilinear(ident)
        if not report.ok:
            raise CliError(
                f"identity '{format_identity(ident)}' is {report}; "
                "run `operadim linearize` on it first"
            )
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return f"file:{digest}", ids


def _resolve_prime(spec: str, from_preset: bool) -> int:
    if spec == "auto":
        return probe_prime()
    try:
        p = int(spec)
    except ValueError:
        raise CliError(f"--prime must be 'auto' or an integer, got {spec!r}") from None
    if not 2 <= p < 1 << 63 or not is_prime_u63(p):
        raise CliError(f"{p} is not a prime in [2, 2^63)")
    if p == 2 and from_preset:
        print(
            "warning: the preset operads are not quadratic in characteristic 2; "
            "mod-2 dimensions are computed as requested but have no "
            "characteristic-0 meaning",
            file=sys.stderr,
        )
    return p


def _check_guardrail(n: int, args: argparse.Namespace) -> None:
    if n > DEGREE_GUARDRAIL and not args.i_know_this_is_huge:
        raise CliError(
            f"degree {n} means up to {dim_free(n)} columns; pass "
            "--i-know-this-is-huge to proceed"
        )


def _build_matrix(ids: Sequence[Identity], n: int) -> SparseRowMatrix:
    return expand_consequences([i for i in ids if i.degree <= n], n)


def _computed_dim(
    operad: str,
    ids: Sequence[Identity],
    n: int,
    p: int,
    cache: ResultCache,
    matrix: SparseRowMatrix | None = None,
) -> RunRecord:
    cached = cache.get(operad, n, p)
    if cached is not None:
        return cached
    if matrix is None:
        matrix = _build_matrix(ids, n)
    t0 = time.perf_counter()
    rank = rank_mod_p(matrix, PrimeField(p))
    ms = (time.perf_counter() - t0) * 1000.0
    rec = RunRecord(
        operad=operad,
        degree=n,
        prime=p,
        monomial_count=dim_free(n),
        row_count=matrix.n_rows,
        rank=rank,
        dim=dim_free(n) - rank,
        wall_time_ms=round(ms, 3),
        timestamp=_now(),
    )
    cache.put(rec)
    return rec


def _emit(args: argparse.Namespace, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


# --- commands ----------------------------------------------------------------

def cmd_dim(args: argparse.Namespace) -> int:
    operad, ids = _load_operad(args)
    n = args.degree
    _check_guardrail(n, args)
    p = _resolve_prime(args.prime, from_preset=bool(args.preset))
    matrix = _build_matrix(ids, n)
    if args.dump_matrix:
        dump_matrix(matrix, args.dump_matrix)
    rec = _computed_dim(operad, ids, n, p, ResultCache(args.cache), matrix)
    payload = {"record": asdict(rec), "certified": False}
    human = "\n".join(
        [
            f"operad     {operad}",
            f"degree     {n}",
            f"prime      {p}",
            f"monomials  {rec.monomial_count}",
            f"rows       {rec.row_count}",
            f"rank       {rec.rank}",
            f"dim        {rec.dim}   (mod p; uncertified upper bound for char 0)",
        ]
    )
    _emit(args, payload, human)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    operad, ids = _load_operad(args)
    n = args.degree
    _check_guardrail(n, args)
    cache = ResultCache(args.cache)
    matrix = _build_matrix(ids, n)
    if args.dump_matrix:
        dump_matrix(matrix, args.dump_matrix)

    def rank_fn(m: SparseRowMatrix, p: int) -> int:
        return _computed_dim(operad, ids, n, p, cache, m).rank

    # pre-compute the non-probe primes in parallel so certify_rank only reads
    # memoized results; the probe must come first since it fixes the prime set
    if matrix.n_rows > 0:
        from .certify import select_primes

        r = rank_fn(matrix, probe_prime())
        corank = matrix.n_cols - r
        planned = select_primes(corank) if corank > 0 else ()
        rest = [p for p in planned if cache.get(operad, n, p) is None]
        if rest and args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                list(pool.map(lambda p: rank_fn(matrix, p), rest))

    cert = certify_rank(matrix, rank_fn)
    dim = dim_free(n) - cert.r
    payload = {
        "operad": operad,
        "degree": n,
        "dim": dim,
        "certificate": json.loads(cert.to_json()),
    }
    lines = [
        f"operad     {operad}",
        f"degree     {n}",
        f"rank       {cert.r}",
        f"dim        {dim}",
        f"verdict    {cert.verdict}",
        f"primes     {len(cert.primes)}",
    ]
    for p, rk in zip(cert.primes, cert.ranks):
        lines.append(f"  p = {p}: rank {rk}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if cert.verdict == "certified" else EXIT_UNCERTIFIED


def cmd_dual(args: argparse.Namespace) -> int:
    operad, ids = _load_operad(args)
    duals = dual_relations(ids)
    payload = {
        "operad": operad,
        "dual_identities": [format_identity(i) for i in duals],
    }
    human = "\n".join(format_identity(i) for i in duals) or "(no relations)"
    _emit(args, payload, human)
    return EXIT_OK


def _dual_dims(duals: Sequence[Identity], n_max: int, p: int,
               operad: str, cache: ResultCache) -> list[int]:
    """Dual dimension sequence through n_max; zeros persist once reached."""
    dims = []
    for n in range(1, n_max + 1):
        if dims and dims[-1] == 0:
            dims.append(0)  # the dual operads are nilpotent: 0 stays 0
            continue
        dims.append(_computed_dim(f"{operad}!", duals, n, p, cache).dim)
    return dims


def cmd_gk(args: argparse.Namespace) -> int:
    operad, ids = _load_operad(args)
    n_max = args.max_degree
    _check_guardrail(n_max, args)
    p = _resolve_prime(args.prime, from_preset=bool(args.preset))
    cache = ResultCache(args.cache)
    dims = [_computed_dim(operad, ids, n, p, cache).dim for n in range(1, n_max + 1)]
    duals = dual_relations(ids)
    dual_dims = _dual_dims(duals, n_max, p, operad, cache)
    g = poincare(dims, n_max)
    g_dual = poincare(dual_dims, n_max)
    defect = gk_defect(g, g_dual, n_max)
    witness = defect.first_nonzero()
    payload = {
        "operad": operad,
        "max_degree": n_max,
        "dims": dims,
        "dual_dims": dual_dims,
        "g": [str(c) for c in g.coefficients],
        "g_dual": [str(c) for c in g_dual.coefficients],
        "defect": [str(c) for c in defect.coefficients],
        "koszul_refuted": witness is not None,
    }
    lines = [
        f"operad      {operad}",
        f"dims        {dims}",
        f"dual dims   {dual_dims}",
        f"g_P         {g}",
        f"g_P!        {g_dual}",
        f"defect      {defect}",
    ]
    if witness is None:
        lines.append(f"no defect through degree {n_max} (Koszulity NOT implied)")
    else:
        deg, coef = witness
        lines.append(f"defect found: coefficient {coef} at x^{deg} — not Koszul")
    _emit(args, payload, "\n".join(lines))
    return EXIT_DEFECT if witness is not None else EXIT_OK


def cmd_linearize(args: argparse.Namespace) -> int:
    ident = parse_identity(args.identity)
    report = validate_multilinear(ident)
    if report.ok:
        raise CliError("identity is already multilinear")
    result = linearize(ident)
    payload = {
        "input": format_identity(ident),
        "linearized": format_identity(result),
    }
    _emit(args, payload, format_identity(result))
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    table = {
        name: [format_identity(i) for i in preset(name).identities]
        for name in preset_names()
    }
    if args.json:
        print(json.dumps(table, indent=2))
    else:
        for name, idents in table.items():
            print(name)
            for text in idents:
                print(f"  {text}")
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_operad_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=preset_names())
    p.add_argument("--identities", metavar="FILE",
                   help="identity file, one identity per line")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache", default=os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE),
                   help=f"JSONL result cache (default {DEFAULT_CACHE}, "
                        f"env {CACHE_ENV_VAR})")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker threads for per-prime ranks")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--i-know-this-is-huge", action="store_true",
                   help=f"allow degrees above {DEGREE_GUARDRAIL}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="operadim",
                     description="dimension sequences and Koszulity tests for "
                                 "quadratic operads")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dim = sub.add_parser("dim", help="operad dimension at one degree, one prime")
    _add_operad_flags(p_dim)
    p_dim.add_argument("--degree", type=int, required=True)
    p_dim.add_argument("--prime", default="auto", help="'auto' or an explicit prime")
    p_dim.add_argument("--dump-matrix", metavar="PATH",
                       help="write the consequence matrix as text")
    _add_common_flags(p_dim)
    p_dim.set_defaults(fn=cmd_dim)

    p_cert = sub.add_parser("certify",
                            help="certified characteristic-0 dimension")
    _add_operad_flags(p_cert)
    p_cert.add_argument("--degree", type=int, required=True)
    p_cert.add_argument("--dump-matrix", metavar="PATH")
    _add_common_flags(p_cert)
    p_cert.set_defaults(fn=cmd_certify)

    p_dual = sub.add_parser("dual", help="Koszul dual relations in degree 3")
    _add_operad_flags(p_dual)
    _add_common_flags(p_dual)
    p_dual.set_defaults(fn=cmd_dual)

    p_gk = sub.add_parser("gk", help="Ginzburg-Kapranov series test")
    _add_operad_flags(p_gk)
    p_gk.add_argument("--max-degree", type=int, required=True)
    p_gk.add_argument("--prime", default="auto")
    _add_common_flags(p_gk)
    p_gk.set_defaults(fn=cmd_gk)

    p_lin = sub.add_parser("linearize", help="polarize a non-multilinear identity")
    p_lin.add_argument("identity", help="e.g. '(x*y)*y = x*(y*y)'")
    p_lin.add_argument("--json", action="store_true")
    p_lin.set_defaults(fn=cmd_linearize)

    p_pre = sub.add_parser("presets", help="list built-in operad presets")
    p_pre.add_argument("--json", action="store_true")
    p_pre.set_defaults(fn=cmd_presets)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, IdentityError, KeyError, ValueError, OSError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"operadim: error: {message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
