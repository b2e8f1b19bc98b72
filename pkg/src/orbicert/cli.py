"""Command-line front end.

Subcommands: rank, suborbits, scan, and a family of verifiers.  Exit code
0 iff every requested certificate verified; the first failed claim is
named on stderr.  Flags only, no environment overrides, so a command line
plus seed reproduces a report byte for byte.

Wire formats used in reports and by the library:

* tensor: a JSON array of 2m integers, row-major with the e1 row first
  (``Tensor.to_json`` / ``Tensor.from_json``); the vertex index of a
  tensor is sum(flat[k] * p^k) over the same flattening;
* suborbit label: ``"zero" | "A" | "B" | "L<k>"`` with k the canonical
  class representative (``SuborbitLabel.token`` / ``SuborbitLabel.parse``);
* report: ``{tool_version, run_config, certificates, summary,
  content_hash}`` with certificates ``{claim, parameters, status,
  evidence, elapsed_ms}``; JSON output normalizes elapsed_ms to 0 so
  identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .certify import (
    Certificate,
    certify_not_digraph_group,
    certify_q17,
    certify_two_closed,
    scan_primes,
)
from .cliques import DEFAULT_SEED, MuConfig, verify_clique_axioms
from .crossratio import check_v4_collineations, verify_table1
from .digraphs import hamming_check, orbital_union_set
from .errors import InvalidConfig, OrbicertError
from .fields import INFINITY, fp_sqrt_minus_one
from .groups import lambda_classes, nontrivial_labels, rank_of, suborbit_indices
from .matrices import num_vertices
from .report import emit_report


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    m: int = 2
    z: int | None = None
    mus: tuple[int, ...] | None = None
    max_prime: int = 500
    seed: int = DEFAULT_SEED
    jobs: int = 1
    fmt: str = "text"
    out: str | None = None

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "p": self.p,
            "m": self.m,
            "z": self.z,
            "mus": list(self.mus) if self.mus else None,
            "max_prime": self.max_prime,
            "seed": self.seed,
            "jobs": self.jobs,
            "format": self.fmt,
        }


def _wrap(claim: str, parameters: dict, payload: dict) -> Certificate:
    return Certificate(claim=claim, parameters=parameters, status="verified", evidence=payload)


def _lemma_registry() -> dict:
    return {
        "hamming-A": "the axis orbital digraph is the Hamming graph H(2, p^m)",
        "hamming-1": "the slope-1 orbital digraph is the Hamming graph H(2, p^m)",
        "hamming-i": "the square-root-of-minus-one orbital digraph is H(2, p^m)",
        "connectivity": "every nontrivial orbital digraph is connected",
        "table1": "the 24 permutations transform the cross-ratio by the classical six values",
        "table3": "the four dihedral collineations induce the double transpositions",
        "clique-axioms": "projection/clique geometry for the configured slopes",
        "suborbit-partition": "the suborbits partition the tensor space",
    }


def run_lemma(name: str, cfg: RunConfig) -> Certificate:
    p, m = cfg.p, cfg.m
    if name in ("hamming-A", "hamming-1", "hamming-i"):
        if p is None:
            raise InvalidConfig("--p required")
        if name == "hamming-A":
            dirs, label = (0, INFINITY), "A"
        elif name == "hamming-1":
            dirs, label = (1, p - 1), "L1"
        else:
            i = fp_sqrt_minus_one(p)
            if i is None:
                raise InvalidConfig(f"p={p} has no square root of -1")
            dirs, label = (i, p - i), f"L{min(i, p - i)}"
        s = orbital_union_set([label], m, p)
        ok = hamming_check(s, dirs[0], dirs[1])
        cert = _wrap(
            f"lemma:{name}",
            {"p": p, "m": m},
            {"label": label, "directions": ["inf" if d is INFINITY else d for d in dirs]},
        )
        cert.status = "verified" if ok else "refuted"
        return cert
    if name == "connectivity":
        if p is None:
            raise InvalidConfig("--p required")
        from .digraphs import is_connected

        results = {}
        for token in nontrivial_labels(p):
            results[token] = bool(is_connected(orbital_union_set([token], m, p)))
        cert = _wrap(f"lemma:{name}", {"p": p, "m": m}, {"connected": results})
        cert.status = "verified" if all(results.values()) else "refuted"
        return cert
    if name == "table1":
        if p is None:
            raise InvalidConfig("--p required")
        return _wrap(f"lemma:{name}", {"p": p}, verify_table1(p))
    if name == "table3":
        if p is None:
            raise InvalidConfig("--p required")
        return _wrap(f"lemma:{name}", {"p": p}, check_v4_collineations(p))
    if name == "clique-axioms":
        if p is None or cfg.mus is None:
            raise InvalidConfig("--p and --mu required")
        mu_cfg = MuConfig(z=len(cfg.mus), mus=cfg.mus, m=m, p=p)
        return _wrap(
            f"lemma:{name}",
            {"p": p, "m": m, "mus": list(cfg.mus), "seed": cfg.seed},
            verify_clique_axioms(mu_cfg, seed=cfg.seed),
        )
    if name == "suborbit-partition":
        if p is None:
            raise InvalidConfig("--p required")
        sizes = {t: int(suborbit_indices(t, m, p).size) for t in nontrivial_labels(p)}
        total = 1 + sum(sizes.values())
        cert = _wrap(
            f"lemma:{name}",
            {"p": p, "m": m},
            {"sizes": sizes, "total_with_zero": total, "vertices": num_vertices(m, p)},
        )
        cert.status = "verified" if total == num_vertices(m, p) else "refuted"
        return cert
    raise InvalidConfig(f"unknown lemma {name!r}; known: {sorted(_lemma_registry())}")


def dispatch(cfg: RunConfig, lemma_name: str | None = None) -> list[Certificate]:
    cmd = cfg.command
    if cmd == "rank":
        if cfg.p is None:
            raise InvalidConfig("--p required")
        r = rank_of(cfg.m, cfg.p)
        cert = _wrap(
            "rank",
            {"p": cfg.p, "m": cfg.m},
            {
                "rank": r,
                "lambda_classes": {
                    str(k): sorted(v) for k, v in lambda_classes(cfg.p).items()
                },
            },
        )
        return [cert]
    if cmd == "suborbits":
        return [run_lemma("suborbit-partition", cfg)]
    if cmd == "scan":
        return [scan_primes(cfg.max_prime)]
    if cmd == "two-closed":
        if cfg.p is None:
            raise InvalidConfig("--p required")
        return [certify_two_closed(cfg.p, cfg.m, seed=cfg.seed)]
    if cmd in ("theorem-q5", "theorem-q7", "theorem-q13"):
        p = int(cmd.split("q")[1])
        return [certify_not_digraph_group(p, cfg.m, jobs=cfg.jobs)]
    if cmd == "q17":
        return [certify_q17(cfg.m, seed=cfg.seed)]
    if cmd == "cross-ratio-table":
        if cfg.p is None:
            raise InvalidConfig("--p required")
        return [run_lemma("table1", cfg)]
    if cmd == "cliques":
        return [run_lemma("clique-axioms", cfg)]
    if cmd == "lemma":
        return [run_lemma(lemma_name, cfg)]
    raise InvalidConfig(f"unknown command {cmd!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbicert",
        description=(
            "Exact verification certificates for the affine tensor-space "
            "groups and their orbital digraphs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", type=int, default=None, help="odd prime modulus")
        sp.add_argument("--m", type=int, default=2, help="dimension of the second factor (>= 2)")
        sp.add_argument("--z", type=int, default=None, help="number of slopes (4 or 6)")
        sp.add_argument("--mu", type=str, default=None, help="comma-separated slopes, e.g. 1,2,3,4")
        sp.add_argument("--max-prime", type=int, default=500)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", type=str, default=None)

    for name in ("rank", "suborbits", "scan"):
        common(sub.add_parser(name))

    verify = sub.add_parser("verify", help="run a verification driver")
    vsub = verify.add_subparsers(dest="verify_command", required=True)
    for name in (
        "two-closed",
        "theorem-q5",
        "theorem-q7",
        "theorem-q13",
        "q17",
        "cross-ratio-table",
        "cliques",
    ):
        common(vsub.add_parser(name))
    lemma = vsub.add_parser("lemma", help="run one named structural check")
    lemma.add_argument("name", type=str, help=f"one of {sorted(_lemma_registry())}")
    common(lemma)
    return parser


def parse_config(argv) -> tuple[RunConfig, str | None]:
    args = build_parser().parse_args(argv)
    command = args.command
    lemma_name = None
    if command == "verify":
        command = args.verify_command
        if command == "lemma":
            lemma_name = args.name
    mus = None
    if getattr(args, "mu", None):
        mus = tuple(int(v) for v in args.mu.split(","))
        if args.z is not None and args.z != len(mus):
            raise InvalidConfig("--z disagrees with the number of --mu slopes")
        if len(mus) not in (4, 6):
            raise InvalidConfig("--mu needs 4 or 6 slopes")
    elif getattr(args, "z", None) is not None:
        raise InvalidConfig("--z given without --mu")
    cfg = RunConfig(
        command=command,
        p=args.p,
        m=args.m,
        z=len(mus) if mus else None,
        mus=mus,
        max_prime=args.max_prime,
        seed=args.seed,
        jobs=args.jobs,
        fmt=args.format,
        out=args.out,
    )
    if cfg.m < 2:
        raise InvalidConfig("m must be at least 2")
    return cfg, lemma_name


def main(argv=None) -> int:
    try:
        cfg, lemma_name = parse_config(argv)
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        certs = dispatch(cfg, lemma_name)
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OrbicertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = emit_report(certs, cfg.fmt, cfg.as_dict())
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    failed = [c for c in certs if c.status != "verified"]
    if failed:
        print(f"FAILED: {failed[0].claim}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
