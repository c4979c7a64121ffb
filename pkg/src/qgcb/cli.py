"""Command-line driver.

Exit codes:
  0  success
  2  configuration or parse error (bad datum, weights, r, inadmissible shape)
  3  truncation error (a computation needs a larger --ht-bound)
  4  invariant violation (a check failed or an internal assertion fired)
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, quasir, tensorcb, wmod
from .rootdata import DatumError, load_datum
from .scalars import LaurentPoly
from .tensorcb import Context, DiamondBasis, InadmissibleError
from .wmod import InvariantError, TruncationError

log = logging.getLogger("qgcb")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3
EXIT_INVARIANT = 4

ALL_CHECKS = ("bar", "lattice", "triangular", "assoc", "positivity", "oracle")
EXTRA_CHECKS = ("relations", "chi")


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    datum: str = "A1"
    weights: list[list[int]] = field(default_factory=list)
    r: int = 0
    ht_bound: int | None = None
    checks: list[str] = field(default_factory=lambda: list(ALL_CHECKS))
    out: str | None = None
    csv: str | None = None
    report: str | None = None
    seed: int = 0
    method: str = "engine"

    def validate(self, rank: int) -> None:
        if self.ht_bound is not None and self.ht_bound < 0:
            raise ConfigError("--ht-bound must be >= 0")
        if not 0 <= self.r <= len(self.weights):
            raise ConfigError(f"r = {self.r} must satisfy 0 <= r <= {len(self.weights)}")
        for lam in self.weights:
            if len(lam) != rank:
                raise ConfigError(f"weight {lam} has {len(lam)} coordinates, datum has rank {rank}")
            if any(x < 0 for x in lam):
                raise ConfigError(f"weight {lam} is not dominant")
        bad = [c for c in self.checks if c not in ALL_CHECKS + EXTRA_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks: {', '.join(bad)}")


def parse_weights(text: str) -> list[list[int]]:
    """'1,1' (rank 1), '1:0,0:1' (components joined by ':'), or a JSON list of lists."""
    text = text.strip()
    if not text:
        return []
    if text.startswith("["):
        try:
            obj = json.loads(text)
            return [[int(x) for x in (w if isinstance(w, list) else [w])] for w in obj]
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cannot parse weights {text!r}: {exc}") from None
    try:
        return [[int(x) for x in part.split(":")] for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse weights {text!r}") from None


def config_from_args(args) -> JobConfig:
    cfg = JobConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} not found")
        if path.suffix == ".toml":
            from .rootdata import _load_toml
            obj = _load_toml(path.read_text())
        else:
            obj = json.loads(path.read_text())
        for k, v in obj.items():
            if not hasattr(cfg, k):
                raise ConfigError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
        if isinstance(cfg.weights, str):
            cfg.weights = parse_weights(cfg.weights)
    for name in ("datum", "r", "ht_bound", "out", "csv", "report", "seed", "method"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "weights", None) is not None:
        cfg.weights = parse_weights(args.weights)
    if getattr(args, "checks", None):
        cfg.checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    return cfg


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def reimport_basis(text: str) -> dict:
    """Parse an exported basis, rebuilding every LaurentPoly, and return the object."""
    obj = json.loads(text)
    for el in obj["basis"]["elements"]:
        el["vector"] = [[lab, LaurentPoly.from_json(c).to_json()] for lab, c in el["vector"]]
    return obj


def basis_csv(db: DiamondBasis) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["element", "weight", "index", "term", "coefficient"])
    for n, el in enumerate(db.to_json()["elements"]):
        idx = " (x) ".join(el["index"])
        wt = " ".join(map(str, el["weight"]))
        for lab, c in el["vector"]:
            w.writerow([n, wt, idx, " (x) ".join(lab), str(LaurentPoly.from_json(c))])
    return buf.getvalue()


def provenance(cfg: JobConfig) -> dict:
    return {"version": __version__, "config": asdict(cfg)}


# ---------------------------------------------------------------------------
# jobs
# ---------------------------------------------------------------------------


def _context(cfg: JobConfig) -> Context:
    try:
        datum = load_datum(cfg.datum)
    except DatumError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate(datum.rank)
    try:
        return Context.build(datum, cfg.method)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def run_compute(cfg: JobConfig) -> tuple[int, dict]:
    ctx = _context(cfg)
    lams = [tuple(w) for w in cfg.weights]
    db = tensorcb.multi_diamond(ctx, lams, cfg.r, cfg.ht_bound)
    failures = tensorcb.triangularity_check(db) + tensorcb.psi_fixed_check(db)
    if failures:
        raise InvariantError("; ".join(failures[:5]))
    doc = provenance(cfg)
    doc["basis"] = db.to_json()
    doc["count"] = len(db)
    text = canonical_dumps(doc)
    if cfg.out:
        atomic_write(cfg.out, text)
        log.info("wrote %d elements to %s", len(db), cfg.out)
    else:
        print(text)
    if cfg.csv:
        atomic_write(cfg.csv, basis_csv(db))
    return EXIT_OK, doc


def _tensor_steps(T):
    if T.kind != "tensor":
        return []
    return _tensor_steps(T.factors[0]) + _tensor_steps(T.factors[1]) + [T]


def _random_vector(rng: random.Random, dim: int):
    return [LaurentPoly({rng.randint(-2, 2): rng.randint(-3, 3)}) for _ in range(dim)]


def _check(name, fn):
    try:
        failures, extra = fn()
    except (InvariantError, AssertionError) as exc:
        failures, extra = [f"invariant error: {exc}"], {}
    out = {"ok": not failures, "failures": failures[:50]}
    out.update(extra)
    return name, out


def run_verify(cfg: JobConfig) -> tuple[int, dict]:
    ctx = _context(cfg)
    lams = [tuple(w) for w in cfg.weights]
    rng = random.Random(cfg.seed)
    log.info("verify seed %d", cfg.seed)
    db = tensorcb.multi_diamond(ctx, lams, cfg.r, cfg.ht_bound)
    T = db.module
    steps = _tensor_steps(T)
    results = {}

    def bar():
        fails = list(tensorcb.psi_fixed_check(db))
        for S in steps:
            fails += wmod.check_bar_fixes_basis(S)
            for beta in S.weights():
                for _ in range(2):
                    v = S.vector(beta, _random_vector(rng, S.dim(beta)))
                    if S.apply_bar(S.apply_bar(v)) != v:
                        fails.append(f"Psi^2 != id on a sampled vector at {beta}")
                    qv = v.scale(LaurentPoly.monomial(1))
                    if S.apply_bar(qv) != S.apply_bar(v).scale(LaurentPoly.monomial(-1)):
                        fails.append(f"Psi not antilinear at {beta}")
        return fails, {"tensor_steps": len(steps)}

    def lattice():
        fails, integral = [], {}
        for S in steps:
            rep = quasir.check_lattice_preservation(ctx.theta, S)
            fails += [json.dumps(v) for v in rep.violations]
            integral.update(rep.to_json()["theta_integral"])
        return fails, {"theta_expansion_integral": integral}

    def triangular():
        return tensorcb.triangularity_check(db) + tensorcb.reduction_check(db), {}

    def assoc():
        if len(lams) != 3:
            return [], {"skipped": "associativity is checked for three factors"}
        leaves = tensorcb.leaf_modules(T)
        try:
            fails = tensorcb.associativity_check(ctx.theta, *leaves)
        except InadmissibleError as exc:
            return [], {"skipped": str(exc)}
        return fails, {}

    def positivity():
        rep = tensorcb.positivity_scan(db, cfg.r)
        fails = rep.violations if rep.mode == "strict" else []
        return fails, {"mode": rep.mode, "observed": rep.violations[:50], "scanned": rep.scanned}

    def oracle():
        fails = []
        if T.kind == "tensor":
            fails += tensorcb.oracle_check(T)
        compared = 0
        for S in steps:
            M, N = S.factors
            if not (N.kind == "highest" or M.kind == "lowest"):
                continue
            for beta in S.weights():
                if quasir.psi_ambient(ctx.theta, S, beta, True) != quasir.psi_generation_ambient(S, beta):
                    fails.append(f"Psi via Theta and via generation differ at {beta}")
                quasir.generation_certificate(S, beta)
                compared += 1
        return fails, {"generation_weights_compared": compared}

    def relations():
        fails = []
        for S in tensorcb.leaf_modules(T) + steps:
            fails += wmod.check_relations(S) + wmod.check_integrability(S)
        return fails, {}

    def chi():
        if cfg.r != 0 or not lams:
            return [], {"skipped": "chi needs r = 0 and at least one factor"}
        rep = tensorcb.chi_embedding(ctx, lams, cfg.ht_bound)
        return rep.failures, {"matched": rep.matched}

    table = {"bar": bar, "lattice": lattice, "triangular": triangular, "assoc": assoc,
             "positivity": positivity, "oracle": oracle, "relations": relations, "chi": chi}
    for name in cfg.checks:
        k, v = _check(name, table[name])
        results[k] = v
        log.info("check %s: %s", k, "pass" if v["ok"] else "FAIL")
    doc = provenance(cfg)
    doc["seed"] = cfg.seed
    doc["checks"] = results
    doc["ok"] = all(v["ok"] for v in results.values())
    text = canonical_dumps(doc)
    if cfg.report:
        atomic_write(cfg.report, text)
    else:
        print(text)
    return (EXIT_OK if doc["ok"] else EXIT_INVARIANT), doc


def run_export_theta(cfg: JobConfig) -> tuple[int, dict]:
    try:
        datum = load_datum(cfg.datum)
    except DatumError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.ht_bound is None or cfg.ht_bound < 0:
        raise ConfigError("theta needs --ht-bound >= 0")
    ctx = Context.build(datum, cfg.method)
    ctx.theta.extend(cfg.ht_bound)
    doc = provenance(cfg)
    doc["theta"] = ctx.theta.to_json()
    text = canonical_dumps(doc)
    if cfg.out:
        atomic_write(cfg.out, text)
    else:
        print(text)
    return EXIT_OK, doc


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qgcb",
        description="Canonical bases of tensor products over quantum groups.",
        epilog="exit codes: 0 ok, 2 config/parse error, 3 truncation error, "
               "4 invariant violation.  QGCB_CACHE_DIR caches B_nu on disk.",
    )
    p.add_argument("--version", action="version", version=f"qgcb {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weights=True):
        sp.add_argument("--config", help="JSON or TOML file with JobConfig keys")
        sp.add_argument("--datum", help="preset (A1, A2, B2, A1^(1)) or JSON/TOML file")
        if weights:
            sp.add_argument("--weights", help="e.g. 1,1 or 1:0,0:1 (components joined by ':')")
            sp.add_argument("--r", type=int, help="number of leading lowest weight factors")
        sp.add_argument("--ht-bound", dest="ht_bound", type=int)
        sp.add_argument("--method", choices=("engine", "rank1", "A2"),
                        help="how B_nu is obtained (default engine)")

    c = sub.add_parser("compute", help="diamond basis of a tensor product")
    common(c)
    c.add_argument("--out")
    c.add_argument("--csv")

    v = sub.add_parser("verify", help="run invariant checks and write a report")
    common(v)
    v.add_argument("--checks", help=f"comma list from {','.join(ALL_CHECKS + EXTRA_CHECKS)}")
    v.add_argument("--report")
    v.add_argument("--seed", type=int)

    t = sub.add_parser("theta", help="export the quasi-R-matrix expansion")
    common(t, weights=False)
    t.add_argument("--out")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        job = {"compute": run_compute, "verify": run_verify, "theta": run_export_theta}[args.command]
        code, _ = job(cfg)
        return code
    except (ConfigError, DatumError, InadmissibleError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(json.dumps({"error": "truncation", "message": str(exc)}), file=sys.stderr)
        return EXIT_TRUNCATION
    except (InvariantError, AssertionError) as exc:
        print(json.dumps({"error": "invariant", "message": str(exc)}), file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
