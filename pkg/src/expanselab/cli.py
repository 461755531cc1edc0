"""Command-line front door.

    expanselab construct {P,xbar,dcounts,blocks}
    expanselab classify --window W --kind K --requirement R
    expanselab dual --family F
    expanselab verify {eg1,ex1,periodic,powers,product,conjugacy,inverse-limit,
                       generators,chen,chainmix,syndetic-refutation,extend,all}

Verification suites write one JSON object per claim (JSON lines) and exit
with status 0 iff every claim passed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import combinators as cb
from . import constructions as pc
from . import finite_systems as fs
from . import generators as gen
from .corpus import corpus, default_seed, random_table_system
from .families import WindowSet, classify, dual, max_gap, upward_close
from .sequences import DEFAULT_PRECISION

SUITES = ("eg1", "ex1", "periodic", "powers", "product", "conjugacy", "inverse-limit",
          "generators", "chen", "chainmix", "syndetic-refutation", "extend")


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    horizon: int | None = None
    precision: int = DEFAULT_PRECISION
    delta: list = field(default_factory=list)
    epsilon: list = field(default_factory=list)
    N: int = 10
    m: int = 4
    length: int = 72
    out: str | None = None
    json: bool = False
    literal: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("horizon", "precision", "N", "m", "length"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"--{name} must be positive")
        for v in (*self.delta, *self.epsilon):
            if v <= 0:
                raise ValueError("grid values must be positive")


@dataclass
class Report:
    claim: str
    anchor: str
    passed: bool
    witness: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    runtime: float = 0.0

    def to_json(self) -> dict:
        return {"claim": self.claim, "anchor": self.anchor,
                "verdict": "pass" if self.passed else "fail",
                "witness": _plain(self.witness), "constants": _plain(self.constants),
                "params": _plain(self.params), "runtime": round(self.runtime, 4)}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(u) for u in v]
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "to_json"):
        return v.to_json()
    return v


def _grid(text: str | None) -> list[Fraction]:
    if not text:
        return []
    return [Fraction(t) for t in text.split(",") if t.strip()]


# -- suites ----------------------------------------------------------------

def suite_eg1(cfg: RunConfig) -> list[Report]:
    H = cfg.horizon or 1000
    sys_ = pc.eg1_system(max(cfg.N, 3))
    half, third = sys_.index("1/2"), sys_.index("1/3")
    out = []
    for d in cfg.delta or [Fraction(1, 7), Fraction(1, 12), Fraction(1, 100)]:
        if not 0 < d < Fraction(1, 6):
            continue
        w = cb.finite_window(sys_, half, third, d, H)
        out.append(Report(f"eg1.empty(1/2,1/3,delta={d})", "pair 1/2, 1/3 of the 1/n map",
                          len(w) == 0, {"members": list(w.members[:10])}, params={"N": cfg.N, "H": H}))
    exceptional = {sys_.index(str(p)) for p in pc.EG1_EXCEPTIONAL if str(p) in sys_.points}
    infinite = []
    for x, y in sys_.pairs():
        if x in exceptional or y in exceptional:
            continue
        for d in (Fraction(1, 12), Fraction(1, 100)):
            if not fs.separation_profile(sys_, x, y, d).is_finite:
                infinite.append((sys_.points[x], sys_.points[y], str(d)))
    out.append(Report("eg1.finite-windows", "non-fixed pairs off the exceptional set",
                      not infinite, {"infinite": infinite[:5]}, params={"N": cfg.N}))
    zero = sys_.index("0")
    w = cb.finite_window(sys_, zero, half, Fraction(1, 4), H)
    out.append(Report("eg1.fixed(0,1/2)", "fixed points 0 and 1/2", len(w) == H, params={"H": H}))
    res = fs.positive_expansivity_search(sys_)
    out.append(Report("eg1.not-expansive", "the 1/n map is not positively expansive",
                      res.verdict.refuted, {"pair": list(res.pair or ())}))
    return out


def suite_ex1(cfg: RunConfig) -> list[Report]:
    H = cfg.horizon or 2000
    out = []
    for d in cfg.delta or [Fraction(1, 4)]:
        for c in pc.ex1_claims(d, H, literal=cfg.literal, corrected=True, precision=cfg.precision):
            out.append(Report(c.claim_id, "orbit closure of x-bar", c.passed, c.detail,
                              params={"delta": d, "H": H}))
    return out


def suite_periodic(cfg: RunConfig) -> list[Report]:
    H = cfg.horizon or 1000
    d = (cfg.delta or [Fraction(1, 2)])[0]
    out = []
    for pattern in ("01", "001", "0"):
        sys_ = pc.periodic_closure_system(pattern)
        k = len(pattern)
        bad = []
        for x, y in sys_.pairs():
            w = cb.finite_window(sys_, x, y, d, H)
            v = classify(w, "syndetic", k)
            if not v.consistent:
                bad.append((sys_.points[x], sys_.points[y], v.witness))
        out.append(Report(f"periodic({pattern}).syndetic", "periodic orbit closure",
                          not bad, {"bad": bad[:3], "pairs": sys_.n * (sys_.n - 1) // 2},
                          params={"delta": d, "H": H, "k": k}))
    return out


def _corpus(cfg: RunConfig, **kw):
    return corpus(cfg.seed, **kw)


def _from_check(rep: cb.CheckReport, name: str, anchor: str, params: dict) -> Report:
    return Report(name, anchor, rep.passed, {"failures": rep.failures, "checked": rep.checked},
                  rep.constants, params)


def suite_powers(cfg: RunConfig) -> list[Report]:
    out = []
    A = WindowSet(1, 3, (2, 3))
    Bb = cb.B_backward(A, 2)
    out.append(Report("powers.B_backward({2,3},m=2)", "dilated preimage set",
                      Bb.members == (3, 4, 5, 6), {"B": list(Bb.members)}))
    for s in _corpus(cfg):
        for m in (1, 2, 3):
            rep = cb.power_check(s, m, cfg.delta[0] if cfg.delta else None, cfg.horizon or 40)
            out.append(_from_check(rep, f"powers.{s.name}.m={m}", "powers of f", {"m": m}))
    return out


def suite_product(cfg: RunConfig) -> list[Report]:
    out = []
    pool = _corpus(cfg, n_max=6)
    for a, b in zip(pool, pool[1:]):
        rep = cb.product_check(a, b, horizon=cfg.horizon or 64)
        out.append(_from_check(rep, f"product.{a.name}x{b.name}", "max-metric products", {}))
    return out


def suite_conjugacy(cfg: RunConfig) -> list[Report]:
    out = []
    rng = random.Random(cfg.seed)
    for s in _corpus(cfg):
        perm = list(range(s.n))
        rng.shuffle(perm)
        # relabelled copy, doubled distances, and an unrelated table metric
        other = random_table_system(rng, s.n).dist
        for target in ("relabel", "double", "table"):
            tgt = [[Fraction(0)] * s.n for _ in range(s.n)]
            for i in range(s.n):
                for j in range(s.n):
                    tgt[perm[i]][perm[j]] = {"relabel": s.dist[i][j], "double": 2 * s.dist[i][j],
                                             "table": other[i][j]}[target]
            c = cb.conjugate(s, perm, tgt)
            rep = cb.conjugacy_check(c, cfg.delta[0] if cfg.delta else None, cfg.horizon or 64)
            out.append(_from_check(rep, f"conjugacy.{s.name}.{target}", "conjugate systems",
                                   {"target": target}))
    return out


def suite_inverse_limit(cfg: RunConfig) -> list[Report]:
    il = cb.inverse_limit(fs.four_cycle())
    dbar = il.system.dist[0][1]
    out = [Report("inverse-limit.four_cycle.dbar", "inverse-limit metric", dbar == 3,
                  {"dbar": dbar})]
    for s in _corpus(cfg, invertible=True):
        for d in cfg.delta or [Fraction(1, 2), Fraction(1), Fraction(2)]:
            rep = cb.inverse_limit_check(s, d, cfg.horizon or 40)
            out.append(_from_check(rep, f"inverse-limit.{s.name}.delta={d}", "inverse-limit shift",
                                   {"delta": d}))
    return out


def suite_generators(cfg: RunConfig) -> list[Report]:
    H = min(cfg.horizon or 12, 19)
    out = []
    for s in [fs.four_cycle(), fs.identity_two(), pc.eg1_system(6)] + _corpus(cfg):
        rep = gen.equivalence_suite(s, H)
        out.append(Report(f"generators.{s.name}", "expansivity and generators", rep.passed,
                          rep.to_json(), params={"H": H}))
    return out


def suite_chen(cfg: RunConfig) -> list[Report]:
    out = []
    systems = corpus(cfg.seed, count=5, n_max=6)[-5:]
    for s in systems:
        for eps in cfg.epsilon or [Fraction(1, 2), Fraction(1, 4)]:
            for M in (2, 5):
                try:
                    d = fs.chen_delta_search(s, eps, M)
                    ok, pair = fs.chen_segment_check(s, d, eps, M)
                except fs.NoDeltaFound as exc:
                    d, ok, pair = None, False, str(exc)
                out.append(Report(f"chen.{s.name}.eps={eps}.M={M}", "pseudo-orbit tracking",
                                  ok, {"violation": pair}, {"delta": d}))
    return out


def suite_chainmix(cfg: RunConfig) -> list[Report]:
    out = []
    v = fs.chain_mixing_verdict(fs.four_cycle(), Fraction(1, 2))
    out.append(Report("chainmix.four_cycle", "lengths mod 4 obstruction", v.refuted, v.witness))
    v = fs.chain_mixing_verdict(fs.one_point(), Fraction(1, 2))
    out.append(Report("chainmix.one_point", "singleton", v.consistent, v.witness))
    for s in _corpus(cfg):
        res = fs.positive_expansivity_search(s)
        if not res.expansive:
            continue
        chk = fs.cofinite_expansivity_check(s, res.delta)
        out.append(Report(f"chainmix.cofinite.{s.name}", "chain mixing gives cofinite windows",
                          chk.passed, {"status": chk.status}, {"delta": res.delta}))
    return out


def suite_syndetic(cfg: RunConfig) -> list[Report]:
    H = cfg.horizon or 1000
    grid = cfg.epsilon or [Fraction(1, 1 << j) for j in range(1, 7)]
    out = []
    for kind in ("positively", "negatively"):
        for t in pc.syndetic_refutation_check(None, grid, H, kind=kind):
            ok = t.verdict.refuted and all(classify(t.window, "syndetic", M).refuted
                                           for M in range(1, 101))
            out.append(Report(f"syndetic-refutation.{kind}.eps={t.epsilon}",
                              "asymptotic pairs are never syndetically separated",
                              ok, t.verdict.witness, {"cutoff": t.cutoff}, {"H": H}))
    return out


def suite_extend(cfg: RunConfig) -> list[Report]:
    out = []
    for s in _corpus(cfg):
        for x in range(s.n):
            A = [p for p in range(s.n) if p != x]
            res = fs.positive_expansivity_search(s, points=A)
            if not res.expansive or len(A) < 1:
                continue
            rep = cb.extend_check(s, A, x, res.delta)
            out.append(Report(f"extend.{s.name}.x={s.points[x]}", "finite-complement extension",
                              rep.passed, {"close": rep.close_points, "literal_branch": rep.literal_branch,
                                           "failures": rep.failures}, rep.constants))
    return out


RUNNERS = {"eg1": suite_eg1, "ex1": suite_ex1, "periodic": suite_periodic,
           "powers": suite_powers, "product": suite_product, "conjugacy": suite_conjugacy,
           "inverse-limit": suite_inverse_limit, "generators": suite_generators,
           "chen": suite_chen, "chainmix": suite_chainmix,
           "syndetic-refutation": suite_syndetic, "extend": suite_extend}


def run(cfg: RunConfig) -> tuple[list[Report], int]:
    """Run the named suite (or all of them); status 0 iff every claim passed."""
    names = SUITES if cfg.target == "all" else (cfg.target,)
    reports = []
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        t0 = time.perf_counter()
        batch = RUNNERS[name](cfg)
        dt = (time.perf_counter() - t0) / max(len(batch), 1)
        for r in batch:
            r.runtime = dt
        reports.extend(batch)
    return reports, 0 if all(r.passed for r in reports) else 1


# -- construct / classify / dual ------------------------------------------

def _load_json(text: str):
    p = Path(text)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(text)


def do_construct(cfg: RunConfig) -> str:
    if cfg.target == "P":
        hi = cfg.horizon or 24
        data = {"P": pc.build_P(hi).to_json(), "P_complement": pc.build_P_complement(hi).to_json()}
        return json.dumps(data)
    if cfg.target == "xbar":
        bits = pc.build_xbar(cfg.length).bits
        return json.dumps({"length": cfg.length, "bits": bits}) if cfg.json else bits
    if cfg.target == "dcounts":
        if cfg.json:
            return "\n".join(json.dumps({"m": m, "d_counts": {f"d_{2 * l}": v for l, v in
                                                             sorted(pc.d_counts(m).d_counts.items())}})
                             for m in range(2, cfg.m + 1))
        return pc.ledger_table(cfg.m)
    if cfg.target == "blocks":
        B, C = pc.block_B_C(cfg.m)
        return json.dumps({"m": cfg.m, "B": [B.start, B.stop], "C": [C.start, C.stop]})
    raise ValueError(f"unknown object {cfg.target!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expanselab", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--horizon", type=int)
        p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
        p.add_argument("--delta", type=str, help="comma-separated rationals")
        p.add_argument("--epsilon", type=str, help="comma-separated rationals")
        p.add_argument("--N", type=int, default=10)
        p.add_argument("--m", type=int, default=4)
        p.add_argument("--length", type=int, default=72)
        p.add_argument("--out", type=str)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("construct", help="build a concrete object")
    p.add_argument("target", choices=["P", "xbar", "dcounts", "blocks"])
    common(p)
    p = sub.add_parser("classify", help="classify a window against a family")
    p.add_argument("--window", required=True, help="WindowSet JSON or a path to one")
    p.add_argument("--kind", required=True, choices=["thick", "syndetic", "cofinite"])
    p.add_argument("--requirement", type=int, required=True)
    common(p)
    p = sub.add_parser("dual", help="dual of an explicit family")
    p.add_argument("--family", required=True,
                   help='{"n": n, "subsets": [...]} (closed upward first) or a path')
    common(p)
    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("target", choices=[*SUITES, "all"])
    p.add_argument("--literal", action="store_true",
                   help="also count the unaligned x-bar inclusions (ex1)")
    common(p)
    return ap


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, getattr(args, "target", None), args.horizon, args.precision,
                        _grid(args.delta), _grid(args.epsilon), args.N, args.m, args.length,
                        args.out, args.json, getattr(args, "literal", False), default_seed())
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _dispatch(args, cfg)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, cfg: RunConfig) -> int:
    if args.command == "construct":
        _emit(do_construct(cfg), cfg.out)
        return 0
    if args.command == "classify":
        w = WindowSet.from_json(_load_json(args.window))
        v = classify(w, args.kind, args.requirement)
        extra = {"max_gap": max_gap(w).worst} if len(w) >= 2 else {}
        _emit(json.dumps({**v.to_json(), **extra}), cfg.out)
        return 0
    if args.command == "dual":
        data = _load_json(args.family)
        fam = upward_close(data["subsets"], data["n"])
        _emit(json.dumps(dual(fam).to_json()), cfg.out)
        return 0
    reports, status = run(cfg)
    _emit("\n".join(json.dumps(r.to_json(), sort_keys=True) for r in reports), cfg.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
