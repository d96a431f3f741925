"""Command-line front end: ``eulermix <subcommand> [options]``.

Exit codes: 0 when every recorded audit passes, 1 on an audit violation, 2 on
bad input (usage errors, unreadable or malformed graphs, invalid parameters).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import corpus as corpus_mod
from . import seeding
from .chain import build
from .explore import exploration_audit, ham_labelling, verify_labelling
from .graph import (
    GOLDEN,
    GadgetSpec,
    format_graph,
    gen_biased_cycle,
    gen_circulant,
    gen_directed_cycle,
    gen_lollipop,
    gen_random_eulerian,
    gen_random_regular,
    gen_torus,
    gen_two_cycle_gadget,
    is_strongly_connected,
    read_graph,
    validate,
)
from .hitting import (
    Trajectory,
    adversarial_collision,
    bound_audit,
    cover_time,
    hitting_times,
    log_factor_sweep,
    moving_target_collision,
)
from .mixing import default_cap, distance_profile, submultiplicativity_audit, threshold_time, thresholds
from .report import ExperimentReport, Verdict, emit
from .sensitivity import cf_expand, return_probability_profile, sensitivity_experiment, sequence_gap
from .spectral import gmt_bound, spectral_profile

log = logging.getLogger("eulermix")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
SUBCOMMANDS = ("validate", "gen", "mix", "spectral", "hit", "explore", "gadget", "dioph", "audit-all")


class InputError(ValueError):
    """Bad user input; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    seed: int = 0
    workers: int = 1
    replicas: int = 10_000
    format: str = "csv"
    out: str | None = None
    graph: str | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "seed": self.seed,
            "replicas": self.replicas,
            "graph": self.graph,
            **{k: v for k, v in self.options.items() if k not in ("func",)},
        }


# ----------------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------------


def _ints(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _alpha(text: str) -> float:
    if text == "golden":
        return GOLDEN
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be 'golden' or a number, got {text!r}") from None
    if not 0.0 <= a < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in [0, 1)")
    return a


def _alphas(text: str) -> list[float]:
    return [_alpha(t) for t in text.split(",") if t]


def _eps(text: str) -> float:
    try:
        e = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < e < 1.0:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return e


def _eps_list(text: str) -> list[float]:
    return [_eps(t) for t in text.split(",") if t]


def _holding(text: str) -> float:
    h = float(text)
    if not 0.0 <= h < 1.0:
        raise argparse.ArgumentTypeError("holding must lie in [0, 1)")
    return h


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--workers", type=_positive, default=argparse.SUPPRESS, help="worker processes")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--out", "--csv", dest="out", default=argparse.SUPPRESS, help="output file")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    source = argparse.ArgumentParser(add_help=False)
    grp = source.add_mutually_exclusive_group(required=True)
    grp.add_argument("--graph", help="graph file in the eul text format")
    grp.add_argument("--gen", help="generator spec such as random:n=10,m=30,seed=1")
    source.add_argument("--holding", type=_holding, default=None, help="laziness (default: file value or 1/2)")
    source.add_argument("--dump-kernel", metavar="FILE", help="write the dense kernel as text")

    replicas = argparse.ArgumentParser(add_help=False)
    replicas.add_argument("--replicas", type=_positive, default=10_000)

    p = argparse.ArgumentParser(prog="eulermix", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("validate", parents=[common], help="check Eulerian and connectivity properties")
    s.add_argument("files", nargs="*")
    s.add_argument("--gen", action="append", default=[])

    s = sub.add_parser("gen", parents=[common], help="write a generated graph or the bundled corpus")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("spec", nargs="?", help="generator spec, e.g. gadget:n=32,alpha=golden")
    g.add_argument("--corpus", metavar="DIR", help="write the bundled corpus into DIR")

    s = sub.add_parser("mix", parents=[common, source], help="t_mix / t_unif or distance profiles")
    s.add_argument("--metric", choices=("tv", "linf", "both"), default="both")
    s.add_argument("--eps", type=_eps, default=0.25)
    s.add_argument("--times", type=_ints, help="report d1, dinf, dbar at these times instead")
    s.add_argument("--submult", type=_positive, metavar="PAIRS", help="audit random (s,t) pairs")

    s = sub.add_parser("spectral", parents=[common, source], help="spectral profile and GMT bound")
    s.add_argument("--profile", action="store_true", help="emit the profile breakpoints")
    s.add_argument("--gmt-a", type=_eps_list, default=None, help="comma-separated a values")

    s = sub.add_parser("hit", parents=[common, source, replicas], help="hitting, cover and collision times")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--matrix", action="store_true")
    mode.add_argument("--cover", action="store_true")
    mode.add_argument("--collide", metavar="traj=RULE", help="STATIC:v, SWEEP[:dwell], ANTIPODAL[:dwell], ADVERSARIAL")
    mode.add_argument("--audit", action="store_true", help="commute, distance and exit-time bounds")
    mode.add_argument(
        "--log-factor", type=_ints, metavar="RATIOS",
        help="adversarial collision on random:n=N graphs with m/n in RATIOS; fits E/(mn) against log(m/n)",
    )
    s.add_argument("--start", type=int, default=0)

    s = sub.add_parser("explore", parents=[common, source, replicas], help="exploration times T_k")
    s.add_argument("--k", type=_ints, required=True)
    s.add_argument("--starts", type=_ints, default=[0])
    s.add_argument("--dump-labelling", metavar="FILE", help="write the cycle order, one vertex per line")

    s = sub.add_parser("gadget", parents=[common, replicas], help="two-cycle gadget experiments")
    s.add_argument("--n", type=_ints, required=True)
    s.add_argument("--alpha", type=_alphas, default=[GOLDEN, 0.5])
    s.add_argument("--eps", type=_eps, default=0.25)
    s.add_argument("--interval", choices=("closed", "half_open"), default="closed")
    s.add_argument("--times", type=_ints, help="return probabilities P_0(X_t = 0) at these times")
    m = s.add_mutually_exclusive_group()
    m.add_argument("--exact", dest="mode", action="store_const", const="exact")
    m.add_argument("--mc", dest="mode", action="store_const", const="mc")

    s = sub.add_parser("dioph", parents=[common], help="gaps of k*xi mod 1")
    s.add_argument("--xi", type=_alpha, default=GOLDEN)
    s.add_argument("--n", type=_ints, required=True)

    s = sub.add_parser("audit-all", parents=[common], help="run the bound audits on the corpus")
    s.add_argument("--replicas", type=_positive, default=1000)
    s.add_argument("--quick", action="store_true", help="skip Monte Carlo audits")
    return p


def parse_args(argv: list[str] | None = None) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    level = ns.pop("verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(level, 2), format="%(name)s: %(message)s")
    cfg = dict(
        subcommand=sub,
        seed=ns.pop("seed", 0),
        workers=ns.pop("workers", 1),
        replicas=ns.pop("replicas", 10_000),
        format=ns.pop("format", "csv"),
        out=ns.pop("out", None),
        graph=ns.pop("graph", None),
    )
    if sub == "gadget" and ns.get("mode") is None:
        ns["mode"] = "exact"
    return ExperimentConfig(**cfg, options=ns)


# ----------------------------------------------------------------------------
# Graph sources
# ----------------------------------------------------------------------------

_GEN_KEYS = {
    "cycle": {"n"},
    "biased": {"n", "fwd", "back"},
    "circulant": {"n", "jumps"},
    "torus": {"rows", "cols"},
    "random": {"n", "m", "seed"},
    "regular": {"n", "d", "seed", "simple"},
    "gadget": {"n", "alpha", "interval"},
    "lollipop": {"n"},
}


def generate(spec: str):
    """Build ``(graph, holding or None)`` from ``family:key=value,...``."""
    fam, _, rest = spec.partition(":")
    if fam not in _GEN_KEYS:
        raise InputError(f"unknown generator family {fam!r}; choose from {sorted(_GEN_KEYS)}")
    kv: dict[str, str] = {}
    for item in filter(None, rest.split(",")):
        key, sep, val = item.partition("=")
        if not sep or key not in _GEN_KEYS[fam]:
            raise InputError(f"malformed generator field {item!r} for {fam}")
        kv[key] = val

    def num(key: str, default: int | None = None) -> int | None:
        return int(kv[key]) if key in kv else default

    try:
        if fam == "cycle":
            return gen_directed_cycle(num("n")), None
        if fam == "biased":
            return gen_biased_cycle(num("n"), num("fwd", 2), num("back", 1)), None
        if fam == "circulant":
            return gen_circulant(num("n"), [int(j) for j in kv.get("jumps", "1").split("/")]), None
        if fam == "torus":
            return gen_torus(num("rows"), num("cols")), None
        if fam == "random":
            return gen_random_eulerian(num("n"), num("m", num("n")), num("seed", 0)), None
        if fam == "regular":
            return gen_random_regular(num("n"), num("d", 2), num("seed", 0), bool(num("simple", 1))), None
        if fam == "lollipop":
            return gen_lollipop(num("n")), None
        spec_ = GadgetSpec(num("n"), _alpha(kv.get("alpha", "golden")), kv.get("interval", "closed"))
        gd = gen_two_cycle_gadget(spec_)
        return gd.graph, np.array(gd.holding)
    except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
        raise InputError(f"bad generator spec {spec!r}: {exc}") from None


def load_chain(cfg: ExperimentConfig):
    o = cfg.options
    if cfg.graph is not None:
        g, hold = read_graph(cfg.graph)
    else:
        g, hold = generate(o["gen"])
    v = validate(g)
    if not (v.eulerian and v.connected):
        raise InputError(f"graph is not a connected Eulerian digraph ({v})")
    holding = o.get("holding")
    if holding is None:
        holding = 0.5 if hold is None else hold
    c = build(g, holding, name=cfg.graph or o.get("gen", ""))
    if o.get("dump_kernel"):
        np.savetxt(o["dump_kernel"], np.asarray(c.dense), fmt="%.17g")
    return c


# ----------------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------------


def _report(cfg: ExperimentConfig, columns: list[str]) -> ExperimentReport:
    return ExperimentReport(cfg.echo(), columns)


def cmd_validate(cfg: ExperimentConfig) -> ExperimentReport:
    rep = _report(cfg, ["source", "n", "m", "eulerian", "connected", "strongly_connected", "regular_degree"])
    ok = Verdict("connected Eulerian")
    sources = [(f, lambda f=f: read_graph(f)[0]) for f in cfg.options["files"]]
    sources += [(s, lambda s=s: generate(s)[0]) for s in cfg.options["gen"]]
    if not sources:
        raise InputError("nothing to validate: give files or --gen specs")
    for name, load in sources:
        g = load()
        v = validate(g)
        rep.add_row(
            source=name,
            n=g.n,
            m=g.m,
            eulerian=v.eulerian,
            connected=v.connected,
            strongly_connected=is_strongly_connected(g),
            regular_degree=v.regular_degree,
        )
        ok.record(0.0 if v.eulerian and v.connected else 1.0, 0.0, name)
    rep.verdicts.append(ok)
    return rep


def cmd_gen(cfg: ExperimentConfig) -> str:
    if cfg.options.get("corpus"):
        paths = corpus_mod.write_corpus(cfg.options["corpus"])
        return "".join(f"{p}\n" for p in paths)
    g, hold = generate(cfg.options["spec"])
    return format_graph(g, hold)


def cmd_mix(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    c = load_chain(cfg)
    if o.get("times"):
        rep = _report(cfg, ["t", "d1", "dinf", "dbar"])
        prof = distance_profile(c, sorted(set(o["times"])))
        for t, a, b, d in zip(prof.times, prof.d1, prof.dinf, prof.dbar):
            rep.add_row(t=int(t), d1=float(a), dinf=float(b), dbar=float(d))
    else:
        # c_fit = t / (m n log(1/eps)): the constant in t_unif(eps) <= c mn log(1/eps), reported only
        rep = _report(cfg, ["metric", "epsilon", "t", "cap", "c_fit"])
        scale = c.graph.m * c.n * math.log(1.0 / o["eps"])
        metrics = ("tv", "linf") if o["metric"] == "both" else (o["metric"],)
        if len(metrics) == 2:
            r = thresholds(c, o["eps"])
            cap = default_cap(c.n)
            for metric, t in (("tv", r.t_mix), ("linf", r.t_unif)):
                rep.add_row(metric=metric, epsilon=o["eps"], t=t, cap=cap, c_fit=None if t is None else t / scale)
        else:
            r = threshold_time(c, metrics[0], o["eps"])
            rep.add_row(metric=r.metric, epsilon=r.epsilon, t=r.t, cap=r.cap,
                        c_fit=None if r.t is None else r.t / scale)
    if o.get("submult"):
        rng = np.random.default_rng(cfg.seed)
        tv = Verdict("dinf(s+t) <= dinf(s)*d1(t)")
        l1 = Verdict("dinf(s+t) <= dinf(s)*2*d1(t)")
        for _ in range(o["submult"]):
            s, t = (int(x) for x in rng.integers(0, 2 * c.n * c.n + 1, size=2))
            r = submultiplicativity_audit(c, s, t)
            tv.record(r.lhs, r.rhs, f"s={s} t={t}", slack=1e-12)
            l1.record(r.lhs, r.rhs_l1, f"s={s} t={t}", slack=1e-12)
        rep.verdicts += [tv, l1]
    return rep


def cmd_spectral(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    c = load_chain(cfg)
    prof = spectral_profile(c, "connected_only")
    if o.get("profile") or not o.get("gmt_a"):
        rep = _report(cfg, ["mass", "Lambda", "witness"])
        for r, lam, w in zip(prof.masses, prof.values, prof.witnesses):
            rep.add_row(mass=float(r), Lambda=float(lam), witness=" ".join(map(str, w)))
        if not o.get("gmt_a"):
            return rep
    rep = _report(cfg, ["a", "delta", "integral", "bound_steps", "t_unif"])
    v = Verdict("t_unif(a) <= GMT bound")
    for a in o["gmt_a"]:
        b = gmt_bound(c, a, prof)
        t = threshold_time(c, "linf", a).t
        rep.add_row(a=a, delta=b.delta, integral=b.integral, bound_steps=b.bound_steps, t_unif=t)
        v.record(math.inf if t is None else t, b.bound_steps, f"a={a}")
    rep.verdicts.append(v)
    return rep


def _trajectory(text: str, c, start: int):
    rule = text.split("=", 1)[1] if text.startswith("traj=") else text
    head, _, arg = rule.partition(":")
    head = head.upper()
    try:
        if head == "STATIC":
            return Trajectory("static", int(arg))
        if head == "SWEEP":
            return Trajectory("sweep", start, dwell=int(arg or 1))
        if head == "ANTIPODAL":
            return Trajectory("antipodal", dwell=int(arg or 1))
    except ValueError as exc:
        raise InputError(f"bad trajectory {text!r}: {exc}") from None
    if head == "ADVERSARIAL":
        return None
    raise InputError(f"unknown trajectory rule {text!r}")


def cmd_log_factor(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    spec = o.get("gen") or ""
    if not spec.startswith("random:"):
        raise InputError("--log-factor needs --gen random:n=N[,seed=S]")
    kv = dict(item.partition("=")[::2] for item in spec.split(":", 1)[1].split(",") if item)
    try:
        n, seed = int(kv["n"]), int(kv.get("seed", cfg.seed))
    except (KeyError, ValueError):
        raise InputError(f"bad generator spec {spec!r}") from None
    if any(r < 1 for r in o["log_factor"]):
        raise InputError("m/n ratios must be positive")
    hold = 0.5 if o.get("holding") is None else o["holding"]
    rows, a, b = log_factor_sweep(n, o["log_factor"], seed, hold, cfg.replicas, cfg.workers)
    rep = _report(cfg, ["n", "target_ratio", "m", "trajectory", "mean", "stderr", "per_mn", "per_mn_log",
                        "fit_intercept", "fit_log_slope"])
    for r, m, traj, est in rows:
        rep.add_row(n=n, target_ratio=r, m=m, trajectory=f"{traj.rule}:{traj.vertex}:{traj.dwell}", mean=est.mean,
                    stderr=est.stderr, per_mn=est.mean / (m * n), per_mn_log=est.mean / (m * n * (1 + math.log(m / n))),
                    fit_intercept=a, fit_log_slope=b)
    return rep


def cmd_hit(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    if o.get("log_factor"):
        return cmd_log_factor(cfg)
    c = load_chain(cfg)
    start = o["start"]
    if not 0 <= start < c.n:
        raise InputError(f"start {start} out of range")
    if o["matrix"]:
        rep = _report(cfg, ["u", "v", "H"])
        H = hitting_times(c).H
        for u in range(c.n):
            for v in range(c.n):
                rep.add_row(u=u, v=v, H=float(H[u, v]))
        return rep
    if o["cover"]:
        rep = _report(cfg, ["start", "mean", "stderr", "replicas", "bound"])
        est = cover_time(c, start, cfg.replicas, cfg.seed, cfg.workers)
        g = c.graph
        bound = 16.0 * g.m * g.n / g.min_degree
        rep.add_row(start=start, mean=est.mean, stderr=est.stderr, replicas=est.replicas, bound=bound)
        v = Verdict("cover <= 16mn/d_min")
        v.record(est.mean, bound, f"start={start}", slack=3 * est.stderr)
        rep.verdicts.append(v)
        return rep
    if o["audit"]:
        rep = _report(cfg, ["bound", "checked", "violations", "worst_ratio"])
        for v in bound_audit(c, cfg.seed):
            rep.add_row(bound=v.name, checked=v.checked, violations=v.violations, worst_ratio=v.worst_ratio)
            rep.verdicts.append(v)
        return rep
    rep = _report(cfg, ["trajectory", "mean", "stderr", "replicas", "truncated_fraction", "z_mean"])
    traj = _trajectory(o["collide"], c, start)
    if traj is None:
        traj, est = adversarial_collision(c, start, replicas=cfg.replicas, seed=cfg.seed, workers=cfg.workers)
    else:
        est = moving_target_collision(c, traj, cfg.replicas, seed=cfg.seed, start=start, workers=cfg.workers)
    label = f"{traj.rule}:{traj.vertex}:{traj.dwell}"
    rep.add_row(
        trajectory=label,
        mean=est.mean,
        stderr=est.stderr,
        replicas=est.replicas,
        truncated_fraction=est.truncated_fraction,
        z_mean=est.z_mean,
    )
    return rep


def cmd_explore(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    c = load_chain(cfg)
    if any(k < 1 or k > c.n for k in o["k"]):
        raise InputError("k values must lie in 1..n")
    if o.get("dump_labelling"):
        lab = ham_labelling(c.graph, o["starts"][0])
        assert verify_labelling(c.graph, lab)
        with open(o["dump_labelling"], "w", encoding="utf-8") as fh:
            fh.write("".join(f"{v}\n" for v in lab.order))
    audit = exploration_audit(c, o["k"], cfg.replicas, cfg.seed, o["starts"], cfg.workers)
    rep = _report(cfg, ["k", "mean", "stderr", "bound", "fitted_exponent"])
    for k, m, se, b in zip(audit.ks, audit.means, audit.stderrs, audit.bound):
        rep.add_row(k=k, mean=m, stderr=se, bound=b, fitted_exponent=audit.exponent)
    rep.verdicts += [audit.verdict, audit.phase_verdict]
    return rep


def cmd_gadget(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    for n in o["n"]:
        if n < 4 or n % 4:
            raise InputError(f"gadget n must be a positive multiple of 4, got {n}")
    if o.get("times"):
        rep = _report(cfg, ["n", "alpha", "t", "p_return", "n_p_return"])
        for a in o["alpha"]:
            for n in o["n"]:
                spec = GadgetSpec(n, a, o["interval"])
                prof = return_probability_profile(spec, o["times"], o["mode"], cfg.replicas, cfg.seed)
                for t, p in prof:
                    rep.add_row(n=n, alpha=a, t=t, p_return=p, n_p_return=n * p)
        return rep
    res = sensitivity_experiment(o["n"], o["alpha"], o["eps"], o["interval"], cfg.workers)
    rep = _report(cfg, ["n", "alpha", "t_mix", "t_unif", "fitted_exponent"])
    v = Verdict("t_mix <= t_unif")
    for r in res.rows:
        rep.add_row(n=r.n, alpha=r.alpha, t_mix=r.t_mix, t_unif=r.t_unif, fitted_exponent=res.exponents_mix[r.alpha])
        if r.t_mix is not None and r.t_unif is not None:
            v.record(r.t_mix, r.t_unif, f"n={r.n} alpha={r.alpha:.6g}")
    rep.verdicts.append(v)
    return rep


def cmd_dioph(cfg: ExperimentConfig) -> ExperimentReport:
    o = cfg.options
    xi = o["xi"]
    if not 0.0 < xi < 1.0:
        raise InputError("xi must lie in (0, 1)")
    B = max(cf_expand(xi, 20).coefficients[1:], default=1)
    rep = _report(cfg, ["n", "gap", "n_gap", "max_interval_count"])
    gap_v = Verdict(f"gap <= 2B/n (B={B})")
    cnt_v = Verdict(f"window count <= B+2 (B={B})")
    for n in o["n"]:
        r = sequence_gap(xi, n)
        rep.add_row(n=n, gap=r.gap, n_gap=n * r.gap, max_interval_count=r.max_interval_count)
        gap_v.record(r.gap, 2.0 * B / n, f"n={n}")
        cnt_v.record(r.max_interval_count, B + 2, f"n={n}")
    rep.verdicts += [gap_v, cnt_v]
    return rep


def cmd_audit_all(cfg: ExperimentConfig) -> ExperimentReport:
    """Bounds that must hold on every corpus graph, collected into one report."""
    o = cfg.options
    rep = _report(cfg, ["family", "graph", "bound", "checked", "violations", "worst_ratio"])
    merged: dict[str, Verdict] = {}

    def keep(fam, name, v: Verdict):
        rep.add_row(family=fam, graph=name, bound=v.name, checked=v.checked, violations=v.violations,
                    worst_ratio=v.worst_ratio)
        merged.setdefault(v.name, Verdict(v.name)).merge(v)

    rng = np.random.default_rng(cfg.seed)
    for e in corpus_mod.small_corpus():
        c = e.chain()
        prof = spectral_profile(c, "connected_only")
        v = Verdict("t_unif(a) <= GMT bound")
        for a in (0.25, 0.125):
            t = threshold_time(c, "linf", a).t
            v.record(math.inf if t is None else t, gmt_bound(c, a, prof).bound_steps, f"a={a}")
        keep(e.family, e.name, v)
        l1 = Verdict("dinf(s+t) <= dinf(s)*2*d1(t)")
        for _ in range(20):
            s, t = (int(x) for x in rng.integers(0, 2 * e.n * e.n + 1, size=2))
            r = submultiplicativity_audit(c, s, t)
            l1.record(r.lhs, r.rhs_l1, f"s={s} t={t}", slack=1e-12)
        keep(e.family, e.name, l1)
    for fam in ("regular", "eulerian"):
        for e in corpus_mod.family(fam):
            c = e.chain(0.0)
            for v in bound_audit(c, cfg.seed, samples=200):
                keep(fam, e.name, v)
            if o["quick"]:
                continue
            g = e.graph
            est = cover_time(c, 0, cfg.replicas, cfg.seed, cfg.workers)
            v = Verdict("cover <= 16mn/d_min")
            v.record(est.mean, 16.0 * g.m * g.n / g.min_degree, "start=0", slack=3 * est.stderr)
            keep(fam, e.name, v)
            ks = sorted({1, 2, max(1, g.n // 4), g.n})
            audit = exploration_audit(c, ks, cfg.replicas, cfg.seed, workers=cfg.workers)
            keep(fam, e.name, audit.verdict)
            keep(fam, e.name, audit.phase_verdict)
    rep.verdicts = list(merged.values())
    return rep


_DISPATCH = {
    "validate": cmd_validate,
    "mix": cmd_mix,
    "spectral": cmd_spectral,
    "hit": cmd_hit,
    "explore": cmd_explore,
    "gadget": cmd_gadget,
    "dioph": cmd_dioph,
    "audit-all": cmd_audit_all,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    seeding.set_default_workers(cfg.workers)
    t0 = time.perf_counter()
    rep = _DISPATCH[cfg.subcommand](cfg)
    rep.wall_clock = time.perf_counter() - t0
    return rep


def _write(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    try:
        if cfg.subcommand == "gen":
            _write(cfg, cmd_gen(cfg))
            return EXIT_OK
        rep = run(cfg)
        _write(cfg, emit(rep, cfg.format))
    except (ValueError, OSError) as exc:
        print(f"eulermix: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for v in rep.verdicts:
        print(v.line(), file=sys.stderr)
    return EXIT_VIOLATION if rep.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
