"""heavenly-forge: run verification suites and print closed forms."""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from functools import lru_cache

from . import __version__
from .report import VerificationReport

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
N_RANGE = {"omega": (1, 3), "default": (1, 2)}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Suite:
    name: str
    runner: object
    anchor: str
    only_n1: bool = False
    slow: bool = False


@lru_cache(maxsize=None)
def _flows(n):
    from .oscillator import build_flows

    return build_flows(n)


@lru_cache(maxsize=None)
def _package(n):
    from .metricfactory import build_distinguished_metric

    return build_distinguished_metric(n, _flows(n))


def _run_flows(opts):
    from .oscillator import frobenius_check, independence_check, isomonodromy_check, isopotential_check, quasi_homogeneity_check

    fs = _flows(opts.n)
    rep = VerificationReport("flows", {"n": opts.n})
    for part in (isomonodromy_check, frobenius_check, isopotential_check, independence_check, quasi_homogeneity_check):
        rep.merge(part(fs))
    return rep


def _run_omega(opts):
    from .hyperelliptic import omega_check, triangular_residues

    rep, om = omega_check(opts.n)
    rep.merge(triangular_residues(opts.n, om))
    rep.params["omega"] = "; ".join(om.listing())
    return rep


def _run_metric(opts):
    from .metricfactory import certify_comb_identities, certify_hyperkahler, pi1_comparison

    pkg = _package(opts.n)
    rep = VerificationReport("metric", {"n": opts.n})
    rep.merge(certify_hyperkahler(pkg))
    rep.merge(certify_comb_identities(pkg.fs))
    if opts.n == 1:
        rep.merge(pi1_comparison(pkg), "n = 1 regression: ")
    return rep


def _run_homothety(opts):
    from .metricfactory import certify_homothety

    return certify_homothety(_package(opts.n))


def _run_foliation(opts):
    from .metricfactory import certify_hyper_lagrangian

    return certify_hyper_lagrangian(_package(opts.n))


def _run_painleve(opts):
    from .laxpairs import appendix_commutator_check
    from .oscillator import painleve_reduction

    rep = painleve_reduction()
    rep.merge(appendix_commutator_check(), "matrix Lax pair: ")
    return rep


def _run_weyl(opts):
    from .metricfactory import weyl_check

    return weyl_check()


def _run_heavenly(opts):
    from .heavenly import heavenly_suite

    return heavenly_suite(opts.n)


def _run_series(opts):
    from .heavenly import toml_series_suite

    return toml_series_suite(opts.order)


def _run_pprime(opts):
    from .heavenly import pprime_identity

    return pprime_identity(opts.order)


def _run_sparling_tod(opts):
    from .heavenly import sparling_tod_suite

    rep = sparling_tod_suite(1)
    rep.merge(sparling_tod_suite(1, F="constant"), "constant F: ")
    return rep


def _run_timmetric(opts):
    from .heavenly import timmetric_suite

    return timmetric_suite()


def _run_legendre(opts):
    from .heavenly import legendre_equivalence
    from .symkernel import ChartSpec

    C = ChartSpec("zwp", ["z", "w", "p"], functions={"F": 3})
    rep = legendre_equivalence(C.apply("F", *C.syms("z", "w", "p")))
    R = ChartSpec("zwps", ["z", "w", "p"], roots=[("s", "s^2 - p")], functions={"f": 1})
    for text in ("s*f(w)", "s*z - 1/(12*s)"):
        sub = legendre_equivalence(R.parse(text))
        sub.zero("linear PDE holds", R.parse(sub.params["linear_pde"]))
        rep.merge(sub, f"F = {text}: ")
    return rep


def _random_theta(n, rng):
    """A polynomial Theta with a few random monomials of degree <= 3 in (x, y)."""
    from .heavenly import HeavenlyPotential

    names = [f"x{i}" for i in range(1, 2 * n + 1)] + [f"y{i}" for i in range(1, 2 * n + 1)]
    terms = []
    for _ in range(3):
        mono = "*".join(rng.choice(names) for _ in range(rng.randint(2, 3)))
        terms.append(f"{rng.randint(-3, 3) or 1}*{mono}")
    return HeavenlyPotential.pleb2(n, " + ".join(terms))


def _run_limit(opts):
    from .heavenly import HeavenlyPotential, infinitesimal_limit_check

    n = opts.n
    rep = VerificationReport("limit", {"n": n, "seed": opts.seed})
    rep.merge(infinitesimal_limit_check(HeavenlyPotential.pleb2(n, "0")), "Theta = 0: ")
    rep.merge(infinitesimal_limit_check(HeavenlyPotential.pleb2(n, "y1^3")), "Theta = y1^3: ")
    rng = random.Random(opts.seed)
    pot = _random_theta(n, rng)
    rep.merge(infinitesimal_limit_check(pot), f"Theta = {pot.theta}: ")
    return rep


def _run_appendix(opts):
    from .laxpairs import appendix_suite

    return appendix_suite()


SUITES = {s.name: s for s in (
    Suite("flows", _run_flows, "isomonodromic flows of the deformed oscillator"),
    Suite("omega", _run_omega, "intersection form on M by residues"),
    Suite("metric", _run_metric, "distinguished hyper-Kahler metric"),
    Suite("homothety", _run_homothety, "Euler field homothety"),
    Suite("foliation", _run_foliation, "hyper-Lagrangian foliation"),
    Suite("painleve", _run_painleve, "Painleve I reduction"),
    Suite("weyl", _run_weyl, "Weyl invariant of the n = 1 metric", only_n1=True, slow=True),
    Suite("heavenly", _run_heavenly, "second heavenly equation"),
    Suite("series", _run_series, "series solution of the quadratic reduction", only_n1=True),
    Suite("pprime", _run_pprime, "Weierstrass identity for A_y", only_n1=True),
    Suite("sparling-tod", _run_sparling_tod, "null homothety metric", only_n1=True),
    Suite("timmetric", _run_timmetric, "strengthened projectability metric", only_n1=True),
    Suite("legendre", _run_legendre, "Legendre linearisation", only_n1=True),
    Suite("limit", _run_limit, "infinitesimal limit of the first heavenly system"),
    Suite("appendix", _run_appendix, "cohomogeneity-one Painleve I metric", only_n1=True),
)}


def run(name, opts):
    """Run one suite (or all) and return its report; raises UsageError on bad input."""
    if name == "all":
        rep = VerificationReport("all", {"n": opts.n, "order": opts.order})
        for suite in SUITES.values():
            if suite.only_n1 and opts.n != 1:
                rep.skip(f"{suite.name}", "defined for n = 1 only")
                continue
            sub = run(suite.name, opts)
            rep.merge(sub, f"{suite.name}: ")
        return rep
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    suite = SUITES[name]
    lo, hi = N_RANGE.get(name, N_RANGE["default"])
    if suite.only_n1:
        lo = hi = 1
    if not lo <= opts.n <= hi:
        raise UsageError(f"suite {name} supports n in [{lo}, {hi}], got {opts.n}")
    if suite.slow and not opts.allow_slow:
        rep = VerificationReport(name, {"n": opts.n}, anchor=suite.anchor)
        rep.skip(name, "slow suite skipped; pass --allow-slow to run it")
        return rep
    rep = suite.runner(opts)
    rep.anchor = suite.anchor
    for c in rep.checks:
        c.anchor = c.anchor or suite.anchor
    return rep


def _show(what, opts):
    if what == "omega":
        from .hyperelliptic import omega_matrix

        return "\n".join(omega_matrix(opts.n).listing())
    if what == "pi1":
        from .metricfactory import pi1_metric

        return "\n".join(pi1_metric().listing())
    if what == "metricpi":
        from .laxpairs import build_metricpi

        return "\n".join(build_metricpi()[0].listing())
    if what == "toml":
        from .heavenly import toml_table

        return "\n".join(f"{s}\ty^{k}\t{c}" for s, block in toml_table().items() for k, c in block.items())
    raise UsageError(f"unknown closed form {what!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="heavenly-forge", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a verification suite")
    r.add_argument("suite", help="suite name or 'all'")
    r.add_argument("--n", type=int, default=1)
    r.add_argument("--order", type=int, default=16, help="series order")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--output", help="write the report to this file instead of stdout")
    r.add_argument("--allow-slow", action="store_true")
    r.add_argument("--seed", type=int, default=0, help="seed for randomised samples")
    s = sub.add_parser("show", help="print a closed form")
    s.add_argument("what", choices=("omega", "pi1", "metricpi", "toml"))
    s.add_argument("--n", type=int, default=1)
    sub.add_parser("list", help="list suite names")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for s in SUITES.values():
                print(f"{s.name}\t{s.anchor}{' (slow)' if s.slow else ''}")
            return EXIT_PASS
        if args.command == "show":
            print(_show(args.what, args))
            return EXIT_PASS
        rep = run(args.suite, args)
    except UsageError as e:
        print(f"heavenly-forge: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = rep.to_json() if args.format == "json" else rep.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
