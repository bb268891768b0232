"""Build the distinguished metric and certify it.

Pass n on the command line (default 1). n = 2 takes a few seconds.
"""
import sys

from heavenly_forge.metricfactory import (
    build_distinguished_metric,
    certify_homothety,
    certify_hyper_lagrangian,
    certify_hyperkahler,
    pi1_comparison,
)

n = int(sys.argv[1]) if len(sys.argv) > 1 else 1
pkg = build_distinguished_metric(n)
for certify in (certify_hyperkahler, certify_homothety, certify_hyper_lagrangian):
    print(certify(pkg).to_text())

if n == 1:
    rep = pi1_comparison(pkg)
    print(rep.to_text())
    print("pullback = constant * printed metric, constant =", rep.params["constant"])
