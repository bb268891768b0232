"""Isomonodromic flows of the deformed oscillator and the residue form on M.

Run with ``python3 walkthroughs/01_flows_and_omega.py``.
"""
from heavenly_forge.hyperelliptic import omega_check, pullback_omega_on_flows
from heavenly_forge.oscillator import build_flows, isomonodromy_check, painleve_reduction

for n in (1, 2):
    flows = build_flows(n)
    print(isomonodromy_check(flows).to_text())
    print(pullback_omega_on_flows(flows).to_text())

rep, om = omega_check(2)
print(rep.to_text())
for (c1, c2), val in sorted(om.components.items()):
    if val != 0:
        print(f"omega({c1}, {c2}) = {val}")

# n = 1 along the lambda-flow collapses to Painleve I
print(painleve_reduction().to_text())
