"""Series, Weierstrass and Legendre views of the quadratic reduction."""
from heavenly_forge.heavenly import legendre_equivalence, pprime_identity, toml_series_suite
from heavenly_forge.symkernel import ChartSpec

print(toml_series_suite(16).to_text())

# one check here fails on purpose: the invariants in the printed order
print(pprime_identity(15).to_text())

C = ChartSpec("zwp", ["z", "w", "p"], functions={"F": 3})
rep = legendre_equivalence(C.apply("F", *C.syms("z", "w", "p")))
print(rep.to_text())
print("linear PDE:", rep.params["linear_pde"])
