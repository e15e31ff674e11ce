"""Solve for the conjugacy between the cat map and a small perturbation, then move -id across it."""
import numpy as np

from stablab.catalog import AffinePerturbedAnosov, LinearAnosov, named_perturbation
from stablab.centralizer import commutation_residual
from stablab.conjugacy import c0_distance, moser_solve, push_centralizer
from stablab.geometry import PhaseSpace, RandomUniform
from stablab.homeo import negation

cat = LinearAnosov()
for eps in (1e-3, 3e-3, 1e-2, 3e-2):
    g = AffinePerturbedAnosov(perturbation=named_perturbation("default"), amplitude=eps)
    h = moser_solve(cat, g, resolution=128)
    K = h.sup_u / c0_distance(cat, g)
    print(f"eps={eps:<6g} residual={h.residual:.2e} sup|u|={h.sup_u:.3e} K={K:.4f} outer iterations={h.iterations_used}")

# -id commutes with the cat map; conjugating it by h^-1 gives a symmetry of g.
# The default field is odd, so use the constant one where -id itself is not a symmetry.
neg = negation(PhaseSpace.TORUS2)
g = AffinePerturbedAnosov(perturbation=named_perturbation("constant"), amplitude=0.01)
h = moser_solve(cat, g, resolution=16)
psi = push_centralizer(h.inv, neg)
print("constant field: -id against g:", commutation_residual(g, neg, RandomUniform(2000, seed=1)))
print("constant field: transported -id against g:", commutation_residual(g, psi, RandomUniform(2000, seed=1)))
print("u is the constant", np.round(h.field[0, 0], 6))
