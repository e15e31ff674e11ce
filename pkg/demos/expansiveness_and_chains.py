"""Separation probes on the catalog maps next to the combinatorial verdicts of their specs."""
from stablab import chains
from stablab.catalog import default_catalog
from stablab.expansive import (dense_expansiveness_probe, heteroclinic_separated_set, sensitivity_probe,
                               shrinking_ball_certificate)
from stablab.geometry import UniformGrid, sample

cat = default_catalog()
f, da, ns, prod = cat["cat"], cat["da"], cat["northsouth"], cat["product"]

r = dense_expansiveness_probe(f, sample(f.space, UniformGrid(16)), 0.2, 15, max_pairs=None)
print(f"cat, 16x16 grid: {r.n_separated}/{r.n_pairs_tested} pairs separated, worst |n| = {r.max_abs_time}")
r = dense_expansiveness_probe(da, heteroclinic_separated_set(da, 100), da.meta.eps0 / 2, 60, max_pairs=None)
print(f"DA, heteroclinic set: {r.n_separated}/{r.n_pairs_tested} pairs separated")
r = dense_expansiveness_probe(ns, sample(ns.space, UniformGrid(64)), 0.1, 200)
print(f"north-south, 64 grid: fraction separated {r.fraction:.3f}")
cert = shrinking_ball_certificate(ns, 0.1)
print(f"north-south certificate: arc {cert.arc}, max diameter {cert.max_diameter:.4f} at n={cert.argmax_n}")
print(f"product sensitivity: {sensitivity_probe(prod, UniformGrid(5), 1e-3, 0.1, 30).fraction:.3f}")

for name in chains.SHIPPED_SPECS:
    spec = chains.load_spec(name)
    v = chains.verdict(spec)
    print(f"{name:<10} chains={chains.maximal_chains(spec)} verdict={v.as_tuple()} theta={chains.select_theta(spec)}")
