"""Continuous centralizer families on the north-south and DA maps, against the rigid cat map."""
import numpy as np

from stablab.catalog import default_catalog
from stablab.centralizer import (bump_family, commutation_residual, discreteness_probe, ms_family,
                                 translation_candidates)
from stablab.conjugacy import d0
from stablab.geometry import UniformGrid
from stablab.homeo import Identity

cat = default_catalog()
ns, da, f = cat["northsouth"], cat["da"], cat["cat"]
ts = np.linspace(0, 1, 5)

print("north-south, fundamental-domain family")
for t, h in zip(ts, ms_family(ns, ts)):
    print(f"  t={t:.2f} residual={commutation_residual(ns, h):.1e} d0(h, id)={d0(h, Identity(ns.space), UniformGrid(2048)).value:.5f}")

print("DA, bump-push family")
for t, h in zip(ts, bump_family(da, ts)):
    print(f"  t={t:.2f} residual={commutation_residual(da, h):.1e} d0(h, id)={d0(h, Identity(da.space)).value:.5f}")

report = discreteness_probe(f, translation_candidates(32))
print(f"cat map: {len(report.entries)} grid translations, min residual {report.min_residual:.4f}, "
      f"{len(report.witnesses)} near-commuters")
