"""
A hole that survives and a hole that does not
=============================================

The annulus keeps its hole over a band of radii.  The arch (a small grid
with one missing point) only has a hole at the finest radius; any coarser
ball cover fills it.
"""

# %%
# Annulus: 16 outer points at radius 2, 8 inner points at radius 1.

from chainshape import build_tower, filtration_report, shipped_fixture, spanier_quotient
from chainshape.shapesys import lift_word, spanier_membership

X, scales = shipped_fixture("annulus")
rep = filtration_report(X, scales)
print("scales:", rep.data["scales"])
print("H1 per level:", [lv["h1"] for lv in rep.data["levels"]])
for sp in rep.data["spanier"]:
    print(f"  small loops at {sp['scale']}: quotient {sp['quotient_h1']}, "
          f"class killed? {sp['class_killed']}")
print("flags:", rep.data["flags"])

# %%
# Push the coarse scale past the inner diameter and both flags drop together.

wide = filtration_report(X, ["2", "1.2"])
print("with coarse scale 2:", wide.data["flags"])

# %%
# Arch.  Only the finest Rips complex sees the missing grid point.

A, scales = shipped_fixture("arch")
tower = build_tower(A, scales)
print([(str(lv.scale), lv.invariant.rank) for lv in tower.levels])

fine = tower.finest
cycle = lift_word(fine.invariant.lifts[0])
for lv in tower.levels[:-1]:
    q = spanier_quotient(fine.presentation, lv.cover)
    print(f"coarse {lv.scale}: generator in the small-loop subgroup ->",
          spanier_membership(cycle, q).status)
