"""
Splitting a null loop into small lassos
=======================================

Every move of a nullhomotopy sweeps across one small triangle.  Recording
the prefix of the chain before each move, followed by that triangle, gives
a product of lassos that is homotopic to the original loop.
"""

# %%
# Random nullhomotopic loop on a jittered circle at a fine radius; the
# coarse cover uses four times the radius so stars of fine balls fit inside.

import random

from chainshape import build_ball_cover, build_rips_2skeleton, fixture_space
from chainshape.chains import replay
from chainshape.shapesys import lasso_factorization, random_nullhomotopic_loop

X = fixture_space("circle", n=16, jitter=0.2, seed=5)
fine = build_ball_cover(X, "0.5")
coarse = build_ball_cover(X, "2")
K = build_rips_2skeleton(X, fine)

rng = random.Random(11)
beta, moves = random_nullhomotopic_loop(K, rng, n_moves=5)
print("loop:", list(beta))
print("nullhomotopy:", len(moves), "moves")

# %%
# Factor it.  Each lasso records which fine element holds its loop and which
# coarse element receives that element.

f = lasso_factorization(beta, moves, fine, coarse)
for lasso in f.lassos:
    print(f"  tail {list(lasso.conjugator)} loop {list(lasso.loop)} "
          f"fine #{lasso.fine_element} -> coarse #{lasso.coarse_element}")

# %%
# The verification is an explicit move list taking beta to the lasso
# product; replay it to check.

print("verdict:", f.verification.status)
print("replay matches:", replay(beta, f.verification.moves).vertices == f.total.vertices)
