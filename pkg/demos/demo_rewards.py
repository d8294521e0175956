# Curiosity rewards on small graphs, by hand.
#
# Two structural signals drive exploration in this library:
#   1. the count of 1-cycles (edge loops not filled by triangles), and
#   2. network compressibility (how much a random walk's information rate
#      drops when nodes are clustered, averaged over all cluster counts).
# This script walks through both on graphs small enough to reason about.

import numpy as np

from curiograph import (
    Graph,
    betti,
    build_complex,
    clustered_rate,
    compressibility,
    rate_distortion_curve,
    walk_model,
)

# --- 1-cycles ------------------------------------------------------------

# A square: four edges in a loop, no triangles. One unfillable cycle.
square = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
print("square betti:", betti(square))  # beta0=1 component, beta1=1 cycle

# Filling the square with a diagonal creates two triangles... but wait:
# a diagonal makes two 3-cliques, each spanned by a 2-simplex, so the
# loop is now filled and beta1 drops to 0.
filled = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
print("filled square betti:", betti(filled))
print("filled square triangles:", build_complex(filled).triangles)

# Two separate loops sharing no edge count independently.
two_loops = Graph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)])
print("two squares betti:", betti(two_loops))  # beta0=2, beta1=2

# --- compressibility ------------------------------------------------------

# A random walk on the square is a fair coin at every step: 1 bit.
w = walk_model(square)
print("\nsquare walk entropy:", w.entropy, "bits")

# Pair opposite corners and the coarse sequence alternates deterministically:
# the 2-cluster description costs 0 bits.
print("rate with opposite corners paired:", clustered_rate(w, [0, 1, 0, 1]))

# The full rate-distortion curve tracks the best rate found at every
# cluster count, never rising as the description coarsens.
curve = rate_distortion_curve(w)
for n, s, r in zip(curve.cluster_counts, curve.scales, curve.rates):
    print(f"  {n} clusters (scale {s:.2f}): {r:.3f} bits")

# Compressibility is the average drop below the walk entropy.
print("square compressibility:", compressibility(square))

# Denser, more clustered graphs compress further.
k5 = Graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
print("K5 compressibility:", compressibility(k5))

chain = Graph(6, [(i, i + 1) for i in range(5)])
print("6-chain compressibility:", compressibility(chain))
