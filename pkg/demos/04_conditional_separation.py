"""When does fixing some spins keep an edge visible?

The projection decoder relies on a floor for the divergence between the
two-spin conditionals of an edge present in one graph and absent from
another.  Brute force over every pair of graphs with maximum degree 2 shows
the floor holds once all remaining spins are fixed, but can fail when fewer
are: a 5-cycle and a 4-cycle sharing no edge give a pair divergence ten
times smaller than the floor when nothing is conditioned on.
"""

import itertools

from isinglimits import Graph, IsingParams
from isinglimits.divergences import conditional_j, separation_floor
from isinglimits.verify import check_conditional_separation, format_table

cycle5 = IsingParams.from_graph(Graph.from_edges(5, [(0, 1), (0, 4), (1, 3), (2, 3), (2, 4)]), 1.0)
cycle4 = IsingParams.from_graph(Graph.from_edges(5, [(0, 2), (0, 3), (1, 2), (1, 3)]), 1.0)
floor = separation_floor(1.0, 2.0)

print(f"floor sinh^2(1/4)/(3e^4+1) = {floor:.4e}")
print(f"edge (0,1), nothing fixed:  J = {conditional_j(cycle5, cycle4, (0, 1), {}):.4e}")
for size in (1, 2, 3):
    vals = [conditional_j(cycle5, cycle4, (0, 1), dict(zip(u, x)))
            for u in itertools.combinations((2, 3, 4), size)
            for x in itertools.product((-1, 1), repeat=size)]
    print(f"edge (0,1), {size} spin(s) fixed: min J = {min(vals):.4e}")

print("\nbrute-force check on p=4 and p=5, degree at most 2:")
print(format_table(check_conditional_separation(ps=(4, 5), ds=(2,), lams=(1.0,))))
