"""Brute-force blossom-tree census next to the series coefficients it should match."""

from planargeo.models import tetravalent
from planargeo.oracle import TETRAVALENT, census_with_check, partial_sums
from planargeo.recursion import solve_sequences

N = 5
res = census_with_check(TETRAVALENT, N)
by_distance = {}
for (_, d), c in res["table"].items():
    by_distance[d] = by_distance.get(d, 0) + c
sums = partial_sums(by_distance, N + 1)
fam = solve_sequences(tetravalent(), N)
print(f"{res['trees']} trees with {N} vertices; contour/dual disagreements: {res['mismatches']}")
print(f"{'n':>3} {'trees with d <= n':>18} {'[g^N] R_n':>10}")
for n, s in enumerate(sums):
    print(f"{n:>3} {s:>18} {int(fam[('R', n)].coefficient(N)):>10}")
