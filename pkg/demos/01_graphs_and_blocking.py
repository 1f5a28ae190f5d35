"""Loading graphs, wiring the virtual source, and what blocking does.

Walks the smallest fixtures and checks every step against the exact
enumeration oracle, so the printed numbers are ground truth, not
estimates.
"""

from imin import fixtures
from imin.graph import Graph, assign_wc_probabilities, block_nodes
from imin.oracle import ExactModel


def main():
    print("=== weighted-cascade probabilities ===")
    g = Graph.from_edges(4, [0, 1, 2], [3, 3, 3])
    g = assign_wc_probabilities(g)
    print("three edges into one node ->", g.out_p, "(each 1/in-degree)")

    print("\n=== seed unification ===")
    ug = fixtures.worked_example_three_seeds()
    lo, hi = ug.out_ptr[ug.s], ug.out_ptr[ug.s + 1]
    print(f"virtual source s={ug.s} points at seeds "
          f"{sorted(int(v) for v in ug.out_dst[lo:hi])} with probability 1")

    model = ExactModel(ug)
    blockers = [2, 6, 11]
    print(f"\nblocking {blockers}:")
    print(f"  expected decrease    = {model.decrease(blockers):.1f}")
    print(f"  lower bound (single-blocker protection) "
          f"= {model.lower_bound(blockers):.1f}")
    print(f"  upper bound (alternative protection)    "
          f"= {model.upper_bound(blockers):.1f}")

    print("\n=== blocking is a view, not a copy ===")
    d = fixtures.diamond(1.0)
    blocked = block_nodes(d, [1])
    print("diamond, block one branch: residual spread =",
          ExactModel(blocked).spread(), "(the other branch still delivers)")
    both = block_nodes(d, [1, 2])
    print("block both branches:       residual spread =",
          ExactModel(both).spread())


if __name__ == "__main__":
    main()
