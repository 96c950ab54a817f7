"""Labelled graphs at desk scale: exhaustive enumeration, block structure,
and the counting identity behind the two-connected formula.
"""

from virialkit import (
    Graph,
    block_cut_tree,
    block_decomposition,
    dissymmetry_check,
    enumerate_graphs,
)

print("== exhaustive labelled counts ==")
print("n  all      connected  two-connected")
for n in range(1, 6):
    counts = {}
    for klass in ("all", "connected", "two_connected"):
        counts[klass] = sum(1 for _ in enumerate_graphs(n, klass))
    print(f"{n}  {counts['all']:<8} {counts['connected']:<10} {counts['two_connected']}")

print()
print("== block decomposition of a lollipop: triangle + tail ==")
g = Graph.from_edges(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)])
d = block_decomposition(g)
for i, b in enumerate(d.blocks):
    print(f"block {i}: vertices {b.vertices}, edges {sorted(b.edges)}")
print("articulation points:", sorted(d.articulation_points))

tree = block_cut_tree(d)
print("block cut-point tree edges (block index, cut vertex):", list(tree.edges))

print()
print("== the rooting identity 1 + sum |V(block)| = n + #blocks ==")
for edges in ([(1, 2), (2, 3)],
              [(1, 2), (2, 3), (1, 3), (3, 4)],
              [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]):
    n = max(v for e in edges for v in e)
    g = Graph.from_edges(n, edges)
    lhs, rhs = dissymmetry_check(g)
    print(f"n={n}, edges={edges}: {lhs} = {rhs}")

print()
print("checking it on every connected graph with up to 5 vertices...")
bad = 0
for n in range(2, 6):
    for g in enumerate_graphs(n, "connected"):
        lhs, rhs = dissymmetry_check(g)
        bad += lhs != rhs
print("violations:", bad)
