"""Graphs and equivalence classes.

Builds a small causal DAG, shows its pairwise relations, and computes the
pattern (CPDAG) that represents every DAG indistinguishable from it by
observational data alone: the collider stays directed, and the edge it
compels downstream stays directed too.
"""

from cadre.graphs import Dag, dag_to_cpdag, iter_pairs, relation_of, shd, write_graph_text

# AlcoholUse and Gallstones both cause LiverDisorder, which causes Fatigue.
labels = ("AlcoholUse", "Gallstones", "LiverDisorder", "Fatigue")
truth = Dag(labels, frozenset({(0, 2), (1, 2), (2, 3)}))

print("Ground-truth DAG:")
print(write_graph_text(truth))

print("Pairwise relations:")
for a, b in iter_pairs(4):
    print(f"  {labels[a]:>13} / {labels[b]:<13} -> {relation_of(truth, (a, b)).name}")

pattern = dag_to_cpdag(truth)
print("\nPattern of its equivalence class (all edges compelled here):")
print(write_graph_text(pattern))

# A simple chain, by contrast, has no compelled edges at all.
chain = Dag(("A", "B", "C"), frozenset({(0, 1), (1, 2)}))
print("Chain A -> B -> C completes to:")
print(write_graph_text(dag_to_cpdag(chain)))

wrong = Dag(labels, frozenset({(2, 0), (1, 2), (2, 3)}))
print(f"Reversing one compelled edge costs SHD "
      f"{shd(dag_to_cpdag(wrong), pattern)} against the true pattern.")
