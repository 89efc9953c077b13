"""Simulate a linear Gaussian model and recover it with greedy search.

Draws a random 12-node DAG, parameterizes it with split-uniform edge
weights and uniform noise variances, simulates data, and runs the
two-phase greedy equivalence search.  At n=2000 the search typically
recovers the true pattern exactly.
"""

from cadre.ges import run_ges
from cadre.graphs import confusion_counts, dag_to_cpdag, shd, write_graph_text
from cadre.scoring import ScoreConfig
from cadre.sem import RandomDagSpec, draw_sem_parameters, random_forward_dag, simulate_sem

dag = random_forward_dag(RandomDagSpec(num_nodes=12, num_edges=14, seed=4))
sem = draw_sem_parameters(dag, seed=4)
data = simulate_sem(sem, n=2000, seed=4)

estimate, trace = run_ges(data, ScoreConfig(penalty_discount=2.0))
truth = dag_to_cpdag(dag)

print("Estimated pattern:")
print(write_graph_text(estimate))
print(f"Search applied {len(trace.steps)} operators "
      f"({sum(s.op == 'insert' for s in trace.steps)} inserts, "
      f"{sum(s.op == 'delete' for s in trace.steps)} deletes).")
print(f"SHD vs true pattern: {shd(estimate, truth)}")

counts = confusion_counts(estimate, truth)
print(f"Adjacency precision {counts.adjacency_precision:.2f}, "
      f"recall {counts.adjacency_recall:.2f}; "
      f"arrowhead precision {counts.arrowhead_precision:.2f}, "
      f"recall {counts.arrowhead_recall:.2f}")
