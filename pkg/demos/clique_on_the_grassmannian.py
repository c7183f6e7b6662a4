"""Clique number as a quadratic maximized over rank-k projections.

Builds the edge form for a random graph, evaluates it at the Schur-Horn lift
of the uniform clique witness, then checks that multistart ascent on the
Stiefel pullback reaches the same value and never exceeds it.

Run: python3 demos/clique_on_the_grassmannian.py
"""
from fractions import Fraction

import numpy as np

from grassnp import generate, lift_diagonal, multistart_rgd
from grassnp.graphs import clique_number, max_clique
from grassnp.reductions import clique_decision_form, clique_number_form

g = generate("gnp", 7, Fraction(1, 2), seed=11)
omega = clique_number(g)
print(f"graph: n={g.n}, m={g.m}, max clique {max_clique(g)} (omega={omega})")

for k in range(1, omega + 1):
    inst = clique_number_form(g, k)
    # x_i = k/omega on the clique, 0 elsewhere, lifted to a projection with that diagonal
    P = lift_diagonal(inst.witness, k).P
    at_witness = inst.objective.eval_float(P)
    rep = multistart_rgd(inst, starts=20, iters=500, seed=42)
    print(f"k={k}: target {inst.theoretical_value} = {float(inst.theoretical_value):.6f}, "
          f"witness {at_witness:.12f}, local search {rep.best_value:.12f}")

# the decision form separates k-cliques from their absence
k = omega + 1
inst = clique_decision_form(g, k)
rep = multistart_rgd(inst, starts=20, iters=500, seed=42)
bound = k * k - 1 / (g.n + 1) ** 2
print(f"no {k}-clique: best {rep.best_value:.6f} stays below k^2 - 1/(n+1)^2 = {bound:.6f}")

# the best projection found is a genuine point of Gr(k, n)
P = rep.best_projection.P
print("P^2 = P:", np.allclose(P @ P, P), " trace:", round(float(np.trace(P)), 12))
