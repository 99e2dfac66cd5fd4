"""
Simulating QAOA on a small MAX-2-SAT instance
=============================================

Build a random instance, look at its cost spectrum, run the ansatz and
train a few layers.
"""

import numpy as np

from qaoa_depth import (
    QaoaParameters,
    analyze_spectrum,
    build_hamiltonian,
    energy_gradient,
    expectation,
    generate_instance,
    ground_overlap,
    initial_state,
    layerwise_train,
    prepare_ansatz,
    stability_bounds,
)
from qaoa_depth.training import TrainConfig

# 6 variables, 12 clauses: density 2, well past the satisfiability threshold
inst = generate_instance(6, 12, seed=2024)
print(inst.clauses)

# The cost is diagonal: entry z counts the clauses assignment z violates.
h = build_hamiltonian(inst)
spec = analyze_spectrum(h)
print("ground energy", spec.ground_energy, "degeneracy", spec.degeneracy,
      "gap", spec.gap, "max", spec.max_energy)

# The uniform superposition always sits at m/4.
print("<+|H|+> =", expectation(initial_state(inst.n), h), "m/4 =", inst.m / 4)

# One layer at hand-picked angles, plus the exact gradient there.
params = QaoaParameters(gamma=(0.4,), beta=(0.3,))
psi = prepare_ansatz(h, params)
print("p=1 energy", expectation(psi, h))
print("gradient [d/dgamma, d/dbeta]", energy_gradient(h, params))

# Layerwise training: each depth starts from the previous optimum.  Once the
# energy error is below the gap it bounds the success probability both ways.
for res in layerwise_train(h, 5, TrainConfig(seeds_per_step=10)):
    f = res.energy - spec.ground_energy
    g = ground_overlap(prepare_ansatz(h, res.params), spec)
    b = stability_bounds(f, spec.gap, spec.max_energy)
    print(f"p={res.p}  f={f:.4f}  overlap={g:.4f}  bounds=[{b.lower:.4f}, {b.upper:.4f}]")

angles = np.round(res.params.to_vector(), 3)
print("final angles", angles)
