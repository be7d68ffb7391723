"""Degrees of the iterates of the N = 3 q-Painleve map next to the bound read
off the lattice action; the stride-3 second differences settle at a constant."""

from weyltrop.painleve import QPA_WORD, AffineConfigA, degree_growth_table, lattice_act_A

A = AffineConfigA(3)
rows = degree_growth_table(A.initial(), QPA_WORD, 8, "f1", act=lambda g, v: lattice_act_A(A.cfg, g, v))
print(" n  deg(f1) bound")
for r in rows:
    print(f"{r.n:2d}  {r.degrees[0]:7d} {r.bounds[0]:5d}")
seq = [r.degrees[0] for r in rows]
print("stride-3 second differences:", [seq[n + 3] - 2 * seq[n] + seq[n - 3] for n in range(3, len(seq) - 3)])
