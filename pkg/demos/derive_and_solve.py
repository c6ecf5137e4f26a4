"""Derive the distance recursion of a few models and print low-order series."""

from planargeo.models import constellation, ising, tetravalent, trivalent
from planargeo.qoperator import build_recursion_system
from planargeo.recursion import solve_sequences

for model in (tetravalent(), trivalent(), constellation(3, {1: "gt1"}), ising(reduced=True)):
    print(f"== {model.label or model.family}")
    for eq in build_recursion_system(model):
        print("  ", eq.solved())
    fam = solve_sequences(model, 4)
    for n in range(4):
        print(f"   R[{n}] =", fam[("R", n)])
    print()
