"""Compare soliton closed forms with the series solution at sample couplings."""

from planargeo.closedform import comparison_table
from planargeo.models import tetravalent, trivalent

for model, at in ((tetravalent(), {"g": 1 / 24}), (trivalent(), {"g": 0.1})):
    print(f"== {model.label or model.family} at {at}")
    print(f"{'n':>3} {'closed':>20} {'series':>20} {'|diff|':>10}")
    for n, closed, series, diff in comparison_table(model, at, cutoff=60, ns=range(0, 21, 4)):
        print(f"{n:>3} {closed:>20.15f} {series:>20.15f} {diff:>10.1e}")
    print()
