"""The twelve acceptance checks, each returning what it measured.

Every check is self-contained and deterministic. ``run_all`` is what the
``verify`` subcommand and the acceptance test print.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import closedform as cf
from . import continuum as ct
from . import oracle as orc
from .models import (bipartite_pvalent, constellation, formal, ising, numeric, tetra_hexa,
                     tetravalent, tri_tetra, trivalent)
from .recursion import integral_of_motion, solve_sequences


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    measured: str
    threshold: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:2d}. {self.title}: {self.measured} "
                f"(need {self.threshold}; {self.seconds:.1f}s)")


# models used at fixed numeric points; bookkeeping bindings keep one formal variable
def closed_form_cases():
    """``(label, model, values)`` for the closed-form comparison."""
    return [
        ("tetravalent", tetravalent(), {"g": 1 / 24}),
        ("trivalent", trivalent(), {"g": 0.1}),
        ("bipartite3", bipartite_pvalent(3, {"gt1": numeric(1)}), {"g": 0.1}),
        # g4 = 1/40, g6 = 1/1000; unit scale on g4 keeps the exact coefficients small
        ("tetra_hexa", tetra_hexa({"g4": formal("t"), "g6": formal("t", "1/25")}),
         {"t": 1 / 40}),
        ("constellation3",
         constellation(3, {2: "gt2"}, {"g": formal("t"), "gt2": formal("t", "1/400")},
                       label="constellation3_hexa"),
         {"t": 1.0}),
    ]


def check_tutte() -> CheckResult:
    diff = cf.special_value_identities(tetravalent(), 16)["R"]
    ok = diff.is_zero()
    return CheckResult(1, "R_0 = R - gR^3 to order 16", ok,
                       f"max |coefficient| = {float(diff.max_abs_coefficient()):.0f}", "exactly 0")


def _series_coefficients(N_max: int):
    fam = solve_sequences(tetravalent(), N_max)
    return fam, lambda n, N: int(fam.lookup("R", n).coefficient(N))


def check_census(N_max: int = 6) -> CheckResult:
    fam, coeff = _series_coefficients(N_max)
    bad = []
    mismatches = trees = 0
    for N in range(1, N_max + 1):
        res = orc.census_with_check(orc.TETRAVALENT, N, check_dual=(N == N_max), allow_large=True)
        table: dict[int, int] = {}
        for (_, d), c in res["table"].items():
            table[d] = table.get(d, 0) + c
        sums = orc.partial_sums(table, N + 2)
        bad += [(N, n) for n in range(N + 3) if sums[n] != coeff(n, N)]
        if N == N_max:
            mismatches, trees = res["mismatches"], res["trees"]
    ok = not bad and mismatches == 0 and trees == 3 ** N_max * orc.catalan(N_max)
    return CheckResult(2, f"census partial sums = [g^N]R_n, N <= {N_max}; contour = dual", ok,
                       f"{len(bad)} sum mismatches, {mismatches} distance mismatches on "
                       f"{trees} trees", "0 and 0 on 96228")


def check_tree_counts() -> CheckResult:
    bad = []
    for N in range(1, 7):
        if len(orc.enumerate_trees(orc.TETRAVALENT, N, allow_large=True)) != 3 ** N * orc.catalan(N):
            bad.append(("tetravalent", N))
    for p in (3, 4):
        fam = orc.OracleFamily("bipartite", p=p)
        for N in range(1, 6):
            if len(orc.enumerate_trees(fam, N, allow_large=True)) != (p - 1) ** N * orc.fuss_catalan(N, p):
                bad.append((f"bipartite{p}", N))
    return CheckResult(3, "tree counts 3^N c_N and (p-1)^N C_N^(p)", not bad,
                       f"{len(bad)} mismatching counts", "0")


def check_closed_forms(cutoff: int = 60) -> CheckResult:
    worst, slowest, parts = 0.0, 0.0, []
    for label, model, values in closed_form_cases():
        t0 = time.perf_counter()
        rows = cf.comparison_table(model, values, cutoff=cutoff, ns=range(21))
        dt = time.perf_counter() - t0
        d = max(r[3] for r in rows)
        worst, slowest = max(worst, d), max(slowest, dt)
        parts.append(f"{label} {d:.1e}")
    ok = worst < 1e-8 and slowest < 10
    return CheckResult(4, "closed forms vs order-60 series, n <= 20", ok,
                       f"{'; '.join(parts)}; slowest {slowest:.1f}s", "< 1e-8, each < 10s")


def check_special_values() -> CheckResult:
    cases = [(tetra_hexa(), 10), (trivalent(), 12), (bipartite_pvalent(3), 12),
             (bipartite_pvalent(4), 10), (cf.constellation3_hexavalent(), 8)]
    nonzero = []
    for model, order in cases:
        for name, diff in cf.special_value_identities(model, order).items():
            if not diff.is_zero():
                nonzero.append(f"{model.label}:{name}")
    return CheckResult(5, "special-value identities", not nonzero,
                       f"{len(nonzero)} nonzero differences" + (f" ({', '.join(nonzero)})" if nonzero else ""),
                       "all exactly 0")


def lambda_fixing_cases():
    return [
        ("even m=2", tetra_hexa({"g4": formal("t", "1/40"), "g6": formal("t", "1/1000")}),
         {"t": 1.0}, 2),
        ("bipartite p=4", bipartite_pvalent(4, {"gt1": numeric(1)}), {"g": 0.02}, 2),
    ]


def check_lambda_fixing() -> CheckResult:
    worst, parts = 0.0, []
    for label, model, values, m in lambda_fixing_cases():
        sol = cf.tau_solution(model, values)
        u0 = abs(cf.tau_u(0, sol))
        v = max(abs(cf.tau_u(-k, sol)) for k in range(1, m + 1)) / max(u0, 1.0)
        worst = max(worst, v)
        parts.append(f"{label} {v:.1e}")
    return CheckResult(6, "u_{-1} = ... = u_{-m} = 0 after fixing lambdas", worst < 1e-10,
                       "; ".join(parts), "< 1e-10")


def check_one_x() -> CheckResult:
    worst, parts = 0.0, []
    tt = tri_tetra()
    for lam in (0.7, -0.4):
        r = cf.one_x_residual(tt, {"g3": 0.05, "g4": 0.02}, 1, lam)
        worst = max(worst, r)
    parts.append(f"tri/tetra {worst:.1e}")
    ising_model = ising(reduced=True)
    w2 = 0.0
    for branch in (1, 2, 3):
        for lam in (0.7, -0.4):
            w2 = max(w2, cf.one_x_residual(ising_model, {"g": 0.02}, branch, lam))
    parts.append(f"Ising x1..x3 {w2:.1e}")
    worst = max(worst, w2)
    return CheckResult(7, "one-x solutions solve their recursions, n in [5, 15]", worst < 1e-9,
                       "; ".join(parts), "< 1e-9")


def check_integral_of_motion(cutoff: int = 14) -> CheckResult:
    fam = solve_sequences(tetravalent(), cutoff)
    vals = integral_of_motion(fam)
    spread = max((v - vals[0]).max_abs_coefficient() for v in vals)
    return CheckResult(8, "f(R_n, R_{n+1}) independent of n to order 14", spread == 0,
                       f"max coefficient spread {float(spread):.0f} over {len(vals)} values",
                       "exactly 0")


def check_ising_systems(cutoff: int = 8) -> CheckResult:
    full = solve_sequences(ising(), cutoff)
    red = solve_sequences(ising(reduced=True), cutoff)
    n_top = min(full.n_max, red.n_max)
    diff = max(max((full[(s, n)] - red[(s, n)]).max_abs_coefficient() for s in ("R", "V"))
               for n in range(n_top + 1))
    dual = max((full[("R", n)] - full[("V", n)] * full[("X1", n + 1)]).max_abs_coefficient()
               for n in range(full.n_max))
    ok = diff == 0 and dual == 0
    return CheckResult(9, "Ising 5-sequence vs reduced system; R_n = V_n X1_{n+1}", ok,
                       f"max difference {float(diff):.0f}, duality defect {float(dual):.0f}",
                       "exactly 0")


def check_continuum_odes() -> CheckResult:
    grid = np.linspace(0.3, 6, 58)
    tet = ct.ode_residual(ct.ScalingFunction.tetravalent(), "painleve1", grid)
    w2 = ct.ode_residual(ct.ScalingFunction.wronskian(2), "painleve2", grid)
    isg = ct.ode_residual(ct.ScalingFunction.ising(), "ising", grid)
    kdv_ok = True
    for m, ode in ((2, "painleve1"), (3, "painleve2")):
        _, norm = ct.kdv_difference(m).normalized()
        kdv_ok &= norm == ct.CONTINUUM_ODES[ode]
    ok = tet < 1e-9 and w2 < 1e-7 and isg < 1e-7 and kdv_ok
    return CheckResult(10, "scaling functions solve their ODEs; KdV ratios", ok,
                       f"tetravalent {tet:.1e}, Wronskian m=2 {w2:.1e}, Ising {isg:.1e}, "
                       f"KdV ratios {'exact' if kdv_ok else 'differ'}",
                       "< 1e-9, < 1e-7, < 1e-7, exact")


def check_critical_data() -> CheckResult:
    d = ct.ising_critical_data()
    err = max(abs(d.extra["c"] - 4), abs(d.g_c - 10 / 9), abs(d.R_c + 0.6), abs(d.V_c + 0.3))
    a1 = ct.multicritical_data(1).rates[0]
    grid = np.linspace(0.1, 8, 80)
    w1, tet = ct.ScalingFunction.wronskian(1), ct.ScalingFunction.tetravalent()
    fd = max(abs(ct.scaling_two_point(w1, r, 0).value - ct.scaling_two_point(tet, r, 0).value)
             for r in grid)
    ok = err < 1e-8 and abs(a1 - math.sqrt(6)) < 1e-14 and fd < 1e-12
    return CheckResult(11, "Ising critical point; m=1 Wronskian = 3/sinh^2", ok,
                       f"critical error {err:.1e}, a1 - sqrt6 = {a1 - math.sqrt(6):.1e}, "
                       f"F difference {fd:.1e}", "< 1e-8, = sqrt6, < 1e-12")


def check_asymptotics(N: int = 2000) -> CheckResult:
    t0 = time.perf_counter()
    ca = ct.coefficient_asymptotics(10 ** 5)
    ca_ok = abs(ca * math.sqrt(math.pi) - 1) < 0.01
    table = ct.tetravalent_coefficient_table(3, N)
    ratios = [ct.fractal_ratio(3, k, table) for k in (500, 1000, N)]
    target = ct.fractal_target(3)
    toward = all(abs(b - target) < abs(a - target) for a, b in zip(ratios, ratios[1:]))
    fr_ok = abs(ratios[-1] / target - 1) < 0.25 and toward
    rs = np.arange(0.2, 4.01, 0.2)
    ps = [ct.distance_probability(r) for r in rs]
    p_ok = bool(np.all(np.diff(ps) >= 0)) and ct.distance_probability(10) > 0.999
    ok = ca_ok and fr_ok and p_ok and time.perf_counter() - t0 < 180
    return CheckResult(12, "asymptotics and fractality", ok,
                       f"N^1.5 c_N sqrt(pi) = {ca * math.sqrt(math.pi):.4f}; fractal_ratio(3, N) "
                       f"= {', '.join(f'{r:.2f}' for r in ratios)} for N = 500, 1000, {N} vs "
                       f"(3/56)81 = {target:.2f}; P monotone {p_ok}",
                       "within 1%, within 25% and approaching, monotone with P(10) > 0.999")


CHECKS: list[Callable[[], CheckResult]] = [
    check_tutte, check_census, check_tree_counts, check_closed_forms, check_special_values,
    check_lambda_fixing, check_one_x, check_integral_of_motion, check_ising_systems,
    check_continuum_odes, check_critical_data, check_asymptotics,
]


def run_check(number: int) -> CheckResult:
    if not 1 <= number <= len(CHECKS):
        raise ValueError(f"acceptance criteria are numbered 1..{len(CHECKS)}")
    t0 = time.perf_counter()
    res = CHECKS[number - 1]()
    res.seconds = time.perf_counter() - t0
    return res


def run_all() -> list[CheckResult]:
    return [run_check(k) for k in range(1, len(CHECKS) + 1)]
