"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run under pytest (``pytest -v tests/test_acceptance.py``) or directly
(``python3 tests/test_acceptance.py``) for the eleven summary lines alone.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from curvid import harmonic as hm
from curvid import jets, models
from curvid.identities import (
    evaluate_table,
    kernel_coefficient_7d,
    residual_5d,
    residual_5d_scalar,
    residual_6d,
    residual_einstein,
)
from curvid.invariants import scalar_invariants, two_tensor_invariants
from curvid.pfaffian import (
    bracket_term_mass,
    euler_characteristic_homogeneous,
    euler_form,
    euler_form_naive,
    gauss_bonnet_bracket,
    pfaffian_two_tensor,
    pfaffian_two_tensor_naive,
)
from curvid.tensor_core import contract, naive_contract

PI = math.pi


def _max(x) -> float:
    return float(np.max(np.abs(x)))


def _rel(value, ref, scale=None) -> float:
    s = max(_max(ref), 1e-300) if scale is None else scale
    return _max(np.asarray(value) - np.asarray(ref)) / s


def universality_6d():
    start = time.perf_counter()
    worst = max(residual_6d(models.random_act(6, s, 1 + s % 5)).relative_error for s in range(200))
    elapsed = time.perf_counter() - start
    return worst <= 1e-10 and elapsed < 30, f"worst relative error {worst:.2e} over 200 seeds, {elapsed:.1f} s"


def universality_low_dims():
    worst = trace_gap = 0.0
    for m in (4, 5):
        for s in range(200):
            R = models.random_act(m, s, 1 + s % 5)
            scalar = residual_5d_scalar(R)
            tensor = residual_5d(R)
            worst = max(worst, scalar.relative_error, tensor.relative_error)
            trace_gap = max(trace_gap, abs(float(np.trace(tensor.residual)) - scalar.residual) / scalar.term_mass)
    ok = worst <= 1e-10 and trace_gap <= 1e-12
    return ok, f"worst relative error {worst:.2e}, trace gap {trace_gap:.2e} (dims 4, 5; 200 seeds each)"


def einstein_corollaries():
    worst = 0.0
    for m in (4, 5, 6):
        for s in range(50):
            R = models.make_einstein(models.random_act(m, s, 1 + s % 5))
            worst = max(worst, residual_einstein(R, m).relative_error)
    return worst <= 1e-9, f"worst relative error {worst:.2e} (dims 4, 5, 6; 50 seeds each)"


def pfaffian_kernels():
    t2 = e_embedded = e_ratio = 0.0
    for s in range(100):
        R = models.random_act(6, s, 1 + s % 5)
        scale = _max(R) ** 3
        t2 = max(t2, _max(pfaffian_two_tensor(R, 6)) / scale)
        e_ratio = max(e_ratio, abs(euler_form(R, 6) - 8 * gauss_bonnet_bracket(R)) / (8 * bracket_term_mass(R)))
        R5 = models.product_space(models.random_act(5, s, 1 + s % 5), models.flat(1))
        e_embedded = max(e_embedded, abs(euler_form(R5, 6)) / _max(R5) ** 3)
    fit = kernel_coefficient_7d([models.random_act(7, 1000 + s, 1 + s % 5) for s in range(20)])
    ok = t2 <= 1e-10 and e_embedded <= 1e-10 and e_ratio <= 1e-10 and fit["scatter"] <= 1e-8
    detail = (
        f"T2_66 {t2:.1e}, E_66 on 5-dim support {e_embedded:.1e}, E - 8 bracket {e_ratio:.1e}, "
        f"dim-7 lambda {fit['lambda']:.12g} scatter {fit['scatter']:.1e}"
    )
    return ok, detail


def euler_characteristics():
    start = time.perf_counter()
    cases = [
        ("S6", models.constant_curvature(6, 1.0), 16 * PI**3 / 15, 2, 1e-9),
        ("S2xS4", models.product_space(models.constant_curvature(2, 1.0), models.constant_curvature(4, 1.0)), 32 * PI**3 / 3, 4, 1e-9),
        ("S3xS3", models.product_space(models.constant_curvature(3, 1.0), models.constant_curvature(3, 1.0)), (2 * PI**2) ** 2, 0, 1e-9),
        ("T6", models.flat(6), 1.0, 0, 1e-9),
        ("CP3", models.complex_space_form(3, 4.0), PI**3 / 6, 4, 1e-7),
        ("S4", models.constant_curvature(4, 1.0), 8 * PI**2 / 3, 2, 1e-9),
    ]
    ok = True
    parts = []
    for name, R, vol, chi, tol in cases:
        got = euler_characteristic_homogeneous(R, vol)
        ok &= abs(got - chi) <= tol
        parts.append(f"{name} {got:.10f}")
    ok &= abs(euler_form(cases[0][1], 6) - 5760) <= 1e-9 * 5760
    ok &= abs(gauss_bonnet_bracket(cases[1][1]) - 144) <= 1e-10 * 144
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    return ok, ", ".join(parts) + f", {elapsed:.1f} s"


def singer_thorpe_forms():
    rng = np.random.default_rng(6)
    worst = roots_err = 0.0
    for a, b, c in rng.uniform(-2.0, 2.0, (100, 3)):
        R = models.singer_thorpe(a, b, c)
        s, t = scalar_invariants(R), two_tensor_invariants(R)
        tau = -4 * (a + b + c)
        sym = a * b + b * c + c * a
        expected = {
            "tau": tau,
            "R2": 5 / 6 * tau**2 - 32 * sym,
            "Rhat": 192 * a * b * c + 32 * tau * sym - 7 / 12 * tau**3,
            "Rring": 96 * a * b * c + 4 * tau * sym - tau**3 / 24,
        }
        scale = max(1.0, max(abs(v) for v in expected.values()))
        worst = max(worst, max(abs(getattr(s, k) - v) for k, v in expected.items()) / scale)
        g = np.eye(4)
        worst = max(worst, _rel(t.Rhat, s.Rhat / 4 * g, scale), _rel(t.Rring, s.Rring / 4 * g, scale))
        roots = np.sort(hm.singer_thorpe_cubic(R)["roots"])
        roots_err = max(roots_err, _max(roots - np.sort([a, b, c])))
    return worst <= 1e-10 and roots_err <= 1e-9, f"closed forms {worst:.1e}, cubic round trip {roots_err:.1e} (100 triples)"


def nikolayevsky_forms():
    rng = np.random.default_rng(7)
    worst = norm_err = weak_err = 0.0
    g = np.eye(5)
    for mu, nu in rng.uniform(-2.0, 2.0, (50, 2)):
        R = models.nikolayevsky(mu, nu)
        s, t = scalar_invariants(R), two_tensor_invariants(R)
        scale = max(1.0, abs(mu), abs(nu)) ** 3 * 1000
        checks = [
            (s.tau, -20 * mu + 30 * nu),
            (s.R2, 40 * mu**2 - 120 * mu * nu + 300 * nu**2),
            (t.RR, (8 * mu**2 - 24 * mu * nu + 60 * nu**2) * g),
            (t.Rcheck, (-32 * mu**3 + 144 * mu**2 * nu - 384 * mu * nu**2 + 360 * nu**3) * g),
            (t.Rhat, (16 * mu**3 - 72 * mu**2 * nu + 360 * mu * nu**2 - 600 * nu**3) * g),
            (t.Rring, (12 * mu**3 - 54 * mu**2 * nu + 18 * mu * nu**2 - 30 * nu**3) * g),
        ]
        worst = max(worst, max(_rel(v, e, max(1.0, _max(e))) for v, e in checks))
        norm_err = max(norm_err, abs(hm.einstein_nabla_norm(R) - 1680 * mu * nu**2) / max(1.0, abs(1680 * mu * nu**2)))
        weak = 2 * t.Rring - t.Rhat - s.tau / 100 * (9 * s.R2 - s.tau**2) * g
        weak_err = max(weak_err, _max(weak) / scale)
    ok = worst <= 1e-10 and norm_err <= 1e-10 and weak_err <= 1e-10
    return ok, f"closed forms {worst:.1e}, |nabla R|^2 formula {norm_err:.1e}, weakly-Einstein relation {weak_err:.1e} (50 pairs)"


def classification_mechanism():
    zero = np.zeros((5,) * 5)
    nik = hm.ledger_residuals(models.nikolayevsky(0.0, 1.0), zero)
    routes = hm.nikolayevsky_lambda3(1.0)
    spheres = [hm.ledger_residuals(models.constant_curvature(5, k), zero).order for k in (-1.0, 0.5, 2.0)]
    ok = (
        nik.order == 2
        and abs(nik.Lambda2 - 18) <= 1e-10
        and abs(routes["Lambda3_route_A"] - 1984) <= 1e-9
        and routes["mismatch"]
        and spheres == [3, 3, 3]
    )
    detail = (
        f"nikolayevsky(0,1) order {nik.order}, Lambda2 {nik.Lambda2:.12g}, route A {routes['Lambda3_route_A']:.12g}, "
        f"route B {routes['Lambda3_route_B']:.12g}; constant curvature orders {spheres}"
    )
    return ok, detail


def inequality_margins():
    cc = max(abs(hm.harmonic_inequalities(models.constant_curvature(m, 1.0))["lichnerowicz_margin"]) for m in (4, 5, 6))
    nik = hm.harmonic_inequalities(models.nikolayevsky(0.0, 1.0))["lichnerowicz_margin"]
    tach = hm.harmonic_inequalities(models.complex_space_form(3, 4.0), kahler_n=3)["tachibana_margin"]
    L = (3.0, 3.0, 128.0)
    f = hm.f_derivatives(*L)
    dictionary = f == (-2 / 3 * L[0], -8 / 45 * L[1], -L[2] / 315) and np.allclose(hm.lambdas_from_f(*f), L, rtol=1e-15)
    ok = cc <= 1e-12 and nik < 0 and abs(tach) <= 1e-9 and dictionary
    return ok, f"constant curvature {cc:.1e}, nikolayevsky {nik:.6g}, CP3 {tach:.1e}, f dictionary {'exact' if dictionary else 'wrong'}"


def jet_engine():
    start = time.perf_counter()
    sphere = jets.curvature_jet(jets.sphere_chart(6), 4)
    r_err = _max(sphere.R - models.constant_curvature(6, 1.0))
    nabla = _max(sphere.nabla_R)
    lich_sphere = jets.verify_lichnerowicz_formula(sphere).relative_error
    ricci = sphere.ricci_identity_residual()
    lich_flat = 0.0
    for m, seed in ((4, 0), (5, 1), (6, 2)):
        cj = jets.curvature_jet(jets.perturbed_flat_chart(m, seed=seed, eps=1e-2), 4)
        lich_flat = max(lich_flat, jets.verify_lichnerowicz_formula(cj).relative_error)
        ricci = max(ricci, cj.ricci_identity_residual())
    elapsed = time.perf_counter() - start
    ok = r_err <= 1e-11 and nabla <= 1e-11 and lich_sphere <= 1e-8 and lich_flat <= 1e-7 and ricci <= 1e-9 and elapsed < 60
    detail = (
        f"S6 R {r_err:.1e}, nabla R {nabla:.1e}, identity sphere {lich_sphere:.1e} perturbed {lich_flat:.1e}, "
        f"Ricci identity {ricci:.1e}, {elapsed:.1f} s"
    )
    return ok, detail


ORACLE_SPECS = [
    ("iabc,jabc->ij", (4, 4)),
    ("ab,iabj->ij", (2, 4)),
    ("cd,iabc,jabd->ij", (2, 4, 4)),
    ("abcd,abuv,cduv->", (4, 4, 4)),
    ("abcd,aucv,budv->", (4, 4, 4)),
    ("iuvj,abcu,abcv->ij", (4, 4, 4)),
    ("abab->", (4,)),
]


def oracle_equivalence():
    worst = 0.0
    rng = np.random.default_rng(11)
    for m in (2, 3, 4, 5):
        specs = ORACLE_SPECS if m <= 4 else ORACLE_SPECS[:3]
        for spec, ranks in specs:
            ops = [rng.uniform(-1, 1, (m,) * r) for r in ranks]
            ref = naive_contract(spec, *ops)
            worst = max(worst, _rel(contract(spec, *ops), ref))
        for s in range(3 if m <= 4 else 1):
            R = models.random_act(m, s, 3)
            for n in (2, 4):
                worst = max(worst, _rel(euler_form(R, n), euler_form_naive(R, n)))
                worst = max(worst, _rel(pfaffian_two_tensor(R, n), pfaffian_two_tensor_naive(R, n)))
            for name, value in two_tensor_invariants(R).as_dict().items():
                worst = max(worst, _rel(value, getattr(two_tensor_invariants(R, reference=True), name)))
    return worst <= 1e-13, f"worst relative gap {worst:.1e} (dims 2-4 full, dim 5 spot checks)"


CRITERIA = {
    1: ("6-dim identity universal", universality_6d),
    2: ("5/4-dim identities universal, trace coherence", universality_low_dims),
    3: ("Einstein corollaries", einstein_corollaries),
    4: ("Pfaffian kernel facts", pfaffian_kernels),
    5: ("Euler characteristics", euler_characteristics),
    6: ("Singer-Thorpe closed forms and cubic", singer_thorpe_forms),
    7: ("Nikolayevsky closed forms", nikolayevsky_forms),
    8: ("order-3 obstruction for the Nikolayevsky space", classification_mechanism),
    9: ("inequality margins", inequality_margins),
    10: ("jet engine", jet_engine),
    11: ("oracle equivalence", oracle_equivalence),
}


def _line(number: int) -> tuple[bool, str]:
    title, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = _line(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
