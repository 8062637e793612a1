import random
import warnings

import pytest

from fqapprox.algebra import Poly, field
from fqapprox.contfrac import cf_eval, repeat_quotient
from fqapprox.errors import (
    InsufficientTrust,
    PreconditionViolated,
    RationalSlopeFallback,
    SearchSpaceTooLarge,
    TableExhausted,
)
from fqapprox.inhomog import (
    LinearFormPair,
    PsiTable,
    cassels_pair,
    cassels_reduce,
    cassels_verify,
    corollary_table,
    dirichlet_solutions,
    inhom_solutions,
    linear_forms_2,
    minkowski_check,
    minkowski_inhom,
    monic_solutions,
    sharp_instance,
    sharpness_scan,
    worst_alpha_search,
)
from fqapprox.laurent import Laurent, from_rational, parse_series, random_unit_series

F2, F3 = field(2), field(3)


def rand_pair(spec, seed, prec=48):
    rng = random.Random(seed)
    return random_unit_series(spec, rng, prec, -1), random_unit_series(spec, rng, prec, -1)


@pytest.mark.parametrize("q", [2, 3])
def test_dirichlet(q):
    xi, _ = rand_pair(field(q), 1)
    for s in dirichlet_solutions(xi, 6):
        assert s.errdeg <= -s.Q.deg - 1
        assert s.recompute(xi) == s.errdeg


def test_dirichlet_needs_trust():
    with pytest.raises(InsufficientTrust):
        dirichlet_solutions(parse_series(F2, "T^-1+T^-3+O(T^-6)"), 10)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_cassels_reduce(q):
    spec = field(q)
    rng = random.Random(q)
    bad = 0
    for _ in range(200):
        theta, phi, psi, chi = (random_unit_series(spec, rng, 40, rng.randrange(-4, 3))
                                for _ in range(4))
        ddeg = max((theta * chi - phi * psi).deg_upper(), (psi * chi).deg_upper())
        P = cassels_reduce(theta, phi, psi, chi, ddeg)
        a = (theta + psi * P).deg_upper()
        b = (phi + chi * P).deg_upper()
        bad += not (a + b <= ddeg - 1 and a <= psi.norm_deg())
    assert bad == 0


def test_cassels_reduce_preconditions():
    one = Laurent.from_poly(Poly.one(F2), 10)
    with pytest.raises(PreconditionViolated):
        cassels_reduce(one, one, Laurent.zero(F2), one, 5)
    with pytest.raises(PreconditionViolated):
        cassels_reduce(one, one, one, one, -3)


def test_linear_forms_2():
    xi, eta = rand_pair(F2, 4)
    one = Laurent.from_poly(Poly.one(F2), 48)
    L = LinearFormPair.build(xi, one, eta, Laurent.from_poly(Poly.T(F2), 48))
    P1, P2 = linear_forms_2(L, 3, -3 - L.ddeg - 1)
    assert P1 or P2
    assert L.L1(P1, P2).deg_upper() < -3
    assert L.L2(P1, P2).deg_upper() < 3 + L.ddeg + 1
    with pytest.raises(PreconditionViolated):
        linear_forms_2(L, 3, -3 - L.ddeg)


def test_dependent_forms():
    xi, _ = rand_pair(F2, 5)
    with pytest.raises(PreconditionViolated):
        LinearFormPair.build(xi, xi, xi, xi)


@pytest.mark.parametrize("q", [2, 3])
def test_minkowski(q):
    spec = field(q)
    for seed in range(10):
        xi, rho = rand_pair(spec, seed, 64)
        one = Laurent.from_poly(Poly.one(spec), 64)
        L = LinearFormPair(xi, one, one, Laurent.zero(spec), 0)
        for k in range(5):
            Q1, Q2 = minkowski_inhom(L, -rho, Laurent.zero(spec), k)
            assert minkowski_check(L, -rho, Laurent.zero(spec), k, Q1, Q2) == (True, True)


def test_rational_slope_warns_and_swaps():
    spec = F2
    lam1 = Laurent.from_poly(Poly.one(spec), 48)
    kap1 = from_rational(Poly.one(spec), Poly.T(spec) + 1, 48)
    xi, rho = rand_pair(spec, 9)
    L = LinearFormPair.build(lam1, kap1, xi, Laurent.from_poly(Poly.one(spec), 48))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            minkowski_inhom(L, rho, rho, 2)
        except (InsufficientTrust, PreconditionViolated):
            pass
    assert any(issubclass(w.category, RationalSlopeFallback) for w in caught)


@pytest.mark.parametrize("q", [2, 3])
def test_inhom_solutions(q):
    spec = field(q)
    for seed in range(8):
        xi, alpha = rand_pair(spec, seed, 64)
        sols = inhom_solutions(xi, alpha, 5)
        assert len({s.Q for s in sols}) == 5
        for s in sols:
            assert (xi * s.Q - alpha - s.P).deg_upper() <= -2 - s.Q.deg


def test_inhom_rejects_rational():
    xi = from_rational(Poly.one(F2), Poly.T(F2), 10)
    with pytest.raises(PreconditionViolated):
        inhom_solutions(xi, xi, 2)


def test_sharp_instance_has_no_better_solution():
    for seed in range(6):
        xi, alpha = sharp_instance(F2, [1, 2], seed)
        rows, _ = sharpness_scan(xi, alpha, 6)
        assert all(err >= bound for _, err, bound in rows)
        assert any(err == bound for _, err, bound in rows)
    with pytest.raises(PreconditionViolated):
        sharp_instance(F2, [0], 0)


def test_worst_alpha_search():
    xi = cf_eval(Poly.zero(F2), repeat_quotient(Poly.T(F2)), 40)
    alpha, score = worst_alpha_search(xi, 3, 4)
    assert isinstance(score, int)
    # every alpha supported on T^-1..T^-4 can be approximated at least this well
    assert score >= -2 - 1 - 1
    assert alpha.exact
    with pytest.raises(SearchSpaceTooLarge):
        worst_alpha_search(xi, 12, 12)


@pytest.mark.parametrize("q", [2, 3])
def test_monic_solutions(q):
    spec = field(q)
    for seed in range(6):
        xi, alpha = rand_pair(spec, seed, 64)
        for s in monic_solutions(xi, alpha, 5):
            assert s.Q.is_monic()
            assert s.errdeg <= -1 - s.Q.deg


def test_psi_table(tmp_path):
    t = corollary_table(50, slowdown=2)
    path = tmp_path / "psi.csv"
    t.to_csv(path)
    assert PsiTable.from_csv(path) == t
    assert t.psi(0) == 0
    assert t.first_below(-3) == min(h for h, p in t.entries if p < -3)
    with pytest.raises(TableExhausted):
        t.first_below(-1000)
    with pytest.raises(ValueError):
        PsiTable(((0, -1), (1, 0)))
    with pytest.raises(ValueError):
        PsiTable(((1, 0), (1, -1)))


def test_small_cassels_pair():
    psi = corollary_table(400, slowdown=2)
    pair = cassels_pair(psi, 2, F2, seed=0)
    assert len(pair.S) == 4
    for n, h in enumerate(pair.H, start=1):
        assert pair.S[n + 1].deg == 1 + h + pair.S[n].deg
    # successive approximants agree
    for n in range(1, len(pair.S) - 1):
        a = from_rational(pair.R[n], pair.S[n], 40)
        assert (pair.xi - a).deg_upper() <= -2 * pair.S[n].deg - 1
    checks = cassels_verify(pair, psi)
    assert all(c.holds for c in checks)
