import random
from fractions import Fraction

import pytest

from fqapprox.algebra import Poly, field
from fqapprox.contfrac import cf_eval, cf_expand, repeat_quotient
from fqapprox.errors import PreconditionViolated
from fqapprox.exponents import (
    INF,
    PROFILE_COLUMNS,
    estimate_omega,
    mu_profile,
    omega_profile_matrix,
    predicted_exponents,
    profile_csv,
    shell_minima,
)
from fqapprox.laurent import Laurent, Vec2Laurent, random_unit_series
from fqapprox.orbit import normalize_pair

F2 = field(2)


def repeated_T(prec=96):
    return cf_eval(Poly.zero(F2), repeat_quotient(Poly.T(F2)), prec)


def one(prec=96):
    return Laurent.from_poly(Poly.one(F2), prec)


def test_predictions():
    z = predicted_exponents("zero", 1)
    assert (z.mu, z.mu_hat) == (1, 1)
    r = predicted_exponents("rational", 1)
    assert (r.mu, r.mu_hat) == (Fraction(1, 2), Fraction(1, 2))
    i = predicted_exponents("irrational", 1, 1)
    assert i.mu == Fraction(1, 3) and i.mu_is_lower_bound
    assert i.mu_hat == Fraction(1, 3)
    assert predicted_exponents("zero", INF).mu_hat == 0
    assert predicted_exponents("rational", INF).mu_hat == 0
    assert predicted_exponents("irrational", 2, INF).mu_hat == Fraction(1, 8)
    with pytest.raises(PreconditionViolated):
        predicted_exponents("zero", Fraction(1, 2))
    with pytest.raises(ValueError):
        predicted_exponents("other", 1)


def test_predictions_monotone():
    ws = [Fraction(n, 4) for n in range(4, 20)]
    hats = [predicted_exponents("rational", w).mu_hat for w in ws]
    assert all(a > b for a, b in zip(hats, hats[1:]))
    mus = [predicted_exponents("rational", w).mu for w in ws]
    assert all(a < b for a, b in zip(mus, mus[1:]))


def test_omega_profile_matrix_modes_agree():
    xi = random_unit_series(F2, random.Random(2), 48, -1)
    a = omega_profile_matrix(xi, None, 8)
    b = omega_profile_matrix(xi, None, 8, mode="scan")
    assert a == b
    om, omh = a
    assert om.kind == "omega" and omh.kind == "omega_hat"
    # uniform ratio is read with denominator h + 1
    assert all(r == Fraction(-e, h + 1) for h, e, r in zip(omh.heights, omh.best_err, omh.ratios))


def test_repeated_T_omega():
    xi = repeated_T()
    om, omh = omega_profile_matrix(xi, None, 12)
    assert omh.estimate() == 1
    # |<Q xi>| = q^-(h+1) for the best Q of degree h, so the ratio tends to 1
    assert om.best_err == tuple(-(h + 1) for h in om.heights)
    # deg Q_k = k: the later-half ratios are (k+1)/k for k = 10..19
    assert estimate_omega(cf_expand(xi, 20)) == Fraction(11, 10)


@pytest.mark.parametrize("case", ["zero", "rational"])
def test_constructed_never_beats_enumeration(case):
    xi = repeated_T()
    x = Vec2Laurent(xi, one())
    if case == "zero":
        np_ = normalize_pair(x)
    else:
        np_ = normalize_pair(x, rational=(Poly.one(F2), Poly.T(F2), one()))
    brute = shell_minima(np_, 6)
    built = shell_minima(np_, 6, mode="constructed")
    assert built
    for h, e in built.items():
        assert e >= brute[h]


def test_mu_profile_zero_target():
    np_ = normalize_pair(Vec2Laurent(repeated_T(), one()))
    mu, mu_hat = mu_profile(np_, 12, mode="constructed")
    assert all(r == 1 for r in mu.ratios)
    assert mu.label == "prefix evidence"
    assert mu.heights[0] >= 1


def test_profile_csv():
    xi = repeated_T()
    text = profile_csv(omega_profile_matrix(xi, None, 4))
    lines = text.splitlines()
    assert lines[0] == ",".join(PROFILE_COLUMNS)
    assert len(lines) == 9 and "." not in text
