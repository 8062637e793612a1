"""Command line driver: one subcommand per experiment, CSV or JSON on stdout.

Exit codes: 0 all checks pass, 1 a falsification was recorded, 2 usage or
configuration error, 3 search space too large or insufficient precision.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import contfrac, exponents, inhomog, orbit
from .algebra import NEG_INF, Poly, _is_prime, field, format_poly, parse_poly
from .errors import (
    FqError,
    InsufficientTrust,
    ParseError,
    PreconditionViolated,
    SearchSpaceTooLarge,
    UndeterminedToPrecision,
)
from .laurent import Laurent, Vec2Laurent, format_series, parse_series, random_unit_series

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class Report:
    """Rows of one table plus a falsification flag."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.falsified = False

    def add(self, *values, ok=True):
        self.rows.append([_cell(v) for v in values])
        if ok is False:
            self.falsified = True

    def render(self, fmt):
        if fmt == "json":
            recs = [dict(zip(self.columns, r)) for r in self.rows]
            return json.dumps({"columns": self.columns, "rows": recs}, indent=1) + "\n"
        lines = [",".join(self.columns)]
        for r in self.rows:
            lines.append(",".join(_csv_field(v) for v in r))
        return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, Poly):
        return format_poly(v)
    if isinstance(v, Laurent):
        return format_series(v)
    if isinstance(v, float):
        if v == NEG_INF:
            return "-inf"
        raise TypeError("floats are not emitted")
    if v is None:
        return ""
    return v


def _csv_field(v):
    s = str(v)
    if any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


# -- input helpers ---------------------------------------------------------

def _spec(args):
    if not _is_prime(args.q):
        raise ParseError("only prime q is supported on the command line")
    spec = field(args.q)
    if args.modulus is not None:
        m = parse_poly(spec, args.modulus)
        if m.deg != 1 or not m.is_monic():
            raise ParseError("a prime field takes a monic linear modulus")
    if args.prec < 2:
        raise ParseError("--prec must be at least 2")
    return spec


def _series(spec, text, args, salt):
    """Parsed series, or a random unit series of degree -1 from the seed."""
    if text is not None:
        return parse_series(spec, text)
    rng = random.Random(args.seed * 1000003 + salt)
    return random_unit_series(spec, rng, args.prec, -1)


def _xi(spec, args):
    if args.xi_cf is not None:
        a0, qs = contfrac.parse_cf(spec, args.xi_cf)
        if args.xi_cf_repeat:
            return contfrac.cf_eval(a0, _cycle(qs), args.prec)
        return contfrac.cf_eval(a0, qs, args.prec)
    return _series(spec, args.xi, args, 1)


def _cycle(qs):
    while True:
        yield from qs


def _one(spec, prec):
    return Laurent.from_poly(Poly.one(spec), prec)


def _slope(spec, text):
    if "/" in text:
        a, b = text.split("/", 1)
        return parse_poly(spec, a), parse_poly(spec, b)
    return parse_poly(spec, text), Poly.one(spec)


def _pair(spec, args):
    xi = _xi(spec, args)
    x = Vec2Laurent(xi, _one(spec, args.prec))
    if args.slope is not None:
        A, B = _slope(spec, args.slope)
        return orbit.normalize_pair(x, rational=(A, B, _one(spec, args.prec)))
    if args.y is not None:
        y = Vec2Laurent(parse_series(spec, args.y), _one(spec, args.prec))
        return orbit.normalize_pair(x, y=y)
    return orbit.normalize_pair(x)


def _deg(d):
    return "-inf" if d == NEG_INF else int(d)


# -- subcommands -------------------------------------------------------------

def cmd_cf(args, spec):
    xi = _xi(spec, args)
    cf = contfrac.cf_expand(xi, args.count)
    rep = Report(["k", "quotient", "P", "Q", "deg_Q", "errdeg", "trusted"])
    for k in range(1, cf.n + 1):
        try:
            err = _deg((xi * cf.Q(k) - cf.P(k)).norm_deg())
        except UndeterminedToPrecision:
            err = ""
        rep.add(k, cf.quotients[k - 1], cf.P(k), cf.Q(k), cf.dQ(k), err, k <= cf.trusted)
    ident = contfrac.cf_identity_report(cf, xi)
    if not ident.ok:
        rep.falsified = True
    return rep


def cmd_dirichlet(args, spec):
    xi = _xi(spec, args)
    rep = Report(["n", "Q", "P", "errdeg", "bound"])
    for n, s in enumerate(inhomog.dirichlet_solutions(xi, args.count), start=1):
        bound = -1 - s.Q.deg
        rep.add(n, s.Q, s.P, _deg(s.errdeg), bound, ok=s.errdeg <= bound)
    return rep


def cmd_minkowski(args, spec):
    xi = _xi(spec, args)
    alpha = _series(spec, args.alpha, args, 2)
    rep = Report(["Q", "P", "errdeg", "bound"])
    sols = inhomog.inhom_solutions(xi, alpha, args.count)
    for s in sorted(sols, key=lambda s: (s.Q.deg, s.Q.index())):
        bound = -2 - s.Q.deg
        rep.add(s.Q, s.P, _deg(s.errdeg), bound, ok=s.errdeg <= bound)
    return rep


def cmd_sharpness(args, spec):
    degrees = [int(d) for d in args.degrees.split(",")]
    xi, alpha = inhomog.sharp_instance(spec, degrees, args.seed, args.prec)
    rows, _ = inhomog.sharpness_scan(xi, alpha, args.qdeg if args.qdeg is not None else 6)
    rep = Report(["Q", "errdeg", "bound"])
    for Q, e, b in rows:
        if Q.deg > 0:
            rep.add(Q, e, b, ok=e >= b)
    return rep


def cmd_monic(args, spec):
    xi = _xi(spec, args)
    alpha = _series(spec, args.alpha, args, 2)
    rep = Report(["Q", "P", "errdeg", "bound"])
    for s in inhomog.monic_solutions(xi, alpha, args.count):
        bound = -1 - s.Q.deg
        rep.add(s.Q, s.P, _deg(s.errdeg), bound, ok=s.Q.is_monic() and s.errdeg <= bound)
    return rep


def cmd_casselspair(args, spec):
    if args.psi_table is not None:
        psi = inhomog.PsiTable.from_csv(args.psi_table)
    else:
        psi = inhomog.corollary_table(args.hdeg if args.hdeg is not None else 6000, slowdown=2)
    pair = inhomog.cassels_pair(psi, args.count, spec, args.seed)
    rep = Report(["n", "h", "deg_S", "best_err", "floor", "psi_h", "holds"])
    for c in inhomog.cassels_verify(pair, psi):
        rep.add(c.n, c.h, pair.S[c.n].deg, c.best_err, c.floor, c.psi_h, c.holds, ok=c.holds)
    return rep


def _constructed(np_, H):
    return exponents._constructed_candidates(np_, H)


def cmd_orbit(args, spec):
    np_ = _pair(spec, args)
    H = args.hdeg if args.hdeg is not None else 4
    brute = orbit.brute_orbit(np_, H)
    rep = Report(orbit.ORBIT_COLUMNS)
    cands = []
    for h, (e, mats) in brute.shells.items():
        for g in mats:
            cands.append(orbit.OrbitCandidate(g, e, source="brute"))
    constructed = _constructed(np_, H)
    bad = set()
    for c in constructed:
        c.source = "construct"
        got = brute.lookup(c.gamma)
        best = brute.shells[c.hdeg][0]
        if got is None or got != c.errdeg or c.errdeg < best or not c.ok:
            bad.add(id(c))
    cands.extend(constructed)
    cands.sort(key=lambda c: (c.hdeg, 0 if c.source == "brute" else 1, c.gamma.key()))
    for row, c in zip(orbit.orbit_rows(cands), cands):
        rep.add(*row, ok=id(c) not in bad)
    return rep


def cmd_lb(args, spec):
    np_ = orbit.normalize_pair(Vec2Laurent(_xi(spec, args), _one(spec, args.prec)))
    ks = [args.k] if args.k is not None else range(1, args.count + 1)
    rep = Report(["k", "H", "threshold", "min_err", "Mk_attains", "passed"])
    for k in ks:
        r = orbit.lb_check(np_, k)
        rep.add(k, r.H, r.threshold, r.min_err, r.notes["Mk_attains"], r.passed,
                ok=r.passed and r.notes["Mk_attains"])
    return rep


def cmd_gap(args, spec):
    if args.slope is None:
        raise ParseError("gap needs --slope A/B")
    np_ = _pair(spec, args)
    cf = np_.xi_cf(args.count + 2)
    if args.k is not None:
        k = args.k
    else:
        need = np_.B.deg + np_.dx2 - np_.dy2
        k = next((k for k in range(1, cf.n + 1) if cf.dQ(k) > need), None)
        if k is None:
            raise InsufficientTrust("no admissible k among the certified convergents")
    r = orbit.gap_check(np_, k)
    rep = Report(["k", "H", "threshold", "min_err", "passed"])
    rep.add(k, r.H, r.threshold, r.min_err, r.passed, ok=r.passed)
    return rep


def cmd_count(args, spec):
    b1 = args.b1 if args.b1 is not None else 0
    b2 = args.b2 if args.b2 is not None else 0
    exact, ratio = orbit.sl2_count(spec, b1, b2)
    rep = Report(["b1", "b2", "exact", "ratio_num", "ratio_den"])
    rep.add(b1, b2, exact, ratio.numerator, ratio.denominator)
    return rep


def cmd_exponent(args, spec):
    H = args.hdeg if args.hdeg is not None else 12
    rep = Report(exponents.PROFILE_COLUMNS)
    if args.kind == "omega":
        xi = _xi(spec, args)
        theta = parse_series(spec, args.alpha) if args.alpha is not None else None
        profs = exponents.omega_profile_matrix(xi, theta, H)
    else:
        profs = exponents.mu_profile(_pair(spec, args), H, args.mode)
    for p in profs:
        for h, e, r in zip(p.heights, p.best_err, p.ratios):
            rep.add(h, int(e), r.numerator, r.denominator, p.kind)
    return rep


COMMANDS = {
    "cf": cmd_cf,
    "dirichlet": cmd_dirichlet,
    "minkowski": cmd_minkowski,
    "sharpness": cmd_sharpness,
    "monic": cmd_monic,
    "casselspair": cmd_casselspair,
    "orbit": cmd_orbit,
    "lb": cmd_lb,
    "gap": cmd_gap,
    "count": cmd_count,
    "exponent": cmd_exponent,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=2, help="field size (prime)")
    common.add_argument("--modulus", default=None, help="field modulus (prime fields: monic linear)")
    common.add_argument("--prec", type=int, default=48, help="series precision")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--qdeg", type=int, default=None, help="degree bound for Q scans")
    common.add_argument("--hdeg", type=int, default=None, help="height degree bound")
    common.add_argument("--b1", type=int, default=None, help="first column degree bound")
    common.add_argument("--b2", type=int, default=None, help="second column degree bound")
    common.add_argument("--count", type=int, default=5)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--psi-table", default=None, help="CSV with columns h, psi_h")
    common.add_argument("--xi", default=None, help="xi in series text format")
    common.add_argument("--xi-cf", default=None, help="xi as [A0; A1, ...]")
    common.add_argument("--xi-cf-repeat", action="store_true",
                        help="repeat the partial quotients of --xi-cf forever")
    common.add_argument("--alpha", default=None, help="inhomogeneous target (series text)")
    common.add_argument("--slope", default=None, help="rational target slope A/B")
    common.add_argument("--y", default=None, help="irrational target slope (series text)")
    common.add_argument("--k", type=int, default=None, help="convergent index")
    common.add_argument("--degrees", default="1", help="sharp instance quotient degrees")
    common.add_argument("--kind", choices=("omega", "mu"), default="omega")
    common.add_argument("--mode", choices=("brute", "constructed"), default="brute")
    parser = argparse.ArgumentParser(prog="fqapprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        spec = _spec(args)
        rep = COMMANDS[args.command](args, spec)
    except (SearchSpaceTooLarge, InsufficientTrust, UndeterminedToPrecision) as exc:
        print(f"fqapprox: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, PreconditionViolated, FqError, ValueError, OSError) as exc:
        print(f"fqapprox: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = rep.render(args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_FALSIFIED if rep.falsified else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
