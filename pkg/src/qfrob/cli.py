"""Command-line front end: argument/config handling, check orchestration,
and deterministic JSON/text reports.

Exit codes: 0 pass, 2 parse/config error, 3 hypothesis violation,
4 check failed, 5 internal error.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .arith import IntPoly, RatFunc, taylor_at_one
from .madic import (
    HypothesisError,
    MAdicContext,
    valuation_poly,
)
from .congruence import (
    check_cyclotomic_congruence,
    check_dwork_conclusion,
    ev_mod_p_series,
    find_relation,
    run_dwork_checks,
)
from .frobenius import (
    SeriesMatrix,
    check_confluence_order1,
    check_frobenius_structure,
    check_semilinear_action,
    hypergeometric_system_matrix,
    order1_transition_matrix,
)
from .qseries import f_alpha_cleared, f_alpha_frobenius_image

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_CHECK_FAILED = 4
EXIT_INTERNAL = 5


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomial expressions: integers, q, + - * ^ ( )


def tokenize(expr):
    out = []
    i = 0
    while i < len(expr):
        c = expr[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(expr) and expr[j].isdigit():
                j += 1
            out.append(("int", int(expr[i:j])))
            i = j
        elif c == "q":
            out.append(("q", None))
            i += 1
        elif c in "+-*^()":
            out.append((c, None))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r} at position {i}")
    out.append(("end", None))
    return out


class _Parser:
    """expr := term (('+'|'-') term)*; term := factor ('*'? factor)*;
    factor := atom ('^' int)?; atom := int | 'q' | '-' factor | '(' expr ')'"""

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        poly = self.expr()
        if self.peek() != "end":
            raise ParseError(f"trailing input at token {self.pos}")
        return poly

    def expr(self):
        acc = self.term()
        while self.peek() in "+-":
            op, _ = self.next()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc + (-rhs)

    # no implicit multiplication juxtaposition except between factors
        return acc

    def term(self):
        acc = self.factor()
        while True:
            if self.peek() == "*":
                self.next()
                acc = acc * self.factor()
            elif self.peek() in ("int", "q", "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        atom = self.atom()
        if self.peek() == "^":
            self.next()
            kind, value = self.next()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer")
            atom = atom**value
        return atom

    def atom(self):
        kind, value = self.next()
        if kind == "int":
            return QPoly.const(value)
        if kind == "q":
            return QPoly.q()
        if kind == "-":
            return -self.factor()
        if kind == "(":
            inner = self.expr()
            if self.next()[0] != ")":
                raise ParseError("missing closing parenthesis")
            return inner
        raise ParseError(f"unexpected token {kind!r}")


class QPoly:
    """Thin integer-polynomial wrapper for the expression grammar."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        self.coeffs = list(coeffs)

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def q(cls):
        return cls([0, 1])

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return QPoly([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return QPoly([-x for x in self.coeffs])

    def __mul__(self, other):
        if not self.coeffs or not other.coeffs:
            return QPoly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return QPoly(out)

    def __pow__(self, n):
        if n < 0:
            raise ParseError("exponents must be nonnegative")
        acc = QPoly([1])
        for _ in range(n):
            acc = acc * self
        return acc

    def to_intpoly(self, var="q"):
        return IntPoly(tuple(self.coeffs), var)


def parse_polynomial(expr, var="q"):
    return _Parser(tokenize(expr)).parse().to_intpoly(var)


# ---------------------------------------------------------------------------
# configuration

DEFAULTS = {
    "precision": 6,
    "s_max": 2,
    "n_max": 10,
    "m_max": 5,
    "i_max": 1,
    "r_max": 2,
    "h": 1,
    "terms": 1,
    "deg": None,
    "format": "text",
}

_INT_KEYS = {
    "p",
    "degree",
    "precision",
    "s_max",
    "n_max",
    "m_max",
    "i_max",
    "r_max",
    "h",
    "terms",
    "deg",
}


def read_config_file(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key, val = key.strip().replace("-", "_"), val.strip()
            if key in _INT_KEYS:
                try:
                    values[key] = int(val)
                except ValueError as e:
                    raise ParseError(f"{path}:{lineno}: {e}") from None
            else:
                values[key] = val
    return values


def resolve_config(args):
    """CLI flags > config file > defaults."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config_file(args.config))
    for key in (
        "p",
        "alpha",
        "degree",
        "precision",
        "s_max",
        "n_max",
        "m_max",
        "i_max",
        "r_max",
        "h",
        "terms",
        "deg",
        "format",
    ):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if cfg.get("p") is None:
        raise ParseError("p is required (flag --p or config file)")
    if cfg.get("degree") is None and cfg.get("p") is not None:
        cfg["degree"] = 2 * cfg["p"] ** 2
    if cfg["degree"] is not None and cfg["degree"] < 2:
        raise ParseError("degree must be >= 2")
    if cfg["precision"] < 1:
        raise ParseError("precision must be >= 1")
    if getattr(args, "json_path", None):
        cfg["json"] = args.json_path
    return cfg


def context_from_config(cfg, need_alpha=True):
    try:
        if need_alpha:
            if not cfg.get("alpha"):
                raise ParseError("alpha is required (e.g. --alpha 1/2)")
            alpha = Fraction(str(cfg["alpha"]))
            return MAdicContext.for_alpha(cfg["p"], alpha)
        return MAdicContext(cfg["p"])
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------------------
# report assembly


def make_report(cfg, checks, timings):
    passed = all(c.get("pass", False) for c in checks) if checks else False
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None},
        "checks": checks,
        "pass": passed,
        "timings": timings,
    }


def emit(report, cfg, out=sys.stdout):
    path = cfg.get("json")
    if path:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=False)
            fh.write("\n")
    if cfg.get("format") == "json" and not path:
        json.dump(report, out, indent=2, sort_keys=False)
        out.write("\n")
    else:
        for check in report["checks"]:
            name = check.get("name") or check.get("kind", "check")
            status = "pass" if check.get("pass") else "FAIL"
            out.write(f"{name}: {status}\n")
        out.write(f"overall: {'pass' if report['pass'] else 'FAIL'}\n")


# ---------------------------------------------------------------------------
# commands


def cmd_valuation(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg, need_alpha=False)
    poly = parse_polynomial(args.expr, "q")
    v = valuation_poly(poly, ctx)
    digits = list(taylor_at_one(poly))
    vtxt = "INFINITY" if v.is_infinite else str(v.value)
    out.write(f"valuation: {vtxt}\n")
    out.write(f"digits: {digits}\n")
    return EXIT_OK


def _timed(timings, name, fn):
    t0 = time.perf_counter()
    result = fn()
    timings[name] = round(time.perf_counter() - t0, 6)
    return result


def cmd_check_frobenius(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg)
    ctx.require_hyp()
    D = cfg["degree"]
    timings = {}
    A = _timed(timings, "system_matrix", lambda: hypergeometric_system_matrix(ctx, D))
    H = _timed(
        timings,
        "transition_matrix",
        lambda: SeriesMatrix.scalar(order1_transition_matrix(ctx, D)),
    )
    cert = _timed(
        timings,
        "frobenius_structure",
        lambda: check_frobenius_structure(
            A, H, 1, "exact", description="order-1 hypergeometric system"
        ),
    )
    semilinear = _timed(
        timings,
        "semilinear_action",
        lambda: check_semilinear_action(
            A,
            H,
            [f_alpha_cleared(D, ctx)],
            1,
            frob_fvec=[f_alpha_frobenius_image(D, ctx)],
        ),
    )
    checks = [
        cert.to_dict() | {"name": "frobenius-structure"},
        {"kind": "semilinear", "name": "semilinear-action", "pass": semilinear},
    ]
    report = make_report(cfg, checks, timings)
    emit(report, cfg, out)
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_check_dwork(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg)
    ctx.require_hyp()
    timings = {}
    grid = _timed(
        timings,
        "conditions",
        lambda: run_dwork_checks(
            ctx, cfg["n_max"], cfg["m_max"], cfg["s_max"], cfg["i_max"]
        ),
    )
    checks = [grid.to_dict() | {"name": "dwork-conditions", "pass": grid.passed}]
    for r in range(cfg["r_max"] + 1):
        for s in range(min(cfg["s_max"], 1) + 1):
            rep = _timed(
                timings,
                f"conclusion_r{r}_s{s}",
                lambda r=r, s=s: check_dwork_conclusion(ctx, r, s, cfg["degree"]),
            )
            checks.append(
                rep.to_dict() | {"name": f"dwork-conclusion r={r} s={s}", "pass": rep.passed}
            )
    report = make_report(cfg, checks, timings)
    emit(report, cfg, out)
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_check_cyclotomic(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg)
    ctx.require_hyp()
    timings = {}
    rep = _timed(
        timings,
        "cyclotomic",
        lambda: check_cyclotomic_congruence(ctx, cfg["degree"]),
    )
    checks = [rep.to_dict() | {"name": "cyclotomic-congruence", "pass": rep.passed}]
    report = make_report(cfg, checks, timings)
    emit(report, cfg, out)
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_confluence(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg)
    ctx.require_hyp()
    timings = {}
    ok = _timed(
        timings, "confluence", lambda: check_confluence_order1(ctx, cfg["degree"])
    )
    checks = [{"kind": "confluence", "name": "confluence-order1", "pass": ok}]
    report = make_report(cfg, checks, timings)
    emit(report, cfg, out)
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_find_relation(args, out=sys.stdout):
    cfg = resolve_config(args)
    ctx = context_from_config(cfg)
    ctx.require_hyp()
    r = cfg["terms"]
    d = cfg["deg"] if cfg["deg"] is not None else ctx.p - 1
    window = 2 * (r + 1) * (d + 1)
    timings = {}
    g = _timed(timings, "series", lambda: ev_mod_p_series(ctx, window))
    rel = _timed(
        timings, "find_relation", lambda: find_relation(g, cfg["h"], r, d, window)
    )
    if rel is None:
        checks = [{"kind": "lucas_relation", "name": "find-relation", "pass": False}]
    else:
        checks = [rel.to_dict() | {"name": "find-relation", "pass": rel.verified}]
    report = make_report(cfg, checks, timings)
    emit(report, cfg, out)
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qfrob",
        description="Exact checks for q-difference Frobenius structures "
        "and hypergeometric congruences.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, alpha=True):
        sp.add_argument("--p", type=int)
        if alpha:
            sp.add_argument("--alpha")
        sp.add_argument("--degree", type=int)
        sp.add_argument("--precision", type=int)
        sp.add_argument("--config")
        sp.add_argument("--format", choices=["json", "text"])
        sp.add_argument("--json", dest="json_path", metavar="PATH")

    sp = sub.add_parser("valuation", help="m-adic valuation of a polynomial in q")
    sp.add_argument("expr")
    common(sp, alpha=False)
    sp.set_defaults(fn=cmd_valuation)

    sp = sub.add_parser("check-frobenius", help="strong Frobenius structure")
    common(sp)
    sp.set_defaults(fn=cmd_check_frobenius)

    sp = sub.add_parser("check-dwork", help="Dwork-style ratio conditions")
    common(sp)
    sp.add_argument("--nmax", dest="n_max", type=int)
    sp.add_argument("--mmax", dest="m_max", type=int)
    sp.add_argument("--smax", dest="s_max", type=int)
    sp.add_argument("--imax", dest="i_max", type=int)
    sp.add_argument("--rmax", dest="r_max", type=int)
    sp.set_defaults(fn=cmd_check_dwork)

    sp = sub.add_parser("check-cyclotomic", help="mod phi_p(q) congruence")
    common(sp)
    sp.set_defaults(fn=cmd_check_cyclotomic)

    sp = sub.add_parser("confluence", help="q -> 1 confluence identity")
    common(sp)
    sp.set_defaults(fn=cmd_confluence)

    sp = sub.add_parser("find-relation", help="mod-p Lucas-type relation search")
    common(sp)
    sp.add_argument("--h", type=int)
    sp.add_argument("--terms", type=int)
    sp.add_argument("--deg", type=int)
    sp.set_defaults(fn=cmd_find_relation)
    return ap


def main(argv=None, out=sys.stdout):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags, which matches the parse-error code
        return int(e.code or 0)
    try:
        return args.fn(args, out)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except HypothesisError as e:
        print(f"hypothesis violation: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
