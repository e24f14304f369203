"""Command-line entry point: search, build, verify, exponent, reproduce.

Exit codes: 0 success, 1 refuted or failed check, 2 budget exhausted or
sampled-only verdict, 64 usage error, 65 bad input data or violated
construction hypothesis.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .certificates import CertificateFile
from .constructions import (
    SetFileError,
    build_greedy,
    build_inhom_poly,
    build_multivariate,
    build_nonlinear_roth,
    build_ruzsa,
    read_set_file,
    write_set_file,
)
from .exponents import CompareRow, compare_report, observed_exponent, report
from .polynomials import (
    HomogeneousForm,
    PolynomialSyntaxError,
    UnivariatePolynomial,
    parse_int_list,
)
from .residues import HypothesisError, ResidueSet, power_residues
from .search import ChainSpec, build_difference_graph, r_k, search_chain_pair, write_dimacs
from .verifiers import (
    Verdict,
    enumerate_poly_values,
    sample_difference_avoidance,
    sums_of_k_powers_sieve,
    sums_of_two_squares_sieve,
    values_from_marks,
    verify_difference_avoidance,
    verify_nonlinear_roth,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

ENV_PREFIX = "AVOID_"
DEFAULT_BUDGET = 60.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _setting(value, name: str, default, cast):
    """Flag, then ``AVOID_<NAME>`` environment variable, then default."""
    if value is not None:
        return value
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return parse_int_list(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _residues(m: int, text: str) -> ResidueSet:
    if text.strip() == "full":
        return ResidueSet.full(m)
    return ResidueSet.of(m, _ints(text))


def _sets(m: int, text: str) -> list[ResidueSet]:
    return [_residues(m, part) for part in text.split(";") if part.strip()]


def _poly(text: str) -> UnivariatePolynomial:
    try:
        return UnivariatePolynomial.parse(text)
    except PolynomialSyntaxError as exc:
        raise UsageError(f"cannot parse polynomial {text!r}: {exc}") from None


def _form(text: str) -> HomogeneousForm:
    try:
        return HomogeneousForm.parse(text)
    except PolynomialSyntaxError as exc:
        raise UsageError(f"cannot parse form {text!r}: {exc}") from None


def _need(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _emit(cert: CertificateFile, path: str | None) -> None:
    if path:
        cert.write(path)
        print(f"certificate written to {path}")


# --- search ----------------------------------------------------------------


def cmd_search(args) -> int:
    _need(args, "m", "k")
    if args.m < 2 or args.k < 1:
        raise UsageError("need --m >= 2 and --k >= 1")
    budget = _setting(args.budget, "BUDGET", DEFAULT_BUDGET, float)
    cert = CertificateFile(command=list(args.argv), spec=f"search m={args.m} k={args.k} mode={args.mode}")
    if args.dimacs:
        write_dimacs(build_difference_graph(args.m, power_residues(args.m, args.k)), args.dimacs)
        print(f"graph written to {args.dimacs}")

    if args.mode == "r-set":
        res = r_k(args.m, args.k, time_limit=budget)
        print(f"r_{args.k}({args.m}) {'=' if res.optimal else '>='} {res.size}")
        print(f"witness {res.witness.render()}")
        cert.verdict = "optimal" if res.optimal else "budget-exhausted"
        cert.result = {
            "size": res.size,
            "witness": list(res.witness),
            "optimal": res.optimal,
            "nodes": res.nodes,
        }
        cert.timings = {"search": res.elapsed}
        optimal = res.optimal
    else:
        try:
            pinned = _residues(args.m, args.pin_r1) if args.pin_r1 else None
            res = search_chain_pair(args.m, args.k, time_limit=budget, R1=pinned)
        except HypothesisError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        r1, r2 = res.sizes
        print(f"R1 {res.R1.render()}  |R1|={r1}")
        print(f"R2 {res.R2.render()}  |R2|={r2}")
        print(f"gamma = {res.gamma:.10f}{'' if res.optimal else ' (budget exhausted)'}")
        cert.verdict = "optimal" if res.optimal else "budget-exhausted"
        cert.result = {
            "R1": list(res.R1),
            "R2": list(res.R2),
            "optimal": res.optimal,
            "candidatesExamined": res.candidates_examined,
        }
        cert.exponents = [
            {"formula": "chain_periodic2", "m": args.m, "k": args.k, "r1": r1, "r2": r2, "value": res.gamma}
        ]
        cert.timings = {"search": res.elapsed}
        optimal = res.optimal
    _emit(cert, args.cert)
    return EXIT_OK if optimal else EXIT_INCOMPLETE


# --- build -----------------------------------------------------------------


def _construct(args):
    v = args.variant
    if v == "greedy":
        _need(args, "N")
        if args.forbidden is not None:
            forbidden = _ints(args.forbidden)
        elif args.f is not None:
            forbidden = enumerate_poly_values(_poly(args.f), args.N)
        else:
            raise UsageError("greedy needs --forbidden or --f")
        return build_greedy(args.N, forbidden), None
    _need(args, "m", "Y")
    if v == "ruzsa":
        _need(args, "k", "R")
        cs = build_ruzsa(args.m, args.k, _residues(args.m, args.R), args.Y)
        return cs, report("ruzsa", m=args.m, k=args.k, r=len(cs.spec.residues))
    if v == "inhom":
        _need(args, "f", "R")
        f = _poly(args.f)
        cs = build_inhom_poly(args.m, f, _residues(args.m, args.R), args.Y)
        return cs, report("inhom", m=args.m, d=f.degree, r=len(cs.spec.residues))
    if v == "multivariate":
        _need(args, "k", "Rp")
        F = _form(args.F) if args.F else HomogeneousForm.power_sum(2, args.k)
        Rp = _residues(args.m**args.k, args.Rp)
        cs = build_multivariate(args.m, args.k, Rp, args.Y, F)
        return cs, report("multivariate", m=args.m, k=args.k, rp=len(Rp))
    # nonlinear-roth
    _need(args, "k", "period")
    pre = _sets(args.m, args.preperiod)
    period = _sets(args.m, args.period)
    if not period:
        raise UsageError("--period needs at least one set")
    chain = ChainSpec.power(args.m, args.k, pre, period).validate()
    cs = build_nonlinear_roth(chain, args.Y)
    rep = report("chain", m=args.m, k=args.k, preperiod=[len(R) for R in pre], period=[len(R) for R in period])
    return cs, rep


def cmd_build(args) -> int:
    start = time.perf_counter()
    try:
        cs, rep = _construct(args)
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_DATA
    elapsed = time.perf_counter() - start
    print(f"variant {cs.spec.variant.value}: |A| = {cs.size}, N = {cs.N}, counting bound {cs.size_bound}")
    obs = observed_exponent(cs.size, cs.N) if cs.N >= 2 else 0.0
    rows = [{"formula": "observed", "value": obs}]
    if rep is not None:
        print(f"predicted exponent {rep.value:.6f}, observed {obs:.6f}")
        rows.insert(0, {"formula": rep.formula, **rep.parameters, "value": rep.value})
    if args.out:
        write_set_file(args.out, cs)
        print(f"set written to {args.out}")
    elif cs.size <= 50:
        print("elements " + ",".join(str(x) for x in cs))
    if args.cert:
        cert = CertificateFile(
            command=list(args.argv),
            spec=cs.spec.render(),
            exponents=rows,
            timings={"build": elapsed},
            result={"size": cs.size, "N": cs.N, "sizeBound": cs.size_bound},
        )
        sidecar = args.out
        if cs.size > 10**4 and sidecar is None:
            sidecar = str(Path(args.cert).with_suffix(".set"))
            write_set_file(sidecar, cs)
        cert.attach_elements(cs, sidecar)
        _emit(cert, args.cert)
    return EXIT_OK


# --- verify ----------------------------------------------------------------


def _target_values(args, N: int):
    t = args.target
    if t == "poly":
        _need(args, "f")
        return enumerate_poly_values(_poly(args.f), N)
    if t == "two-squares":
        return values_from_marks(sums_of_two_squares_sieve(N))
    if t == "k-powers":
        _need(args, "k", "s")
        return values_from_marks(sums_of_k_powers_sieve(N, args.k, args.s))
    _need(args, "values")
    return _ints(args.values)


def cmd_verify(args) -> int:
    _need(args, "set")
    try:
        header, arr = read_set_file(args.set)
    except (OSError, SetFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    N = args.N or header.get("N") or (int(arr[-1]) if len(arr) else 1)
    if len(arr) and int(arr[-1]) > N:
        print(f"error: set has elements above N={N}", file=sys.stderr)
        return EXIT_DATA
    threads = _setting(args.threads, "THREADS", os.cpu_count() or 1, int)
    if args.target == "nonlinear-roth":
        _need(args, "k")
        cert = verify_nonlinear_roth(arr, args.k, N, threads=threads)
    else:
        values = _target_values(args, N)
        if args.samples:
            cert = sample_difference_avoidance(arr, values, samples=args.samples, N=N)
        else:
            cert = verify_difference_avoidance(
                arr, values, N=N, variant=header.get("variant", "explicit"),
                parameters=header, threads=threads,
            )
    print(f"{cert.verdict.value}: {cert.checked} checks by {cert.method} in {cert.elapsed:.2f}s")
    if cert.witness is not None:
        print("witness " + ",".join(str(x) for x in cert.witness))
    if args.cert:
        out = CertificateFile(
            command=list(args.argv),
            spec=_header_spec(header),
            verdict=cert.verdict.value,
            timings={"verify": cert.elapsed},
            result=cert.to_dict(),
        )
        out.attach_elements(arr, args.set)
        _emit(out, args.cert)
    if cert.verdict is Verdict.REFUTED:
        return EXIT_FAILED
    if cert.verdict is Verdict.SAMPLED:
        return EXIT_INCOMPLETE
    return EXIT_OK


def _header_spec(header: dict) -> str:
    return json.dumps(header, sort_keys=True, separators=(",", ":"))


# --- exponent --------------------------------------------------------------


def cmd_exponent(args) -> int:
    if args.table:
        print(compare_report(headline_rows()))
        return EXIT_OK
    _need(args, "formula")
    params: dict = {}
    for name in ("m", "k", "r", "d", "rp", "r1", "r2"):
        if getattr(args, name) is not None:
            params[name] = getattr(args, name)
    if args.preperiod is not None:
        params["preperiod"] = _ints(args.preperiod) if args.preperiod.strip() else []
    if args.period is not None:
        params["period"] = _ints(args.period)
    try:
        rep = report(args.formula, **params)
    except KeyError as exc:
        raise UsageError(f"formula {args.formula} needs --{exc.args[0]}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"{rep.formula}: {rep.value:.10f}  ({rep.source})")
    if args.cert:
        _emit(
            CertificateFile(
                command=list(args.argv),
                spec=f"exponent {rep.formula}",
                exponents=[{"formula": rep.formula, **rep.parameters, "value": rep.value}],
            ),
            args.cert,
        )
    return EXIT_OK


def headline_rows() -> list[CompareRow]:
    """Greedy versus predicted versus observed for small verified instances."""
    R = ResidueSet
    f = UnivariatePolynomial.parse("x^2+5x^3")
    inhom = build_inhom_poly(5, f, R.of(5, [0, 2]), 9)
    sq = build_multivariate(3, 2, R.of(9, [0, 3, 6]), 6, HomogeneousForm.power_sum(2, 2))
    fourth = build_multivariate(2, 4, R.of(16, [0, 8]), 5, HomogeneousForm.power_sum(7, 4))
    ruzsa = build_ruzsa(5, 2, R.of(5, [0, 2]), 4)
    out = []
    for label, cs, greedy, predicted in (
        ("x^2+5x^3 mod 5, Y=9", inhom, report("greedy", d=3).value, report("inhom", m=5, d=3, r=2).value),
        ("two squares, m=3 Y=6", sq, "sub-polynomial", report("multivariate", m=3, k=2, rp=3).value),
        ("seven 4th powers, m=2 Y=5", fourth, "sub-polynomial", report("multivariate", m=2, k=4, rp=2).value),
        ("squares mod 5, Y=4", ruzsa, report("greedy", d=2).value, report("ruzsa", m=5, k=2, r=2).value),
    ):
        out.append(CompareRow(label, greedy, predicted, observed_exponent(cs.size, cs.N), cs.size, cs.N))
    return out


# --- reproduce -------------------------------------------------------------


def cmd_reproduce(args) -> int:
    from .reproduce import rows

    budget = _setting(args.budget, "BUDGET", 300.0, float)
    collected = []
    start = time.perf_counter()
    for row in rows(full_search=not args.quick, budget=budget):
        print(row.render(), flush=True)
        collected.append(row)
    failed = sum(not r.passed for r in collected)
    total = time.perf_counter() - start
    print(f"{len(collected) - failed}/{len(collected)} rows passed in {total:.1f}s")
    if args.cert:
        _emit(
            CertificateFile(
                command=list(args.argv),
                spec="reproduce",
                verdict="pass" if not failed else "fail",
                timings={"total": total},
                result={"rows": [r.to_dict() for r in collected]},
            ),
            args.cert,
        )
    return EXIT_FAILED if failed else EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="diffavoid", description="Difference-avoiding set constructions and verifiers.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker threads (AVOID_THREADS; default: all cores)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="exact clique search for residue sets")
    s.add_argument("--m", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--mode", choices=("r-set", "chain-pair"), default="r-set")
    s.add_argument("--budget", type=float, default=None, help="seconds (AVOID_BUDGET; default 60)")
    s.add_argument("--pin-r1", dest="pin_r1", help="chain-pair: fix R1, e.g. 0,2")
    s.add_argument("--dimacs", help="also write the k-th power difference graph here")
    s.add_argument("--cert")
    s.set_defaults(func=cmd_search)

    b = sub.add_parser("build", help="construct a set")
    b.add_argument("--variant", required=True,
                   choices=("ruzsa", "nonlinear-roth", "inhom", "multivariate", "greedy"))
    b.add_argument("--m", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--Y", type=int)
    b.add_argument("--N", type=int)
    b.add_argument("--f", help="univariate polynomial in x, e.g. x^2+5x^3")
    b.add_argument("--F", help="form in x1..xn, e.g. x1^2+x2^2 (default: x1^k+x2^k)")
    b.add_argument("--R", help="residues mod m, e.g. 0,2")
    b.add_argument("--Rp", help="residues mod m^k")
    b.add_argument("--preperiod", default="full", help="';'-separated sets; 'full' for all residues")
    b.add_argument("--period", help="';'-separated sets, e.g. '0,2'")
    b.add_argument("--forbidden", help="greedy: forbidden differences")
    b.add_argument("--out", help="set file to write")
    b.add_argument("--cert")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="exhaustively verify a set file")
    v.add_argument("--set")
    v.add_argument("--target", required=True,
                   choices=("poly", "nonlinear-roth", "two-squares", "k-powers", "list"))
    v.add_argument("--f")
    v.add_argument("--k", type=int)
    v.add_argument("--s", type=int)
    v.add_argument("--values", help="list target: comma-separated values")
    v.add_argument("--N", type=int, help="default: header N, else the largest element")
    v.add_argument("--samples", type=int, help="spot-check this many random pairs instead")
    v.add_argument("--cert")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("exponent", help="evaluate an exponent formula")
    e.add_argument("--formula",
                   choices=("ruzsa", "chain", "chain_periodic2", "inhom", "multivariate", "greedy"))
    for name in ("m", "k", "r", "d", "rp", "r1", "r2"):
        e.add_argument(f"--{name}", type=int)
    e.add_argument("--preperiod", help="chain: sizes, e.g. 65")
    e.add_argument("--period", help="chain: sizes, e.g. 7,17")
    e.add_argument("--table", action="store_true", help="greedy/predicted/observed comparison")
    e.add_argument("--cert")
    e.set_defaults(func=cmd_exponent)

    r = sub.add_parser("reproduce", help="re-derive the headline numbers")
    r.add_argument("--quick", action="store_true", help="skip the full mod-65 chain-pair search")
    r.add_argument("--budget", type=float, default=None, help="seconds for the full search (default 300)")
    r.add_argument("--cert")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args.argv = ["diffavoid", *argv]
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
