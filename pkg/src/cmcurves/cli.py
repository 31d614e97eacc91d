"""Command-line front end.

Subcommands: classgroup, hilbert, modpoly, hecke-image, certify, cmscan,
split-prime, census, siegel.  Structured single results are JSON with big
integers as decimal strings; bulk tables are CSV.  Exit codes are a stable
contract: 0 success/certified, 1 negative verdict, 2 input error,
3 inconclusive (including failed precision escalation).  Identical
configuration (flags and seed) produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from mpmath import mp, mpc

from . import census as census_mod
from . import cmscan as cmscan_mod
from . import hecke as hecke_mod
from . import modpoly as modpoly_mod
from . import moduli as moduli_mod
from . import quadorders as qo
from .errors import CeilingError, PrecisionError, ValidationError
from .polys import poly_json

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class RunConfig:
    precision: int = 256
    nmax: int = modpoly_mod.DEFAULT_N_CEILING
    dmax: int = 500
    samples: int | None = None
    tolerance_bits: int = hecke_mod.DEFAULT_TOLERANCE_BITS
    seed: int = 0
    fmt: str = "json"
    output: str | None = None
    verify: bool = False

    def validate(self):
        if self.precision < 64:
            raise ValidationError("precision must be at least 64 bits")
        if self.nmax <= 0 or self.dmax <= 0:
            raise ValidationError("ceilings must be positive")
        if self.tolerance_bits < 16:
            raise ValidationError("tolerance exponent must be at least 16")
        if self.samples is not None and self.samples <= 0:
            raise ValidationError("sample count must be positive")
        if self.fmt not in ("json", "csv"):
            raise ValidationError(f"unknown format {self.fmt!r}")


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_curve(path: str) -> hecke_mod.PlaneCurve:
    try:
        with open(path) as fh:
            return hecke_mod.PlaneCurve.from_json(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read curve file: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommand bodies


def cmd_classgroup(cfg: RunConfig, D: int) -> int:
    od = qo.order_of_discriminant(D)
    forms = qo.reduced_forms(od.D)
    payload = {
        "D": od.D,
        "d_K": od.d_K,
        "f": od.f,
        "h": len(forms),
        "two_rank": qo.two_rank(od.D),
        "omega_odd": qo.omega_odd(od.D),
        "two_rank_bound_ok": qo.lemma_two_rank_bound(od.D),
        "reduced_forms": [list(Q.triple()) for Q in forms],
    }
    if cfg.verify:
        _verify_classgroup(od.D, forms)
        payload["verified"] = True
    _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def _verify_classgroup(D: int, forms):
    pf = qo.reduce_form(*qo.principal_form(D).triple())
    rng = random.Random(0)
    sample = forms if len(forms) <= 12 else [rng.choice(forms) for _ in range(12)]
    for Q in sample:
        if not (Q.is_reduced() and Q.is_primitive() and Q.discriminant() == D):
            raise ValidationError(f"invalid reduced form {Q.triple()}")
        if qo.compose(Q, qo.inverse(Q)) != pf:
            raise ValidationError(f"inverse law failed at {Q.triple()}")
        for R in sample:
            if qo.compose(Q, R) != qo.compose(R, Q):
                raise ValidationError("commutativity failed")
    est = qo.dirichlet_class_number_estimate(D)
    if abs(est - len(forms)) >= 0.5:
        raise ValidationError(
            f"Dirichlet estimate {est:.3f} disagrees with h = {len(forms)}"
        )


def cmd_hilbert(cfg: RunConfig, D: int) -> int:
    H = moduli_mod.hilbert_class_poly(D)
    if cfg.verify:
        _verify_hilbert(H)
    _emit(cfg, moduli_mod.hilbert_json(H) + "\n")
    return EXIT_OK


def _verify_hilbert(H):
    if H.degree() != qo.class_number(H.D.D):
        raise ValidationError("Hilbert degree differs from the class number")
    with mp.workprec(H.prec + 16):
        for pt in moduli_mod.cm_j_invariants(H.D.D, H.prec):
            val, scale = H.eval_with_scale(pt.approx)
            if abs(val) / (1 + scale) > mp.mpf(2) ** (-(H.prec // 2)):
                raise ValidationError(f"H_{H.D.D} does not vanish at {pt.form.triple()}")


def cmd_modpoly(cfg: RunConfig, n: int) -> int:
    phi = modpoly_mod.modular_poly(n, ceiling=cfg.nmax)
    if cfg.verify:
        _verify_modpoly(phi, cfg)
    _emit(cfg, modpoly_mod.modular_poly_json(phi) + "\n")
    return EXIT_OK


def _verify_modpoly(phi, cfg: RunConfig):
    deg = modpoly_mod.psi(phi.n)
    if phi.n > 1 and not phi.P.is_symmetric():
        raise ValidationError("modular polynomial is not symmetric")
    if phi.P.bidegree() != ((deg, deg) if phi.n > 1 else (1, 1)):
        raise ValidationError("modular polynomial degree mismatch")
    fac = qo.factorization(phi.n)
    if len(fac) == 1 and max(fac.values()) == 1 and phi.n > 1:
        if not modpoly_mod.kronecker_check(phi):
            raise ValidationError("Kronecker congruence failed")
    rng = random.Random(cfg.seed)
    for _ in range(3):
        tau = mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.3))
        if modpoly_mod.functional_equation_residual(phi, tau, cfg.precision) > 2.0 ** -32:
            raise ValidationError("functional equation residual above tolerance")


def cmd_hecke_image(cfg: RunConfig, path: str, n: int) -> int:
    C = _load_curve(path)
    img = hecke_mod.hecke_image(C, n, ceiling=cfg.nmax)
    deg = modpoly_mod.psi(n)
    if cfg.verify:
        dy, dx = img.G.deg2(), img.G.deg1()
        if dx > deg * deg * C.d2 or dy > deg * deg * C.d1:
            raise ValidationError("Hecke image exceeds the degree law bounds")
        if img.G.content() != 1:
            raise ValidationError("Hecke image content was not removed")
    payload = {
        "n": n,
        "source_id": C.curve_id(),
        "source_bidegree": [C.d1, C.d2],
        "image_bidegree": [img.G.deg2(), img.G.deg1()],
        "shear": img.shear,
        "G": json.loads(poly_json(img.G)),
    }
    _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_certify(cfg: RunConfig, path: str) -> int:
    C = _load_curve(path)
    report = hecke_mod.certify_modular(
        C,
        nmax=cfg.nmax,
        samples=cfg.samples,
        tolerance_bits=cfg.tolerance_bits,
        seed=cfg.seed,
        prec=cfg.precision,
    )
    if cfg.verify and report.verdict == "certified":
        phi = modpoly_mod.modular_poly(report.m).P
        if C.F != phi and C.F != -phi:
            raise ValidationError("certified level does not reproduce the curve")
    _emit(cfg, report.to_json() + "\n")
    if report.verdict == "certified":
        return EXIT_OK
    if report.verdict == "not-certified":
        return EXIT_NEGATIVE
    return EXIT_INCONCLUSIVE


def cmd_cmscan(cfg: RunConfig, path: str) -> int:
    C = _load_curve(path)
    records = cmscan_mod.cm_points_on_curve(C, cfg.dmax, prec=cfg.precision)
    if cfg.verify:
        tol = 2.0 ** (-(cfg.precision // 2))
        for r in records:
            if max(r.resid_curve, r.resid_x, r.resid_y) > tol or r.gcd_degree < 1:
                raise ValidationError("scan record failed re-validation")
    if cfg.fmt == "json":
        summary = cmscan_mod.cm_field_report(records, bidegree=(C.d1, C.d2))
        payload = {
            "curve_id": C.curve_id(),
            "dmax": cfg.dmax,
            "total": summary.total,
            "matched": summary.matched,
            "mismatched": summary.mismatched,
            "mismatch_bounds": list(summary.mismatch_bounds),
            "records": json.loads(_records_json(records)),
        }
        _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    else:
        _emit(cfg, cmscan_mod.records_csv(records))
    return EXIT_OK


def _records_json(records) -> str:
    return json.dumps(
        [
            {
                "D1": r.D1.D, "f1": r.f1, "D2": r.D2.D, "f2": r.f2,
                "x": [r.x_approx.real, r.x_approx.imag],
                "y": [r.y_approx.real, r.y_approx.imag],
                "same_field": r.same_field,
                "gcd_degree": r.gcd_degree,
            }
            for r in records
        ]
    )


def cmd_split_prime(cfg: RunConfig, D: int, d1: int, d2: int) -> int:
    cert = cmscan_mod.split_prime_for_certificate(D, d1, d2)
    if cert is None:
        h = qo.class_number(D)
        _emit(cfg, json.dumps({"D": D, "h": h, "result": None}, sort_keys=True) + "\n")
        return EXIT_NEGATIVE
    payload = {
        "D": cert.D.D, "d_K": cert.D.d_K, "f": cert.D.f,
        "p": cert.p, "h": cert.h, "lhs": cert.lhs, "satisfied": cert.satisfied,
    }
    if cfg.verify:
        if qo.kronecker(cert.D.D, cert.p) != 1 or not cert.satisfied:
            raise ValidationError("split-prime certificate failed re-validation")
    _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_census(cfg: RunConfig, xs: list[float]) -> int:
    rows = []
    for d_K in census_mod.fundamental_discriminants(cfg.dmax):
        for x in xs:
            rows.append(census_mod.grh_bound_check(d_K, x))
    if cfg.verify:
        for row in rows[:20]:
            lo = census_mod.split_count_lower_bound(row.D, row.x)
            if row.pi_split < lo:
                raise ValidationError("lower bound exceeded an actual count")
        with mp.workprec(80):
            x0 = max(xs)
            q = float(mp.quad(lambda t: 1 / mp.log(t), [2, x0]))
        if abs(q - census_mod.li(x0)) > 1e-6 * max(1.0, q):
            raise ValidationError("Li disagrees with direct quadrature")
    _emit(cfg, census_mod.census_csv(rows))
    return EXIT_OK


def cmd_siegel(cfg: RunConfig) -> int:
    ds = list(census_mod.fundamental_discriminants(cfg.dmax))
    rows = census_mod.siegel_trend(ds)
    if cfg.verify:
        if rows != sorted(rows, key=lambda r: r[0]):
            raise ValidationError("siegel rows are not sorted")
    _emit(cfg, census_mod.siegel_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=256, help="working precision in bits")
    common.add_argument("--nmax", type=int, default=modpoly_mod.DEFAULT_N_CEILING,
                        help="modular-polynomial level ceiling")
    common.add_argument("--dmax", type=int, default=500, help="discriminant bound")
    common.add_argument("--samples", type=int, default=None, help="numeric sample override")
    common.add_argument("--tolerance", type=int, default=hecke_mod.DEFAULT_TOLERANCE_BITS,
                        help="tolerance exponent t (residual cutoff 2^-t)")
    common.add_argument("--seed", type=int, default=0, help="seed for sample abscissae")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    common.add_argument("--output", default=None, help="write output to this path")
    common.add_argument("--verify", action="store_true",
                        help="re-run independent validation; fail loudly on mismatch")

    ap = argparse.ArgumentParser(prog="cmcurves", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", parents=[common], help="reduced forms, h, 2-rank")
    p.add_argument("D", type=int)
    p = sub.add_parser("hilbert", parents=[common], help="Hilbert class polynomial")
    p.add_argument("D", type=int)
    p = sub.add_parser("modpoly", parents=[common], help="modular polynomial")
    p.add_argument("n", type=int)
    p = sub.add_parser("hecke-image", parents=[common], help="(T_n x T_n) image of a curve")
    p.add_argument("curve")
    p.add_argument("n", type=int)
    p = sub.add_parser("certify", parents=[common], help="modularity certificate")
    p.add_argument("curve")
    p = sub.add_parser("cmscan", parents=[common], help="CM points on a curve")
    p.add_argument("curve")
    p = sub.add_parser("split-prime", parents=[common], help="split prime for the certificate inequality")
    p.add_argument("D", type=int)
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p = sub.add_parser("census", parents=[common], help="split-prime census rows")
    p.add_argument("--x", default="1000,10000,100000",
                   help="comma-separated census thresholds")
    sub.add_parser("siegel", parents=[common], help="class-number growth table")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    cfg = RunConfig(
        precision=args.precision,
        nmax=args.nmax,
        dmax=args.dmax,
        samples=args.samples,
        tolerance_bits=args.tolerance,
        seed=args.seed,
        fmt=args.fmt or ("csv" if args.command in ("cmscan", "census", "siegel") else "json"),
        output=args.output,
        verify=args.verify,
    )
    try:
        cfg.validate()
        if args.command == "classgroup":
            return cmd_classgroup(cfg, args.D)
        if args.command == "hilbert":
            return cmd_hilbert(cfg, args.D)
        if args.command == "modpoly":
            return cmd_modpoly(cfg, args.n)
        if args.command == "hecke-image":
            return cmd_hecke_image(cfg, args.curve, args.n)
        if args.command == "certify":
            return cmd_certify(cfg, args.curve)
        if args.command == "cmscan":
            return cmd_cmscan(cfg, args.curve)
        if args.command == "split-prime":
            return cmd_split_prime(cfg, args.D, args.d1, args.d2)
        if args.command == "census":
            xs = [float(x) for x in args.x.split(",") if x]
            return cmd_census(cfg, xs)
        if args.command == "siegel":
            return cmd_siegel(cfg)
        raise ValidationError(f"unknown command {args.command!r}")
    except (ValidationError, CeilingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except BrokenPipeError:
        # downstream pipe closed (e.g. head); exit quietly
        try:
            sys.stdout.close()
        except OSError:
            pass
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
