"""Command line front end: ``invcohom check|torus|tube <file>``.

Exit codes: 0 when every assertion passes, 1 when one fails, 2 for input
errors (unreadable file, schema violation, invalid object).  Reports are
deterministic; wall-clock timing is only added with ``--timing``.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from math import comb, factorial

from . import __version__
from .config import (ConfigError, build_algebra, build_torus, build_tube, liouville_depth, load,
                     make_subalgebra)
from .exactlin import rank
from .invariant_complex import (InvariantForm, cartan_check, ce_differential,
                                cohomology_dims_from, multi_indices)
from .liealg import (StructureError, check_jacobi, fund_identity_residual, is_ad_invariant,
                     sublaplacian_commutator)
from .report import dumps_json, form_entries, fr, gr, render_text
from .torus_arena import (ModeForm, approximation_modes, apply_mode_differential,
                          counterexample_witness_chain, eigenspace_split, enumerate_xi, kernel_modes,
                          koszul_homotopy, leaf_closure, solvability_profile,
                          truncated_cohomology_table)
from .tube_perturb import (ClosednessError, corollary_dimension_check, gamma_group, in_gamma,
                           kernel_search, normalization_check, perturbed_cohomology_table)


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 6))


# algebra

def _subalgebra_report(sc, metric, ad_invariant, entry, rng, samples):
    failures = []
    v = make_subalgebra(sc, entry)
    n = v.n
    out = {"name": entry["name"], "rank": n}
    try:
        cm = ce_differential(v)
    except StructureError as exc:
        out["square_zero"] = False
        out["error"] = str(exc)
        return out, [f"{entry['name']}: {exc}"]
    ranks = [rank(T) for T in cm.T]
    dims = cohomology_dims_from(n, ranks)
    out["square_zero"] = True
    out["differential_ranks"] = ranks
    out["right_inverse_ok"] = all(T @ S @ T == T for T, S in zip(cm.T, cm.S))
    out["cohomology"] = list(dims)
    if not out["right_inverse_ok"]:
        failures.append(f"{entry['name']}: right inverse check")
    expected = entry.get("expect_cohomology")
    if expected is not None:
        out["expected_cohomology"] = expected
        if list(expected) != list(dims):
            failures.append(f"{entry['name']}: cohomology {list(dims)} != expected {expected}")

    bad = 0
    for t in range(samples):
        q = t % (n + 1)
        u = InvariantForm.from_vector(q, n, [_random_rational(rng) for _ in multi_indices(n, q)])
        L = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        if not cartan_check(v, L, u).is_zero():
            bad += 1
    out["cartan"] = {"samples": samples, "nonzero_residuals": bad}
    if bad:
        failures.append(f"{entry['name']}: {bad} Cartan residuals")

    if ad_invariant and v.is_orthonormal(metric):
        lap = [sublaplacian_commutator(v, metric, i).is_zero() for i in range(n)]
        fund = [fund_identity_residual(v, metric, L).is_zero() for L in v.basis]
        out["lemmas"] = {"sublaplacian_commutes": all(lap), "bilinear_identity": all(fund)}
        if not (all(lap) and all(fund)):
            failures.append(f"{entry['name']}: lemma residual nonzero")
    else:
        reason = "metric not ad-invariant" if not ad_invariant else "basis not orthonormal"
        out["lemmas"] = {"skipped": reason}
    return out, failures


def cmd_algebra_check(doc: dict, jobs: int = 1) -> tuple[dict, int]:
    sc, metric, subs = build_algebra(doc)
    report = {
        "kind": "algebra",
        "name": doc.get("name", ""),
        "inputs": {"dim": doc["dim"], "brackets": doc.get("brackets", []),
                   "metric": doc.get("metric", "identity")},
    }
    failures = []
    jac = check_jacobi(sc)
    report["jacobi"] = {
        "ok": jac.ok,
        "violating_triple": None if jac.ok else [i + 1 for i in jac.triple],
        "residual": None if jac.ok else [fr(x) for x in jac.residual],
    }
    ad = is_ad_invariant(sc, metric)
    report["ad_invariant"] = ad
    if not jac.ok:
        t = jac.triple
        failures.append(f"Jacobi identity fails at (e{t[0] + 1}, e{t[1] + 1}, e{t[2] + 1})")
    else:
        rng = random.Random(doc.get("seed", 0))
        rows = []
        for entry in subs:
            row, fails = _subalgebra_report(sc, metric, ad, entry, rng, doc.get("random_forms", 100))
            rows.append(row)
            failures.extend(fails)
        report["subalgebras"] = rows
    report["failures"] = failures
    report["verdict"] = "pass" if not failures else "fail"
    return report, int(bool(failures))


# torus

def _mode_entry(m) -> dict:
    return {"xi": list(m.xi), "lambda": m.lam, "b": [fr(x) for x in m.b], "b_norm2": fr(m.b_norm2)}


def _homotopy_samples(ts, samples, R, rng):
    ok = 0
    n = ts.n
    for _ in range(samples):
        m = ts.mode([rng.randint(-R, R) for _ in range(ts.N)])
        q = rng.randint(1, n)
        if m.is_kernel():
            f = InvariantForm.from_vector(q, n, [_random_rational(rng) for _ in multi_indices(n, q)])
        else:
            g = InvariantForm.from_vector(q - 1, n,
                                          [_random_rational(rng) for _ in multi_indices(n, q - 1)])
            f = apply_mode_differential(m, g)
        v = koszul_homotopy(ModeForm(m, f)).form
        if apply_mode_differential(m, v) + f.scale(m.b_norm2) == InvariantForm(q, n):
            ok += 1
    return {"samples": samples, "passed": ok}


def _chain_entry(row) -> dict:
    return {
        "nu": row.nu,
        "mode": _mode_entry(row.mode),
        "pivot": row.pivot + 1,
        "coefficient_norms2": [fr(x) for x in row.coefficient_norms2],
        "forcing_norm2": fr(row.forcing_norm2),
        "threshold": fr(row.threshold),
        "decay_ok": row.decay_ok,
        "solution": form_entries(row.solution),
        "solution_mass": fr(row.solution_mass),
        "lower_bound": fr(row.lower_bound),
        "floor": fr(row.floor),
        "bound_ok": row.bound_ok,
    }


def cmd_torus_analyze(doc: dict, radius: int | None = None, nu: int | None = None,
                      jobs: int = 1) -> tuple[dict, int]:
    ts = build_torus(doc)
    R = radius if radius is not None else doc.get("radius", 4)
    PR = radius if radius is not None else doc.get("profile_radius", R)
    nu_max = nu if nu is not None else doc.get("nu_max", 2)
    depth = liouville_depth(doc)
    failures = []
    report = {"kind": "torus", "name": doc.get("name", ""),
              "inputs": {"A": doc["A"], "n": ts.n, "N": ts.N, "radius": R,
                         "profile_radius": PR, "nu_max": nu_max}}
    if depth is not None:
        report["inputs"]["liouville_depth"] = depth

    kernel = kernel_modes(ts, R)
    report["kernel_modes"] = [list(m.xi) for m in kernel]
    closure_dim, closed = leaf_closure(ts)
    report["leaf_closure"] = {"closure_dim": closure_dim, "closed": closed}

    table = truncated_cohomology_table(ts, R, jobs)
    expected = [len(kernel) * comb(ts.n, q) for q in range(ts.n + 1)]
    report["cohomology"] = [{"q": q, "dim": d, "kernel_times_binomial": e, "equal": d == e}
                            for q, (d, e) in enumerate(zip(table, expected))]
    if list(table) != expected:
        failures.append("truncated cohomology differs from kernel count times binomials")

    splits = []
    for lam in doc.get("eigenvalues", [0]):
        E, K, Rg = eigenspace_split(ts, lam)
        splits.append({"lambda": lam, "E": E, "K": K, "R": Rg, "sum_ok": K + Rg == E})
    report["eigenspaces"] = splits

    prof = solvability_profile(ts, nu_max, PR, jobs)
    cert = prof.certificate
    report["profile"] = {
        "modes_scanned": prof.modes_scanned,
        "witnesses": [{"nu": w.nu, **_mode_entry(w.mode), "threshold": fr(w.threshold),
                       "strict": w.b_norm2 < w.threshold} for w in prof.witnesses],
        "certificate": {"lower_bound": fr(cert.lower_bound),
                        "observed_min": None if cert.observed_min is None else fr(cert.observed_min),
                        "complete_levels": list(cert.complete_levels)},
    }
    if not all(w.b_norm2 < w.threshold for w in prof.witnesses):
        failures.append("a listed witness violates its inequality")

    rng = random.Random(doc.get("seed", 0))
    hom = _homotopy_samples(ts, doc.get("homotopy_samples", 0), max(R, 1), rng)
    report["homotopy"] = hom
    if hom["passed"] != hom["samples"]:
        failures.append("homotopy identity failed")

    chain_doc = doc.get("chain")
    if chain_doc is not None:
        q, count = chain_doc["q"], chain_doc["count"]
        if "denominators" in chain_doc:
            cands = approximation_modes(ts, chain_doc["denominators"])
        elif "liouville_denominators" in chain_doc:
            k = chain_doc["liouville_denominators"]
            cands = approximation_modes(ts, [10 ** factorial(j) for j in range(1, k + 1)])
        else:
            cands = None
        try:
            rows = counterexample_witness_chain(ts, q, count, cands, R=PR)
        except ValueError as exc:
            raise ConfigError(f"chain: {exc}") from exc
        report["chain"] = {"q": q, "rows": [_chain_entry(r) for r in rows]}
        if not all(r.bound_ok and r.decay_ok for r in rows):
            failures.append("witness chain row failed its bound")

    if closure_dim == ts.N:
        verdict = "globally hypoelliptic pattern at truncation: kernel = constants"
    elif depth is not None:
        verdict = ("small-divisor witnesses at truncation (Liouville-type slope)"
                   if prof.witnesses else "no small-divisor witnesses at truncation")
    else:
        verdict = "closed-range certificate (rational slope)"
    report["verdict"] = verdict
    report["failures"] = failures
    return report, int(bool(failures))


# tube

def cmd_tube_analyze(doc: dict, radius: int | None = None, jobs: int = 1) -> tuple[dict, int]:
    ts = build_tube(doc)
    R = radius if radius is not None else doc.get("radius", 4)
    report = {"kind": "tube", "name": doc.get("name", ""),
              "inputs": {"m": ts.m, "d": ts.d, "radius": R}}
    try:
        norm = normalization_check(ts)
    except ClosednessError as exc:
        report["error"] = {"message": "form is not closed", "eta": list(exc.eta),
                           "residual": [{"index": [a + 1, b + 1], "value": gr(x)}
                                        for (a, b), x in sorted(exc.residual.items())]}
        report["verdict"] = "fail"
        return report, 1
    failures = []
    report["normalization"] = [
        {"k": e.k + 1, "constant": [fr(x) for x in e.constant],
         "psi": [{"eta": list(eta), "value": gr(p)} for eta, p in sorted(e.psi.items())],
         "residual_zero": e.residual_zero} for e in norm]
    if not all(e.residual_zero for e in norm):
        failures.append("normalization residual nonzero")

    gamma = gamma_group(ts)
    report["gamma"] = {"generators": [list(g) for g in gamma.generators], "rank": gamma.rank}

    rows = []
    for xi in enumerate_xi(ts.m, R):
        a_xi = ts.combined_constant(xi)
        member = in_gamma(ts, xi)
        found = kernel_search(ts, xi, R)
        dims = perturbed_cohomology_table(ts, xi, R)
        covered = all(abs(x) <= R for x in a_xi)
        agree = (member == bool(found)) if covered else not found
        rows.append({"xi": list(xi), "a_xi": [fr(x) for x in a_xi], "in_gamma": member,
                     "kernel_modes": [list(e) for e in found], "dims": list(dims),
                     "agree": agree})
        if not agree:
            failures.append(f"lattice test disagrees with mode search at xi = {list(xi)}")
    report["dichotomy"] = rows

    checks = []
    for q in range(ts.d + 1):
        c = corollary_dimension_check(ts, q, R, jobs)
        checks.append({"q": q, "lhs": c.lhs, "rhs": c.rhs, "equal": c.equal})
        if not c.equal:
            failures.append(f"dimension count differs in degree {q}")
    report["corollary"] = checks
    report["failures"] = failures
    report["verdict"] = "pass" if not failures else "fail"
    return report, int(bool(failures))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invcohom",
                                description="Exact cohomology and solvability checks for invariant structures.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="JSON problem document, or the name of a bundled example")
    common.add_argument("--json", action="store_true", help="emit the machine-readable report")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for mode scans")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    sub.add_parser("check", parents=[common], help="Lie algebra and invariant complex checks")
    t = sub.add_parser("torus", parents=[common], help="torus structure analysis")
    t.add_argument("--radius", type=int)
    t.add_argument("--nu", type=int)
    u = sub.add_parser("tube", parents=[common], help="tube structure analysis")
    u.add_argument("--radius", type=int)
    return p


def run(argv=None) -> tuple[str, int]:
    """Parse ``argv``, run the command, and return ``(output text, exit code)``."""
    args = build_parser().parse_args(argv)
    kind = {"check": "algebra", "torus": "torus", "tube": "tube"}[args.command]
    if args.jobs < 1 or getattr(args, "radius", None) is not None and args.radius < 0 \
            or getattr(args, "nu", None) is not None and args.nu < 1:
        raise ConfigError("--jobs and --nu must be positive and --radius nonnegative")
    start = time.perf_counter()
    doc = load(args.file, kind)
    if kind == "algebra":
        report, code = cmd_algebra_check(doc, args.jobs)
    elif kind == "torus":
        report, code = cmd_torus_analyze(doc, args.radius, args.nu, args.jobs)
    else:
        report, code = cmd_tube_analyze(doc, args.radius, args.jobs)
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    return (dumps_json(report) if args.json else render_text(report)), code


def main(argv=None) -> int:
    try:
        text, code = run(argv)
    except ConfigError as exc:
        print(f"invcohom: input error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
