"""Command-line interface.

Exit codes: 0 when the verdict is true (or the command just produces data),
1 when it is false, 2 on usage, validation or scale-guard errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .dimensions import (
    DimensionEstimate, NuTower, beurling_estimates, density_estimates, entropy_dimension_estimates,
    local_dimension_estimate, shannon_entropy, spectrum_tower,
)
from .fuglede import classify, equivalence_scan, tile_search
from .measures import (
    autocorrelation, check_orthobasis, functional_equation_sums, frequency_grid, nu_truncation,
    orthogonality_witness, recover_structure_pipeline, spectrum_truncation, zero_spheres_autocorr,
    zero_spheres_discrete,
)
from .padic import PAdicScaled, check_prime
from .serialize import (
    MAX_INLINE, dumps, load_json, measure_from_json, measure_to_json, number_to_json,
    set_from_json, set_to_json, tree_from_json, tree_to_json,
)
from .spectra import is_hadamard, spectrum_for_homogeneous, spectrum_search
from .trees import HomoTree, qp_structure, random_choice, recover_structure, to_dot


class UsageError(ValueError):
    pass


# -- argument parsing helpers ---------------------------------------------------

def _inline(text: str, flag: str) -> str:
    if len(text) > MAX_INLINE:
        raise UsageError(f"{flag}: inline input longer than {MAX_INLINE} characters; use a file")
    return text


def parse_int_list(text: str, flag: str) -> list:
    text = _inline(text, flag).strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers, got {text!r}") from None


def parse_points(text: str, p: int, flag: str) -> list:
    text = _inline(text, flag).strip()
    out = []
    for i, item in enumerate(x for x in text.split(",") if x.strip()):
        try:
            out.append(PAdicScaled.parse(p, item))
        except ValueError as exc:
            raise UsageError(f"{flag}[{i}]: {exc}") from None
    return out


def parse_levels(text: str, flag: str = "--I"):
    """Comma list of levels, 'even', 'odd', 'all', 'none', or 'mod:m:r' (levels n with n % m == r)."""
    t = _inline(text, flag).strip().lower()
    if t in ("even", "evens"):
        return lambda n: n % 2 == 0
    if t in ("odd", "odds"):
        return lambda n: n % 2 == 1
    if t == "all":
        return lambda n: True
    if t in ("none", ""):
        return frozenset()
    if t.startswith("mod:"):
        try:
            _, m, r = t.split(":")
            m, r = int(m), int(r)
        except ValueError:
            raise UsageError(f"{flag}: expected mod:m:r, got {text!r}") from None
        if m < 1:
            raise UsageError(f"{flag}: modulus must be positive")
        return lambda n: n % m == r % m
    return frozenset(parse_int_list(t, flag))


def parse_range(text: str, flag: str) -> range:
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"{flag}: expected a:b (inclusive), got {text!r}") from None
    if a > b:
        raise UsageError(f"{flag}: empty range {text!r}")
    return range(a, b + 1)


def parse_window(text: Optional[str]) -> Optional[tuple]:
    if text is None:
        return None
    vals = parse_int_list(text, "--window")
    if len(vals) != 2 or vals[0] > vals[1]:
        raise UsageError(f"--window: expected lo,hi with lo <= hi, got {text!r}")
    return tuple(vals)


def _prime(p: Optional[int], flag: str = "--p") -> int:
    if p is None:
        raise UsageError(f"{flag} is required")
    try:
        return check_prime(p)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _residues(args) -> list:
    p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
    C = parse_int_list(_need(args.set, "--set"), "--set")
    N = p ** gamma
    for i, c in enumerate(C):
        if not 0 <= c < N:
            raise UsageError(f"--set[{i}]: residue {c} outside [0, {N})")
    if len(set(C)) != len(C):
        raise UsageError("--set: repeated residues")
    return C


def _measure(args):
    data, src = load_json(_need(args.measure, "--measure"), "measure")
    return measure_from_json(data, src)


def _spectrum(args):
    data, src = load_json(_need(args.spectrum, "--spectrum"), "spectrum")
    return set_from_json(data, src)


def _choice(args):
    if getattr(args, "choice_seed", None) is None:
        return None
    return random_choice(_prime(args.p), args.choice_seed)


def _levels_list(I, gamma: int) -> list:
    return sorted(n for n in range(gamma) if (I(n) if callable(I) else n in I))


# -- tree ------------------------------------------------------------------------

def cmd_tree_build(args):
    p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
    if args.tree:
        data, src = load_json(args.tree, "tree")
        t = tree_from_json(data, src)
    else:
        I = _levels_list(parse_levels(_need(args.I, "--I")), gamma)
        t = HomoTree.build(p, gamma, I, _choice(args))
    if args.dot:
        return to_dot(t.leaves(), t.p, t.gamma), None
    return tree_to_json(t), None


def cmd_tree_recover(args):
    p = _prime(args.p)
    if args.gamma is None:
        pts = parse_points(_need(args.set, "--set"), p, "--set")
        s = qp_structure(pts)
        if s is None:
            return {"homogeneous": False}, False
        return {"homogeneous": True, "n": s.n, "gamma": s.gamma, "I": sorted(s.I), "J": sorted(s.J)}, True
    C = _residues(args)
    if not C:
        raise UsageError("--set: need at least one residue")
    t = recover_structure(C, p, args.gamma)
    if t is None:
        return {"homogeneous": False}, False
    out = tree_to_json(t)
    out["homogeneous"] = True
    return out, True


def cmd_tree_dot(args):
    if args.tree:
        data, src = load_json(args.tree, "tree")
        t = tree_from_json(data, src)
        return to_dot(t.leaves(), t.p, t.gamma), None
    C = _residues(args)
    if not C:
        raise UsageError("--set: need at least one residue")
    return to_dot(C, args.p, args.gamma), None


# -- spectrum ----------------------------------------------------------------------

def cmd_spectrum_for_homogeneous(args):
    C = _residues(args)
    t = recover_structure(C, args.p, args.gamma) if C else None
    if t is None:
        return {"homogeneous": False, "spectrum": None}, False
    return {"homogeneous": True, "spectrum": spectrum_for_homogeneous(C, args.p, args.gamma)}, True


def cmd_spectrum_search(args):
    C = _residues(args)
    D = spectrum_search(C, args.p, args.gamma, args.max_scale)
    return {"spectrum": D}, D is not None


# -- pair ----------------------------------------------------------------------------

def cmd_pair_hadamard(args):
    p = _prime(args.p)
    if args.gamma is not None:
        C = _residues(args)
        D = parse_int_list(_need(args.dual, "--dual"), "--dual")
    else:
        C = parse_points(_need(args.set, "--set"), p, "--set")
        D = parse_points(_need(args.dual, "--dual"), p, "--dual")
    if len(C) != len(D):
        raise UsageError(f"dimension mismatch: #set={len(C)}, #dual={len(D)}")
    ok = is_hadamard(C, D, p, args.gamma)
    return {"hadamard": ok}, ok


def cmd_pair_orthobasis(args):
    mu, Lam = _measure(args), _spectrum(args)
    w = orthogonality_witness(mu, Lam)
    size_ok = len(Lam) == len(mu.support())
    ok = check_orthobasis(mu, Lam)
    return {"orthobasis": ok, "size_match": size_ok, "witness": None if w is None else [str(x) for x in w]}, ok


def cmd_pair_functional_eq(args):
    mu, Lam = _measure(args), _spectrum(args)
    level = args.level if args.level is not None else mu.gamma + 1
    if level < 0:
        raise UsageError("--level must be >= 0")
    grid = frequency_grid(mu.p, level)
    ok = functional_equation_sums(mu, Lam, grid)
    bad = [str(grid[i]) for i in range(len(grid)) if not ok[i]]
    return {"passed": not bad, "level": level, "checked": len(grid), "first_failure": bad[0] if bad else None,
            "failures": len(bad)}, not bad


# -- nu --------------------------------------------------------------------------------

def cmd_nu_construct(args):
    p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
    mu = nu_truncation(p, parse_levels(_need(args.I, "--I")), gamma, _choice(args))
    return measure_to_json(mu), None


def cmd_nu_spectrum(args):
    p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
    return set_to_json(spectrum_truncation(p, parse_levels(_need(args.I, "--I")), gamma)), None


def cmd_nu_autocorr(args):
    out = measure_to_json(autocorrelation(_measure(args)))
    return out, None


# -- zeros --------------------------------------------------------------------------------

def _classification(c):
    return {
        "kind": c.kind,
        "window": list(c.window),
        "tags": {str(n): t for n, t in c.tags},
        "zero_spheres": c.zero_spheres(),
        "partial": list(c.partial),
        "witnesses": {str(n): w for n, w in c.witnesses},
    }


def _classification_tsv(c) -> str:
    lines = ["n\ttag\twitness"]
    wit = dict(c.witnesses)
    for n, t in c.tags:
        lines.append(f"{n}\t{t}\t{wit.get(n, '')}")
    return "\n".join(lines) + "\n"


def cmd_zeros_discrete(args):
    c = zero_spheres_discrete(_spectrum(args), parse_window(args.window))
    if args.tsv:
        return _classification_tsv(c), None
    return _classification(c), None


def cmd_zeros_autocorr(args):
    c = zero_spheres_autocorr(_measure(args), parse_window(args.window))
    if args.tsv:
        return _classification_tsv(c), None
    return _classification(c), None


# -- recover --------------------------------------------------------------------------------

def cmd_recover_pipeline(args):
    report = recover_structure_pipeline(_measure(args), _spectrum(args), parse_window(args.window))
    return report, bool(report["passed"])


# -- dims -------------------------------------------------------------------------------------

def _estimate_payload(est, args, header=("k", "value")):
    if args.tsv:
        rows = ["\t".join(header)] + [f"{k}\t{number_to_json(v)}" for k, v in est.values]
        return "\n".join(rows) + "\n"
    return {
        "values": [[k, number_to_json(v)] for k, v in est.values],
        "liminf_estimate": number_to_json(est.liminf_estimate),
        "limsup_estimate": number_to_json(est.limsup_estimate),
    }


def cmd_dims_entropy(args):
    if args.measure:
        mu = _measure(args)
        ks = parse_range(args.k_range, "--k-range") if args.k_range else range(1, mu.gamma + 1)
        vals = tuple((k, shannon_entropy(mu, k) / k) for k in ks)
        return _estimate_payload(DimensionEstimate(vals), args), None
    est = entropy_dimension_estimates(parse_levels(_need(args.I, "--I")),
                                      parse_range(_need(args.k_range, "--k-range"), "--k-range"))
    return _estimate_payload(est, args), None


def cmd_dims_local(args):
    p = _prime(args.p) if not args.measure else None
    ks = parse_range(_need(args.k_range, "--k-range"), "--k-range")
    if args.measure:
        mu = _measure(args)
        source, p = mu, mu.p
    else:
        source = NuTower(p, parse_levels(_need(args.I, "--I")), _choice(args))
    x = PAdicScaled.parse(p, args.x) if args.x is not None else PAdicScaled(p, 0)
    vals = tuple((k, local_dimension_estimate(source, x, k)) for k in ks)
    return _estimate_payload(DimensionEstimate(vals), args), None


def _parse_r(text: str):
    try:
        return Fraction(text)
    except ValueError:
        raise UsageError(f"--r: expected a rational, got {text!r}") from None


def cmd_dims_beurling(args):
    if args.spectrum:
        Lam = _spectrum(args)
    else:
        p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
        Lam = spectrum_truncation(p, parse_levels(_need(args.I, "--I")), gamma)
    hs = parse_int_list(_need(args.h, "--h"), "--h")
    rep = beurling_estimates(Lam, _parse_r(args.r), hs)
    if args.tsv:
        rows = ["k\tupper\tlower"]
        for (k, u), (_, lo) in zip(rep.upper, rep.lower):
            rows.append(f"{k}\t{number_to_json(u)}\t{number_to_json(lo)}")
        return "\n".join(rows) + "\n", None
    return {
        "r": number_to_json(rep.r),
        "upper": [[k, number_to_json(v)] for k, v in rep.upper],
        "lower": [[k, number_to_json(v)] for k, v in rep.lower],
        "dimension": [[k, number_to_json(v)] for k, v in rep.dimension.values],
    }, None


def cmd_dims_density(args):
    ks = parse_range(_need(args.k_range, "--k-range"), "--k-range")
    if args.spectrum:
        E = _spectrum(args)
    else:
        E = spectrum_tower(_prime(args.p), parse_levels(_need(args.I, "--I")))
    est = density_estimates(E, ks)
    if args.tsv:
        rows = ["k\tdensity\tsecond_center\tsecond_value"]
        for d in est:
            rows.append(f"{d.k}\t{number_to_json(d.value)}\t{d.second_center or ''}\t"
                        f"{'' if d.second_value is None else number_to_json(d.second_value)}")
        return "\n".join(rows) + "\n", None
    return {"values": [{"k": d.k, "density": number_to_json(d.value), "second_center": d.second_center,
                        "second_value": number_to_json(d.second_value),
                        "center_independent": d.center_independent} for d in est]}, None


# -- fuglede ------------------------------------------------------------------------------------

def cmd_fuglede_tile(args):
    C = _residues(args)
    r = tile_search(C, args.p, args.gamma, args.max_scale)
    return {"tile": r.complement is not None, "complement": r.complement, "reason": r.reason or None}, bool(r)


def cmd_fuglede_spectral(args):
    C = _residues(args)
    v = classify(C, args.p, args.gamma, args.max_scale)
    return {"spectral": v.spectral, "spectrum": v.D}, v.spectral


def cmd_fuglede_scan(args):
    p, gamma = _prime(args.p), _need(args.gamma, "--gamma")
    chosen = [s for s, flag in (("exhaustive", args.exhaustive), ("ppower", args.ppower),
                                ("random", args.random is not None)) if flag]
    if len(chosen) != 1:
        raise UsageError("choose exactly one of --exhaustive, --ppower, --random N")
    sizes = parse_int_list(args.sizes, "--sizes") if args.sizes else None
    rep = equivalence_scan(p, gamma, chosen[0], samples=args.random or 0, seed=args.seed, sizes=sizes,
                           jobs=args.jobs, keep_rows=args.rows or args.tsv, max_scale=args.max_scale)
    if args.tsv:
        return rep.tsv(), rep.all_agree
    return rep.as_dict(), rep.all_agree


# -- parser ----------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tsv", action="store_true", help="tab-separated table output where supported")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for scans (output is identical)")
    common.add_argument("--max-scale", type=int, default=None, dest="max_scale",
                        help="largest p^gamma accepted by exhaustive searches (default 81)")

    def opts(sp, *names):
        table = {
            "p": lambda: sp.add_argument("--p", type=int, help="prime"),
            "gamma": lambda: sp.add_argument("--gamma", type=int, help="depth: residues live in Z/p^gamma"),
            "set": lambda: sp.add_argument("--set", help="comma-separated residues or a/p^m points"),
            "I": lambda: sp.add_argument("--I", help="branching levels: list, even, odd, all, none or mod:m:r"),
            "choice": lambda: sp.add_argument("--choice-seed", dest="choice_seed", default=None,
                                              help="seed for pseudo-random digits at single-child nodes"),
            "measure": lambda: sp.add_argument("--measure", help="measure JSON file or inline JSON"),
            "spectrum": lambda: sp.add_argument("--spectrum", help="set JSON file or inline JSON"),
            "tree": lambda: sp.add_argument("--tree", help="tree JSON file or inline JSON"),
            "window": lambda: sp.add_argument("--window", help="sphere window lo,hi (write --window=-3,2)"),
            "k": lambda: sp.add_argument("--k-range", dest="k_range", help="inclusive range a:b"),
        }
        for n in names:
            table[n]()

    parser = argparse.ArgumentParser(prog="padicspectral", description="Spectral measures on Q_p: exact tools.")
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="command", required=True)

    def group(name, help_text):
        g = top.add_parser(name, help=help_text)
        return g.add_subparsers(dest="action", required=True)

    def leaf(sub, name, fn, help_text, *names):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        opts(sp, *names)
        sp.set_defaults(func=fn)
        return sp

    g = group("tree", "homogeneous trees")
    sp = leaf(g, "build", cmd_tree_build, "build a tree from its levels", "p", "gamma", "I", "choice", "tree")
    sp.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    leaf(g, "recover", cmd_tree_recover, "recover I and J from a set (omit --gamma for points of Q_p)",
         "p", "gamma", "set")
    sp = leaf(g, "dot", cmd_tree_dot, "DOT digraph of a set's prefix tree", "p", "gamma", "set", "tree")
    sp.add_argument("--dot", action="store_true", help=argparse.SUPPRESS)

    g = group("spectrum", "spectra of finite sets")
    leaf(g, "for-homogeneous", cmd_spectrum_for_homogeneous, "dual-tree spectrum", "p", "gamma", "set")
    leaf(g, "search", cmd_spectrum_search, "exhaustive spectrum search", "p", "gamma", "set")

    g = group("pair", "orthogonality checks")
    sp = leaf(g, "hadamard", cmd_pair_hadamard, "exact Hadamard test of (set, dual)", "p", "gamma", "set")
    sp.add_argument("--dual", help="comma-separated dual residues or points")
    leaf(g, "orthobasis", cmd_pair_orthobasis, "orthogonality of exponentials in L2(measure)",
         "measure", "spectrum")
    sp = leaf(g, "functional-eq", cmd_pair_functional_eq, "Parseval sums on the frequency grid",
              "measure", "spectrum")
    sp.add_argument("--level", type=int, default=None, help="grid m/p^level (default gamma + 1)")

    g = group("nu", "homogeneous tree measures")
    leaf(g, "construct", cmd_nu_construct, "measure truncation at depth gamma", "p", "gamma", "I", "choice")
    leaf(g, "spectrum", cmd_nu_spectrum, "spectrum truncation at depth gamma", "p", "gamma", "I")
    leaf(g, "autocorr", cmd_nu_autocorr, "autocorrelation of a measure", "measure")

    g = group("zeros", "zero spheres")
    leaf(g, "discrete", cmd_zeros_discrete, "spheres where the transform of a set vanishes",
         "spectrum", "window")
    leaf(g, "autocorr", cmd_zeros_autocorr, "spheres where the autocorrelation transform vanishes",
         "measure", "window")

    g = group("recover", "structure recovery")
    leaf(g, "pipeline", cmd_recover_pipeline, "recover and verify a spectral pair", "measure", "spectrum", "window")

    g = group("dims", "dimension and density estimates")
    leaf(g, "entropy", cmd_dims_entropy, "entropy dimension sections", "I", "k", "measure")
    sp = leaf(g, "local", cmd_dims_local, "local dimension sections", "p", "I", "choice", "k", "measure")
    sp.add_argument("--x", default=None, help="centre point (default 0)")
    sp = leaf(g, "beurling", cmd_dims_beurling, "Beurling densities", "p", "gamma", "I", "spectrum")
    sp.add_argument("--r", default="1", help="exponent r > 0")
    sp.add_argument("--h", help="comma-separated radii, powers of p")
    leaf(g, "density", cmd_dims_density, "ball-count densities", "p", "I", "k", "spectrum")

    g = group("fuglede", "tiles, spectral sets and homogeneity in Z/p^gamma")
    leaf(g, "tile", cmd_fuglede_tile, "tiling complement search", "p", "gamma", "set")
    leaf(g, "spectral", cmd_fuglede_spectral, "spectrum search", "p", "gamma", "set")
    sp = leaf(g, "scan", cmd_fuglede_scan, "compare the three predicates over many subsets", "p", "gamma")
    sp.add_argument("--exhaustive", action="store_true", help="all subsets (p^gamma <= 16)")
    sp.add_argument("--ppower", action="store_true", help="all subsets of p-power size (p^gamma <= 27)")
    sp.add_argument("--random", type=int, default=None, metavar="N", help="N random subsets")
    sp.add_argument("--seed", type=int, default=None, help="seed for --random (reported)")
    sp.add_argument("--sizes", default=None, help="restrict to these subset sizes")
    sp.add_argument("--rows", action="store_true", help="list every subset with witnesses")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, verdict = args.func(args)
    except ValueError as exc:  # includes input, usage and scale-guard errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        sys.stdout.write(dumps(payload) + "\n")
    return 0 if verdict in (None, True) else 1


if __name__ == "__main__":
    raise SystemExit(main())
