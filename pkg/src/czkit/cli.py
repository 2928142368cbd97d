"""``czkit`` command-line interface."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND
from .covering import check_vitali, check_whitney, vitali_cover, whitney_cover
from .czd import certify_czd, cz_decompose
from .functions import _parse_exponent
from .interp import phi_query, phi_region_sup
from .io import load_function, load_kernel, load_space, load_tensor, write_csv
from .kernel import build_kernel, certify_kernel
from .maximal import check_comparison, check_lebesgue_points, check_lp_bound, check_weak11, maximal_batch
from .mixed import check_mixed_maximal
from .operators import DEFAULT_SEED, DEFAULT_TRIALS, check_czo_bound, check_patched_bound
from .reports import BoundReport, _jsonable
from .space import SpaceError, doubling_constant, doubling_profile
from .suite import SuiteConfig, run_suite

BANNER = "!" * 72


def parse_ids(text: str) -> np.ndarray:
    """``"0,3,5"``, ``"2:10"`` (half-open) or a mix; ``@file`` reads a JSON list."""
    if text.startswith("@"):
        return np.asarray(json.loads(Path(text[1:]).read_text()), dtype=np.int64)
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            a, b = part.split(":", 1)
            out.extend(range(int(a), int(b)))
        else:
            out.append(int(part))
    return np.asarray(out, dtype=np.int64)


def parse_exponents(text: str) -> list[float]:
    return [_parse_exponent(t.strip()) for t in text.split(",") if t.strip()]


def _load_radii(text: str):
    try:
        return float(text)
    except ValueError:
        pass
    path = Path(text)
    if not path.exists():
        raise FileNotFoundError(f"radii file not found: {path}")
    if path.suffix.lower() == ".json":
        return np.asarray(json.loads(path.read_text()), dtype=np.float64)
    return np.loadtxt(path, delimiter=",", ndmin=1, comments="#")


def _dump(obj, path) -> None:
    text = json.dumps(_jsonable(obj), indent=2)
    if path:
        Path(path).write_text(text)
    else:
        print(text)


def _finish(reports: list[BoundReport]) -> int:
    """Print one line per report; exit status 0 only when all pass."""
    for rep in reports:
        print(rep.line())
    failed = [r for r in reports if not r.passed]
    if failed:
        print(BANNER, file=sys.stderr)
        print("implementation bug: a guaranteed inequality failed", file=sys.stderr)
        for r in failed:
            print(f"  {r.name} (witness {r.witness})", file=sys.stderr)
        print(BANNER, file=sys.stderr)
        return 1
    return 0


def cmd_space_validate(args) -> int:
    space = load_space(args.space)
    print(f"valid: n={space.n} mass={space.total_mass:g} diameter={space.diameter:g} "
          f"min_distance={space.min_distance:g}")
    return 0


def cmd_space_doubling(args) -> int:
    space = load_space(args.space)
    prof = doubling_profile(space, args.rmax)
    if args.out:
        write_csv(args.out, prof.rows(), header=["lo", "hi", "D"])
    else:
        for lo, hi, v in prof.rows():
            print(f"({lo:g}, {hi:g}]  D = {v:g}")
    print(f"D_{args.rmax:g} = {doubling_constant(space, args.rmax):g}")
    return 0


def cmd_cover_vitali(args) -> int:
    space = load_space(args.space)
    E = parse_ids(args.set)
    radii = _load_radii(args.radii)
    cover = vitali_cover(space, E, radii, args.R)
    reps = check_vitali(space, cover, radii)
    _dump({"centers": cover.centers, "radii": cover.radii,
           "verification": [r.to_dict() for r in reps]}, args.out)
    return _finish(reps)


def cmd_cover_whitney(args) -> int:
    space = load_space(args.space)
    cover = whitney_cover(space, parse_ids(args.set), args.R)
    reps = check_whitney(space, cover)
    overlap = next(r for r in reps if r.name == "whitney.overlap")
    _dump({"centers": cover.centers, "radii": cover.radii,
           "verification": {"max_overlap": overlap.measured_lhs, "D_R^5": cover.overlap_bound,
                            "reports": [r.to_dict() for r in reps]}}, args.out)
    return _finish(reps)


def cmd_maximal(args) -> int:
    space = load_space(args.space)
    f = load_function(args.fn)
    M = maximal_batch(space, f.abs(), args.R, args.centred)
    if args.out:
        write_csv(args.out, M[:, None], header=["M"])
    else:
        for x, v in enumerate(M[:, 0]):
            print(f"{x}\t{v!r}")
    return 0


def cmd_verify_maximal(args) -> int:
    space = load_space(args.space)
    f = load_function(args.fn)
    E = parse_ids(args.E) if args.E else None
    reps = [check_comparison(space, f, args.R), check_weak11(space, f, E, args.R)]
    reps += [check_lp_bound(space, f, E, args.R, p) for p in parse_exponents(args.p)]
    reps.append(check_lebesgue_points(space, f))
    return _finish(reps)


def cmd_czd(args) -> int:
    space = load_space(args.space)
    f = load_function(args.fn)
    dec = cz_decompose(space, f, parse_ids(args.E), args.R, args.kappa, args.alpha)
    reps = certify_czd(space, dec)
    doc = dec.to_dict()
    doc["reports"] = [r.to_dict() for r in reps]
    if args.out:
        _dump(doc, args.out)
    return _finish(reps)


def cmd_phi(args) -> int:
    if args.mode == "region":
        res = phi_region_sup(args.c1, args.c2, args.grid)
        print(json.dumps(_jsonable(res)))
        return 0
    if args.r is None or args.p is None:
        raise ValueError("phi needs --r and --p (or the 'region' mode)")
    q = phi_query(_parse_exponent(args.r), _parse_exponent(args.p))
    print(json.dumps(_jsonable({"r": q.r, "p": q.p, "phi": q.value, "q": q.minimizer_q, "method": q.method})))
    return 0


def cmd_kernel(args) -> int:
    space = load_space(args.space)
    K = build_kernel(space, None, args.r, args.R)
    reps = certify_kernel(space, K)
    if args.out:
        write_csv(args.out, K.S)
    if args.report:
        _dump({"r": K.r, "R": K.R, "D_4R": K.D4R, "identity": K.identity,
               "empirical_C6": K.empirical_C6, "reports": [r.to_dict() for r in reps]}, args.report)
    return _finish(reps)


def cmd_czo_check(args) -> int:
    space = load_space(args.space)
    K = load_kernel(args.kernel)
    reps = check_czo_bound(space, K, parse_ids(args.E), args.R, args.kappa, args.r,
                           parse_exponents(args.p), args.trials, args.seed, args.A)
    return _finish(reps)


def cmd_czo_patched(args) -> int:
    space = load_space(args.space)
    K = load_kernel(args.kernel)
    reps = check_patched_bound(space, K, args.R, args.kappa, args.r, parse_exponents(args.p),
                               args.trials, args.seed)
    return _finish(reps)


def cmd_mixed_check(args) -> int:
    space = load_space(args.space)
    tensor = load_tensor(args.tensor)
    return _finish([check_mixed_maximal(space, tensor, args.R, args.trials, args.seed)])


def cmd_run(args) -> int:
    cfg = SuiteConfig.load(args.config)
    if args.out:
        cfg.out_dir = str(Path(args.out).resolve())
    report = run_suite(cfg)
    s = report.summary
    print(f"{s['checks']} checks: {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped")
    for item in report.skipped:
        print(f"  skipped {item['space']} R={item['R']:g} {item['section']}: {item['reason']}")
    if report.failures:
        print(BANNER, file=sys.stderr)
        print("implementation bug: a guaranteed inequality failed", file=sys.stderr)
        for c in report.failures:
            print(f"  {c['space']} R={c['R']:g} {c['name']} (witness {c['witness']})", file=sys.stderr)
        print(BANNER, file=sys.stderr)
        return 1
    return 0


def _common_space(p: argparse.ArgumentParser) -> None:
    p.add_argument("space", help="space file (JSON)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="czkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"czkit {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("space", help="space files").add_subparsers(dest="action", required=True)
    p = sp.add_parser("validate", help="check the metric axioms and weights")
    _common_space(p)
    p.set_defaults(func=cmd_space_validate)
    p = sp.add_parser("doubling", help="exact doubling profile up to --rmax")
    _common_space(p)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_space_doubling)

    cv = sub.add_parser("cover", help="covering lemmas").add_subparsers(dest="action", required=True)
    p = cv.add_parser("vitali")
    _common_space(p)
    p.add_argument("--set", required=True, help="point ids, e.g. 0,1,5 or 0:20")
    p.add_argument("--radii", required=True, help="a number or a file with one radius per point of the set")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover_vitali)
    p = cv.add_parser("whitney")
    _common_space(p)
    p.add_argument("--set", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover_whitney)

    p = sub.add_parser("maximal", help="truncated maximal function")
    _common_space(p)
    p.add_argument("fn")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--centred", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_maximal)

    vf = sub.add_parser("verify", help="bound checks").add_subparsers(dest="action", required=True)
    p = vf.add_parser("maximal")
    _common_space(p)
    p.add_argument("fn")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--p", default="1.5,2,4,inf")
    p.add_argument("--E", help="restrict the left-hand sides to these ids")
    p.set_defaults(func=cmd_verify_maximal)

    p = sub.add_parser("czd", help="Calderon-Zygmund decomposition")
    _common_space(p)
    p.add_argument("fn")
    p.add_argument("--E", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--kappa", type=float, default=2.5)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_czd)

    p = sub.add_parser("phi", help="interpolation constant")
    p.add_argument("mode", nargs="?", choices=["region"])
    p.add_argument("--r")
    p.add_argument("--p")
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("kernel", help="smooth normalised kernel S_r")
    _common_space(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_kernel)

    cz = sub.add_parser("czo", help="operator bounds").add_subparsers(dest="action", required=True)
    for name, func in (("check", cmd_czo_check), ("patched", cmd_czo_patched)):
        p = cz.add_parser(name)
        _common_space(p)
        p.add_argument("--kernel", required=True, help="n x n CSV")
        if name == "check":
            p.add_argument("--E", required=True)
            p.add_argument("--A", type=float, default=None, help="use this A_R instead of the computed bound")
        p.add_argument("--R", type=float, required=True)
        p.add_argument("--kappa", type=float, default=2.5)
        p.add_argument("--r", default="inf")
        p.add_argument("--p", default="1.5,2,4")
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.set_defaults(func=func)

    mx = sub.add_parser("mixed", help="mixed-norm maximal bound").add_subparsers(dest="action", required=True)
    p = mx.add_parser("check")
    _common_space(p)
    p.add_argument("tensor")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_mixed_check)

    p = sub.add_parser("run", help="run a configured suite")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, SpaceError, ValueError) as exc:
        print(f"czkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
