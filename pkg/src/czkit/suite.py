"""Run a configured batch of checks and write a JSON report plus CSV plot data."""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .covering import check_vitali, check_whitney, vitali_cover, whitney_cover
from .czd import admissible_alpha, certify_czd, cz_decompose
from .functions import _parse_exponent
from .generators import generate_space
from .interp import INF, phi, phi_many, phi_upper_bounds
from .io import load_space, space_from_dict
from .kernel import build_kernel, certify_kernel
from .maximal import check_comparison, check_lebesgue_points, check_lp_bound, check_weak11
from .mixed import MixedNormTensor, check_mixed_maximal
from .operators import check_czo_bound, check_patched_bound, schur_row_sum_check, truncate_kernel
from .reports import BoundReport, _jsonable
from .space import MetricMeasureSpace, ball_members, doubling_constant, doubling_profile

SCHEMA_VERSION = 1
PLOT_KINDS = ("phi_surface", "ratio_vs_p", "overlap_hist", "profile")
ALL_CHECKS = ("doubling", "vitali", "whitney", "maximal", "czd", "phi", "kernel", "czo", "patched", "mixed")


@dataclass
class SuiteConfig:
    """Everything a run depends on; a run is reproducible from this alone.

    ``spaces`` entries are ``{"name", "kind", "params"}`` for generated
    spaces, ``{"name", "file"}`` for space files (relative paths resolve
    against ``base_dir``) or ``{"name", "data"}`` with an inline space
    description.
    """

    spaces: list[dict[str, Any]] = field(default_factory=list)
    R: list[float] = field(default_factory=lambda: [1.0])
    p: list[Any] = field(default_factory=lambda: [1.5, 2.0, 4.0])
    r_exp: Any = "inf"
    kappa: float = 2.5
    trials: int = 20
    seed: int = 20240607
    checks: list[str] = field(default_factory=lambda: list(ALL_CHECKS))
    tolerances: dict[str, float] = field(default_factory=dict)
    mixed_axes: list[int] = field(default_factory=lambda: [3, 4])
    mixed_exponents: list[float] = field(default_factory=lambda: [2.0, 3.0, 2.0])
    phi_r: list[Any] = field(default_factory=lambda: [2.0, 4.0, "inf"])
    phi_p: list[float] = field(default_factory=lambda: np.round(np.geomspace(1.1, 10.0, 25), 6).tolist())
    out_dir: str = "czkit-out"
    base_dir: str = "."

    def __post_init__(self):
        unknown = [c for c in self.checks if c not in ALL_CHECKS]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; expected a subset of {', '.join(ALL_CHECKS)}")
        unknown = [k for k in self.tolerances if k != "rel_slack"]
        if unknown:
            raise ValueError(f"unknown tolerance overrides {unknown}; only 'rel_slack' is supported")
        if len(self.mixed_exponents) != len(self.mixed_axes) + 1:
            raise ValueError("mixed_exponents needs one entry per Y axis plus one for X")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | os.PathLike = ".") -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        data = dict(data)
        data.setdefault("base_dir", str(base_dir))
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SuiteConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.resolve().parent)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("base_dir")
        return _jsonable(out)


@dataclass
class RunReport:
    config: dict
    checks: list[dict]
    skipped: list[dict]
    timing: dict[str, float] = field(default_factory=dict)
    generated_at: str = ""
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def summary(self) -> dict[str, int]:
        failed = sum(not c["passed"] for c in self.checks)
        return {"checks": len(self.checks), "passed": len(self.checks) - failed, "failed": failed,
                "skipped": len(self.skipped)}

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def failures(self) -> list[dict]:
        return [c for c in self.checks if not c["passed"]]

    def body(self) -> dict:
        """The reproducible part: everything except wall-clock times and the timestamp."""
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "config": self.config,
            "checks": self.checks,
            "skipped": self.skipped,
            "summary": self.summary,
        }

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2)

    def to_dict(self) -> dict:
        return dict(self.body(), timing=self.timing, generated_at=self.generated_at)

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "report.json"
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2))
        return path


def _resolve_space(entry: dict, base_dir: Path) -> tuple[str, MetricMeasureSpace]:
    if "file" in entry:
        path = Path(entry["file"])
        if not path.is_absolute():
            path = base_dir / path
        space = load_space(path)
        return entry.get("name", path.stem), space
    if "data" in entry:
        return entry.get("name", "inline"), space_from_dict(entry["data"])
    if "kind" in entry:
        space = generate_space(entry["kind"], entry.get("params", {}))
        return entry.get("name", space.label or entry["kind"]), space
    raise ValueError(f"space entry needs 'file', 'data' or 'kind': {entry}")


# every section has the signature (space, R, cfg, rng) -> list of reports

def _sec_doubling(space, R, cfg, rng):
    prof = doubling_profile(space, R)
    D = doubling_constant(space, R)
    ok = D >= 1 and math.isfinite(D) and D == prof(R)
    return [BoundReport.condition("space.doubling", ok, D_R=D, profile=[list(r) for r in prof.rows()])]


def _sec_vitali(space, R, cfg, rng):
    E = ball_members(space, 0, R)
    radii = R * (1.0 - rng.random(E.size))
    cover = vitali_cover(space, E, radii, R)
    return check_vitali(space, cover, radii)


def _sec_whitney(space, R, cfg, rng):
    U = ball_members(space, 0, R / 2)
    return check_whitney(space, whitney_cover(space, U, R))


def _sec_maximal(space, R, cfg, rng):
    f = rng.standard_normal(space.n)
    spikes = rng.choice(space.n, size=min(3, space.n), replace=False)
    f[spikes] *= 25.0
    E = ball_members(space, 0, 3 * R)
    reps = [check_comparison(space, f, R), check_weak11(space, f, E, R)]
    reps += [check_lp_bound(space, f, E, R, p) for p in [*cfg.p, "inf"]]
    reps.append(check_lebesgue_points(space, f))
    return reps


def _sec_czd(space, R, cfg, rng):
    E = ball_members(space, 0, R / 2)
    f = np.zeros(space.n)
    f[E] = 0.1 * rng.standard_normal(E.size)
    spikes = rng.choice(E, size=min(2, E.size), replace=False)
    f[spikes] = 50.0 * (1.0 + rng.random(spikes.size))
    threshold = admissible_alpha(space, f, E, R, cfg.kappa)
    alpha = threshold * (1.0 + 2.0**-10) if threshold > 0 else 1.0
    dec = cz_decompose(space, f, E, R, cfg.kappa, alpha)
    reps = certify_czd(space, dec)
    reps[0].details.update(bad_set_size=len(dec.bad_set), balls=len(dec.centers))
    return reps


def _sec_phi(space, R, cfg, rng):
    ps = [_parse_exponent(p) for p in cfg.p]
    reps = []
    for r in sorted({*ps, INF}):
        for p in ps:
            val = phi(r, p)
            if r == INF:
                exact = (p / (p - 1.0)) ** (1.0 / p)
                reps.append(BoundReport.inequality(f"phi.closed_form[r=inf,p={p:g}]", 1e-12,
                                                   abs(val - exact), exact, p=p, r=r, phi=val))
                continue
            if p > r:
                continue
            for label, bound in zip(("sqrt_r", "q_eq_p"), phi_upper_bounds(r, p)):
                if not math.isnan(bound):
                    reps.append(BoundReport.inequality(f"phi.upper_{label}[r={r:g},p={p:g}]", 1.0, val, bound,
                                                       p=p, r=r, phi=val))
    rs = np.array([_parse_exponent(r) for r in cfg.phi_r], dtype=np.float64)
    pg = np.asarray(cfg.phi_p, dtype=np.float64)
    Rg, Pg = np.meshgrid(rs, pg, indexing="ij")
    surface = phi_many(Rg, Pg)
    reps.append(BoundReport.condition("phi.surface", bool(np.all(np.isfinite(surface) & (surface >= 1.0))),
                                      r=Rg.ravel(), p=Pg.ravel(), phi=surface.ravel()))
    return reps


def _sec_kernel(space, R, cfg, rng):
    return certify_kernel(space, build_kernel(space, None, R / 2, R))


def _sec_czo(space, R, cfg, rng):
    K = build_kernel(space, None, R / 4, R, with_c6=False).S
    E = ball_members(space, 0, R / 2)
    seed = int(rng.integers(2**31))
    return check_czo_bound(space, K, E, R, cfg.kappa, cfg.r_exp, cfg.p, cfg.trials, seed)


def _sec_patched(space, R, cfg, rng):
    K = truncate_kernel(space, build_kernel(space, None, R / 7, R, with_c6=False).S, R / 3)
    seed = int(rng.integers(2**31))
    return check_patched_bound(space, K, R, cfg.kappa, cfg.r_exp, cfg.p, cfg.trials, seed)


def _sec_mixed(space, R, cfg, rng):
    axes = (*cfg.mixed_axes, space.n)
    weights = [0.5 + rng.random(a) for a in cfg.mixed_axes] + [space.weight]
    tensor = MixedNormTensor(axes, weights, cfg.mixed_exponents, rng.standard_normal(axes))
    seed = int(rng.integers(2**31))
    return [check_mixed_maximal(space, tensor, R, cfg.trials, seed), schur_row_sum_check(space, R)]


SECTIONS: dict[str, Callable] = {
    "doubling": _sec_doubling,
    "vitali": _sec_vitali,
    "whitney": _sec_whitney,
    "maximal": _sec_maximal,
    "czd": _sec_czd,
    "phi": _sec_phi,
    "kernel": _sec_kernel,
    "czo": _sec_czo,
    "patched": _sec_patched,
    "mixed": _sec_mixed,
}


def _rejudge(rep: BoundReport, slack: float) -> BoundReport:
    # flags recorded as False in the details (support checks) cannot be relaxed
    if any(v is False for v in rep.details.values()):
        return rep
    lhs, C, rhs = rep.measured_lhs, rep.claimed_constant, rep.measured_rhs
    rep.passed = bool(math.isfinite(lhs) and lhs <= C * rhs * (1.0 + slack))
    return rep


def _run_space(si: int, entry: dict, cfg: SuiteConfig, base_dir: Path):
    name, space = _resolve_space(entry, base_dir)
    checks, skipped, timing = [], [], {}
    for ri, R in enumerate(cfg.R):
        R = float(R)
        for sec in cfg.checks:
            rng = np.random.default_rng([cfg.seed, si, ri, ALL_CHECKS.index(sec)])
            t0 = time.perf_counter()
            try:
                reps = SECTIONS[sec](space, R, cfg, rng)
            except ValueError as exc:
                skipped.append({"space": name, "R": R, "section": sec, "reason": str(exc)})
                reps = []
            except Exception as exc:  # noqa: BLE001 - any other failure is reported, not raised
                reps = [BoundReport.condition(f"{sec}.error", False, error=f"{type(exc).__name__}: {exc}")]
            timing[f"{name}/R={R:g}/{sec}"] = time.perf_counter() - t0
            for rep in reps:
                if "rel_slack" in cfg.tolerances:
                    rep = _rejudge(rep, float(cfg.tolerances["rel_slack"]))
                checks.append(dict(space=name, R=R, section=sec, **rep.to_dict()))
    return checks, skipped, timing


def _thread_count() -> int:
    raw = os.environ.get("CZKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"CZKIT_THREADS must be an integer, got {raw!r}") from None


def run_suite(config: SuiteConfig, write: bool = True) -> RunReport:
    """Execute the configured checks; infeasible preconditions are recorded as skipped.

    Spaces run concurrently when ``CZKIT_THREADS`` exceeds one; results are
    merged in config order, so the report body does not depend on it.
    """
    base_dir = Path(config.base_dir)
    # resolve every space up front so a missing file fails before any work
    for entry in config.spaces:
        if "file" in entry:
            path = Path(entry["file"])
            path = path if path.is_absolute() else base_dir / path
            if not path.exists():
                raise FileNotFoundError(f"space file not found: {path}")
    jobs = list(enumerate(config.spaces))
    threads = min(_thread_count(), max(1, len(jobs)))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _run_space(j[0], j[1], config, base_dir), jobs))
    else:
        parts = [_run_space(si, e, config, base_dir) for si, e in jobs]
    checks, skipped, timing = [], [], {}
    for c, s, t in parts:
        checks += c
        skipped += s
        timing.update(t)
    report = RunReport(config.to_dict(), checks, skipped, timing,
                       datetime.now(timezone.utc).isoformat(timespec="seconds"))
    if write:
        out = Path(config.out_dir)
        if not out.is_absolute():
            out = base_dir / out
        report.write(out)
        for kind in PLOT_KINDS:
            emit_plot_data(report, kind, out)
    return report


def plot_rows(report: RunReport, kind: str) -> tuple[list[str], list[list]]:
    """Header and rows of one plot-data table, in report order."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {', '.join(PLOT_KINDS)}")
    rows: list[list] = []
    if kind == "phi_surface":
        header = ["r", "p", "phi"]
        for c in report.checks:
            if c["name"] == "phi.surface":
                d = c["details"]
                rows += [list(t) for t in zip(d["r"], d["p"], d["phi"])]
        # one surface per run is enough: every section computes the same grid
        seen, uniq = set(), []
        for row in rows:
            key = (str(row[0]), row[1])
            if key not in seen:
                seen.add(key)
                uniq.append(row)
        rows = uniq
    elif kind == "ratio_vs_p":
        header = ["check", "space", "R", "p", "ratio", "claimed_constant", "passed"]
        for c in report.checks:
            if "p" in c["details"] and not c["name"].startswith("phi."):
                rows.append([c["name"], c["space"], c["R"], c["details"]["p"], c["ratio"],
                             c["claimed_constant"], c["passed"]])
    elif kind == "overlap_hist":
        header = ["space", "R", "overlap", "count"]
        for c in report.checks:
            if c["name"] == "whitney.overlap":
                rows += [[c["space"], c["R"], k, n] for k, n in enumerate(c["details"]["histogram"]) if n]
    else:
        header = ["space", "lo", "hi", "D"]
        for c in report.checks:
            if c["name"] == "space.doubling":
                rows += [[c["space"], *row] for row in c["details"]["profile"]]
    return header, rows


def emit_plot_data(report: RunReport, kind: str, out_dir) -> Path:
    """Write ``<kind>.csv`` into ``out_dir``; an empty report gives a header-only file."""
    header, rows = plot_rows(report, kind)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{kind}.csv"
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)
