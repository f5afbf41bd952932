"""Run configuration and machine-readable curvature reports.

Configs round-trip losslessly through JSON; reports serialize with a stable
field order so byte-identical output (modulo the timestamp and wall-time
fields) certifies determinism for a fixed seed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import minkowski


@dataclass
class SpaceConfig:
    case: int = 6
    n: int = 1
    k: int = 1
    l: int = 1
    torus: list = None  # two integer 3-vectors for case 7


@dataclass
class MetricConfig:
    blocks: list = field(default_factory=lambda: [1.0, 1.0, 1.0, 1.0])
    v: object = "m0"    # "m0" or explicit m-coordinates
    phi: dict = field(default_factory=lambda: {"family": "randers", "eps": 0.05})


@dataclass
class ScanConfig:
    flag_samples: int = 2000
    refine_iters: int = 40
    tol: float = 1e-8
    s_rays: int = 500


@dataclass
class OracleConfig:
    enable: list = field(default_factory=lambda: [
        "hom_vs_chart", "localization", "commuting_pair", "riemannian_pipeline"])


@dataclass
class RunConfig:
    space: SpaceConfig = field(default_factory=SpaceConfig)
    metric: MetricConfig = field(default_factory=MetricConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    seed: int = 0
    negative_control: bool = False
    out: str = None

    @staticmethod
    def from_dict(d):
        d = dict(d)
        return RunConfig(
            space=SpaceConfig(**d.get("space", {})),
            metric=MetricConfig(**d.get("metric", {})),
            scan=ScanConfig(**d.get("scan", {})),
            oracle=OracleConfig(**d.get("oracle", {})),
            seed=int(d.get("seed", 0)),
            negative_control=bool(d.get("negative_control", False)),
            out=d.get("out"),
        )

    def to_dict(self):
        return {
            "space": asdict(self.space),
            "metric": asdict(self.metric),
            "scan": asdict(self.scan),
            "oracle": asdict(self.oracle),
            "seed": self.seed,
            "negative_control": self.negative_control,
            "out": self.out,
        }

    @staticmethod
    def load(path):
        with open(path) as f:
            return RunConfig.from_dict(json.load(f))

    def phi_function(self):
        p = dict(self.metric.phi)
        fam = p.pop("family", "randers")
        if fam == "randers":
            eps = p.get("eps", p.get("t", 0.05))
            return minkowski.phi_randers(float(eps))
        if fam == "riemannian":
            return minkowski.phi_riemannian()
        if fam == "sqrt_quadratic":
            return minkowski.phi_sqrt_quadratic()
        if fam == "polynomial":
            return minkowski.phi_polynomial(p["coeffs"])
        raise ValueError(f"unknown phi family {fam!r}")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class CurvatureReport:
    """Per-case verification outcome; every number is reproducible from the
    echoed config and seed."""

    case: str
    checks: dict = field(default_factory=dict)       # name -> {passed, detail}
    s_curvature: dict = field(default_factory=dict)  # max_abs, rays
    flag_scan: dict = field(default_factory=dict)    # min, argmin, budget
    residuals: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    timestamp: str = ""

    def finalize(self, wall_time):
        self.wall_time_s = round(float(wall_time), 3)
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return self

    def add_check(self, name, passed, **detail):
        self.checks[name] = {"passed": bool(passed), **_jsonable(detail)}

    @property
    def all_passed(self):
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self):
        return {
            "case": self.case,
            "checks": _jsonable(self.checks),
            "s_curvature": _jsonable(self.s_curvature),
            "flag_scan": _jsonable(self.flag_scan),
            "residuals": _jsonable(self.residuals),
            "config": _jsonable(self.config),
            "wall_time_s": self.wall_time_s,
            "timestamp": self.timestamp,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        lines = [f"case: {self.case}"]
        for name, c in self.checks.items():
            status = "PASS" if c["passed"] else "FAIL"
            extra = {k: v for k, v in c.items() if k != "passed"}
            lines.append(f"  [{status}] {name}" + (f"  {extra}" if extra else ""))
        if self.s_curvature:
            lines.append(f"  S-curvature: max|S| = {self.s_curvature.get('max_abs'):.3e} "
                         f"over {self.s_curvature.get('rays')} rays")
        if self.flag_scan:
            lines.append(f"  flag scan: min K = {self.flag_scan.get('min'):.6f} "
                         f"({self.flag_scan.get('note', '')})")
        for k, v in self.residuals.items():
            lines.append(f"  residual {k}: {v:.3e}")
        lines.append(f"  wall time: {self.wall_time_s}s")
        return "\n".join(lines)
