"""Run configuration and CSV/JSON serialization.

CSV floats are written with 17 significant digits; JSON floats use Python's
shortest round-trip repr. Both parse back to the identical double.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ringpol.polarization import PolarizationCase, PolarizationPoint, TextureSample
from ringpol.search import COLUMNS, Family, SweepResult, SweepSpec

FORMATS = ("csv", "json")
INPUT_MODES = ("eigen_mixture", "sz_mixture")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    variable: str = "ka"
    lo: float = 0.0
    hi: float = 0.0
    samples: int = 2000
    family: Optional[dict] = None  # {"index": m, "sign": -1, "which": "fix_gamma2"}


@dataclass
class RunConfig:
    so_ratio: Optional[float] = None
    ka: Optional[float] = None
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    case: str = "a"
    sweep: Optional[SweepConfig] = None
    input_mode: Any = "eigen_mixture"  # or {"pure": [[re, im], [re, im]]}
    phi_samples: int = 721
    refine: bool = False
    out: Optional[str] = None
    points_out: Optional[str] = None
    format: str = "csv"
    seed: int = 42
    count: int = 200

    def validate(self) -> "RunConfig":
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        try:
            PolarizationCase.parse(self.case)
        except ValueError:
            raise ConfigError("case must be 'a' or 'b'") from None
        for name in ("so_ratio", "ka", "gamma1", "gamma2"):
            v = getattr(self, name)
            if v is not None and not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ConfigError(f"{name} must be a finite number")
        if self.sweep is not None:
            s = self.sweep
            if not s.samples >= 2:
                raise ConfigError("sweep.samples must be at least 2")
            if not s.lo < s.hi:
                raise ConfigError("sweep range needs lo < hi")
            if s.family is not None:
                unknown = set(s.family) - {"index", "sign", "which"}
                if unknown:
                    raise ConfigError(f"unknown family keys: {sorted(unknown)}")
        if not (isinstance(self.input_mode, str) and self.input_mode in INPUT_MODES
                or isinstance(self.input_mode, dict) and set(self.input_mode) == {"pure"}):
            raise ConfigError("input_mode must be eigen_mixture, sz_mixture or {'pure': ...}")
        if self.phi_samples < 2:
            raise ConfigError("phi_samples must be at least 2")
        return self

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"missing required parameters: {', '.join(missing)}")

    def sweep_spec(self) -> SweepSpec:
        if self.sweep is None:
            raise ConfigError("no sweep section configured")
        s = self.sweep
        fam = None
        if s.family is not None:
            fam = Family(int(s.family.get("index", 0)), int(s.family.get("sign", -1)),
                         s.family.get("which", "fix_gamma2"))
        try:
            return SweepSpec(s.variable, float(s.lo), float(s.hi), int(s.samples), fam,
                             PolarizationCase.parse(self.case))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def pure_input(self) -> Optional[np.ndarray]:
        if isinstance(self.input_mode, dict):
            (up_re, up_im), (dn_re, dn_im) = self.input_mode["pure"]
            return np.array([complex(up_re, up_im), complex(dn_re, dn_im)])
        return None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if data.get("sweep") is not None:
            sk = {f.name for f in fields(SweepConfig)}
            bad = set(data["sweep"]) - sk
            if bad:
                raise ConfigError(f"unknown sweep keys: {sorted(bad)}")
            data["sweep"] = SweepConfig(**data["sweep"])
        return cls(**data).validate()


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def jsonable(x):
    """Convert numpy values and complex numbers into JSON-ready Python values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, PolarizationCase):
        return x.value
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def rows_to_csv(header: list[str], rows: list[list], meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if meta:
        for key, value in meta.items():
            buf.write(f"# {key}: {json.dumps(jsonable(value))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse CSV produced by :func:`rows_to_csv`: metadata dict and row dicts."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


def sweep_table(result: SweepResult) -> tuple[list[str], list[list]]:
    rows = [[getattr(r, c) for c in COLUMNS] for r in result.rows]
    return list(COLUMNS), rows


def point_record(p: PolarizationPoint) -> dict:
    return {
        "case": p.case_tag.value,
        "so_ratio": p.params.so_ratio,
        "ka": p.params.ka,
        "gamma1": p.geom.gamma1,
        "gamma2": p.geom.gamma2,
        "eta": p.eta,
        "eta1": p.eta1,
        "eta2": p.eta2,
        "reflection_loss": p.reflection_loss,
        "residual": p.residual,
        "det_norm_1": p.det_norm[0],
        "det_norm_2": p.det_norm[1],
        "out_spinor_1": p.out_spinor[0],
        "out_spinor_2": p.out_spinor[1],
    }


POINT_CSV = ("case", "so_ratio", "ka", "gamma1", "gamma2", "eta", "eta1", "eta2",
             "reflection_loss", "residual", "det_norm_1", "det_norm_2")

TEXTURE_COLUMNS = ("phi", "segment", "prob_1", "prob_2", "bloch_x", "bloch_y", "bloch_z", "purity")


def texture_table(samples: list[TextureSample]) -> tuple[list[str], list[list]]:
    rows = [[s.phi, s.segment + 1, s.prob[0], s.prob[1], *s.bloch, s.purity] for s in samples]
    return list(TEXTURE_COLUMNS), rows


def table_json(header, rows, meta=None) -> str:
    return dumps({"meta": meta or {}, "columns": header,
                  "rows": [dict(zip(header, r)) for r in rows]})


def write_text(path: Optional[str], text: str, stream=None) -> None:
    if path is None:
        (stream or sys.stdout).write(text)
        return
    Path(path).write_text(text)
