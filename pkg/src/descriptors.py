"""JSON descriptors for rings, derivations, torsors, plane fields and adjunction models."""

import json
import logging
import os
from typing import Dict, List, Optional, Tuple

from .blowup import PlaneField
from .deriv import Derivation
from .errors import DescriptorError
from .report import Report
from .ring import RingElem, RingSpec
from .torsor import TorsorData

logger = logging.getLogger(__name__)


class DescriptorLoader:
    def __init__(self, spot_checks: Optional[int] = None, seed: int = 0, reports_dir: str = "reports"):
        self.spot_checks = spot_checks
        self.seed = seed
        self.reports_dir = reports_dir

    def load(self, source: str) -> Dict:
        """Read a descriptor from a path or from inline JSON."""
        text = source
        if not source.lstrip().startswith("{"):
            try:
                with open(source, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as e:
                raise DescriptorError(f"cannot read descriptor {source!r}: {e}") from e
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DescriptorError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
        if not isinstance(data, dict):
            raise DescriptorError("a descriptor must be a JSON object")
        return data

    @staticmethod
    def _field(data: Dict, key: str, kind=None):
        if key not in data:
            raise DescriptorError(f"descriptor is missing {key!r}")
        value = data[key]
        if kind is not None and not isinstance(value, kind):
            raise DescriptorError(f"descriptor field {key!r} has the wrong type")
        return value

    def get_ring(self, data: Dict, truncate: Optional[int] = None) -> RingSpec:
        """Ring from {"p", "vars", "shape", "truncate", "localize"}."""
        p = self._field(data, "p", int)
        shape = data.get("shape", "free")
        N = truncate if truncate is not None else data.get("truncate")
        localize = data.get("localize")
        if isinstance(shape, dict) and "crossing" in shape:
            pair = shape["crossing"]
            if not isinstance(pair, list) or len(pair) != 2:
                raise DescriptorError("crossing needs a pair of variable names")
            return RingSpec.crossing_ring(p, tuple(pair), truncate=N)
        vars_ = self._field(data, "vars", list)
        if shape == "free":
            return RingSpec.polynomial(p, vars_, truncate=N, localize=localize)
        if isinstance(shape, dict) and "radical_ext" in shape:
            rad = shape["radical_ext"]
            var = self._field(rad, "var", str)
            # vars lists the base variables followed by the radical variable
            if var not in vars_:
                raise DescriptorError(f"radical variable {var!r} missing from vars {vars_!r}")
            base = RingSpec.polynomial(p, [v for v in vars_ if v != var], truncate=N, localize=localize)
            return base.radical_extension(var, str(self._field(rad, "radicand")))
        raise DescriptorError(f"unknown ring shape {shape!r}")

    def get_derivation(self, data: Dict, spec: Optional[RingSpec] = None, truncate: Optional[int] = None) -> Derivation:
        spec = spec or self.get_ring(data, truncate)
        images = self._field(data, "images", dict)
        return Derivation(spec, {k: str(v) for k, v in images.items()}, spot_checks=self.spot_checks, seed=self.seed)

    def get_torsor(self, data: Dict) -> Tuple[TorsorData, Optional[List[RingElem]]]:
        """Torsor data plus the optional section-mode chart functions."""
        p = self._field(data, "p", int)
        charts = self._field(data, "charts", list)
        transitions = {}
        for t in data.get("transitions", []):
            try:
                transitions[(int(t["i"]), int(t["j"]))] = (str(t["a"]), str(t.get("gamma", "0")))
            except (KeyError, TypeError, ValueError) as e:
                raise DescriptorError(f"bad transition entry {t!r}") from e
        denominator = data.get("denominator")
        vars_ = data.get("vars") or [denominator or "s"]
        try:
            cs = [str(c["c"]) for c in charts]
        except (KeyError, TypeError) as e:
            raise DescriptorError("every chart needs a 'c' entry") from e
        T = TorsorData.build(p, cs, transitions, denominator=denominator, vars=vars_)
        section = data.get("section")
        if section is not None:
            section = [T.base.parse(str(x)) for x in section]
        return T, section

    def get_plane_field(self, data: Dict) -> PlaneField:
        p = self._field(data, "p", int)
        vars_ = data.get("vars", ["x", "y"])
        return PlaneField.parse(p, str(self._field(data, "P")), str(self._field(data, "Q")), vars_)

    def get_adjunction(self, data: Dict) -> Tuple[int, str]:
        return self._field(data, "p", int), str(data.get("c", "x"))

    def save_report(self, filename: str, report: Report) -> str:
        """Save a report as JSON under the reports directory."""
        os.makedirs(self.reports_dir, exist_ok=True)
        path = os.path.join(self.reports_dir, filename)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        logger.info("report saved to %s", path)
        return path

