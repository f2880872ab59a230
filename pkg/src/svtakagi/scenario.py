"""Scenario files: parsing, serialization, construction and execution."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from svtakagi.exactgeom import DimensionError, format_rational, parse_rational, vector_from_json, vector_to_json, zero
from svtakagi.svmap import DomainGrid, ErrorMap, map_from_json, map_to_json
from svtakagi.takagi import dyadic_lattice
from svtakagi.verify import CONCAVE, CONVEX, RunConfig, TestPair, VerificationReport, run_checks

_REQUIRED = {"id", "dim", "grid", "map", "A", "B", "pairs", "depth", "mode"}
_OPTIONAL = {"description", "slack", "probe_weakened"}


class ScenarioError(ValueError):
    """Malformed scenario file."""


@dataclass(frozen=True)
class GridSpec:
    kind: str  # "box" or "simplex"
    step: Fraction
    lo: tuple = ()
    hi: tuple = ()
    vertices: tuple = ()

    def build(self) -> DomainGrid:
        if self.kind == "box":
            return DomainGrid.box(self.lo, self.hi, self.step)
        return DomainGrid.simplex(self.vertices, self.step)

    def to_json(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "lo": vector_to_json(self.lo), "hi": vector_to_json(self.hi),
                    "step": format_rational(self.step)}
        return {"kind": "simplex", "vertices": [vector_to_json(v) for v in self.vertices],
                "step": format_rational(self.step)}

    @classmethod
    def from_json(cls, obj) -> GridSpec:
        if not isinstance(obj, dict):
            raise ScenarioError("grid must be an object")
        kind = obj.get("kind")
        if kind == "box" and set(obj) == {"kind", "lo", "hi", "step"}:
            return cls("box", parse_rational(obj["step"]), vector_from_json(obj["lo"]), vector_from_json(obj["hi"]))
        if kind == "simplex" and set(obj) == {"kind", "vertices", "step"}:
            return cls("simplex", parse_rational(obj["step"]),
                       vertices=tuple(vector_from_json(v) for v in obj["vertices"]))
        raise ScenarioError(f"bad grid spec: {obj!r}")


@dataclass(frozen=True)
class PairSample:
    count: int
    seed: int


def _strict_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{name} must be an integer")
    return value


@dataclass(frozen=True)
class Scenario:
    id: str
    dim: int
    grid: GridSpec
    map: object
    A: object
    B: object
    pairs: tuple[tuple[int, int], ...] | PairSample
    depth: int
    mode: str
    slack: Fraction = Fraction(0)
    probe_weakened: bool = False
    description: str | None = field(default=None, compare=False)

    # -- (de)serialization

    @classmethod
    def from_json(cls, obj) -> Scenario:
        if not isinstance(obj, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(obj) - _REQUIRED - _OPTIONAL
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        missing = _REQUIRED - set(obj)
        if missing:
            raise ScenarioError(f"missing scenario fields: {sorted(missing)}")
        if not isinstance(obj["id"], str) or not obj["id"]:
            raise ScenarioError("id must be a nonempty string")
        dim = _strict_int(obj["dim"], "dim")
        depth = _strict_int(obj["depth"], "depth")
        if dim < 1 or depth < 0:
            raise ScenarioError("dim must be positive and depth nonnegative")
        if obj["mode"] not in (CONVEX, CONCAVE):
            raise ScenarioError(f"mode must be {CONVEX!r} or {CONCAVE!r}")
        probe = obj.get("probe_weakened", False)
        if not isinstance(probe, bool):
            raise ScenarioError("probe_weakened must be a boolean")
        raw_pairs = obj["pairs"]
        if isinstance(raw_pairs, dict):
            if set(raw_pairs) != {"count", "seed"}:
                raise ScenarioError("sampled pairs need exactly count and seed")
            pairs = PairSample(_strict_int(raw_pairs["count"], "count"), _strict_int(raw_pairs["seed"], "seed"))
        elif isinstance(raw_pairs, list):
            pairs = []
            for p in raw_pairs:
                if not isinstance(p, list) or len(p) != 2:
                    raise ScenarioError(f"pair must be [i, j]: {p!r}")
                pairs.append((_strict_int(p[0], "pair index"), _strict_int(p[1], "pair index")))
            pairs = tuple(pairs)
        else:
            raise ScenarioError("pairs must be a list or {count, seed}")
        description = obj.get("description")
        if description is not None and not isinstance(description, str):
            raise ScenarioError("description must be a string")
        slack = parse_rational(obj.get("slack", "0"))
        if slack < 0:
            raise ScenarioError("slack must be nonnegative")
        return cls(
            id=obj["id"],
            dim=dim,
            grid=GridSpec.from_json(obj["grid"]),
            map=map_from_json(obj["map"], dim),
            A=map_from_json(obj["A"], dim),
            B=map_from_json(obj["B"], dim),
            pairs=pairs,
            depth=depth,
            mode=obj["mode"],
            slack=slack,
            probe_weakened=probe,
            description=description,
        )

    def to_json(self) -> dict:
        out = {"id": self.id}
        if self.description is not None:
            out["description"] = self.description
        out.update({
            "dim": self.dim,
            "grid": self.grid.to_json(),
            "map": map_to_json(self.map),
            "A": map_to_json(self.A),
            "B": map_to_json(self.B),
            "pairs": ({"count": self.pairs.count, "seed": self.pairs.seed} if isinstance(self.pairs, PairSample)
                      else [list(p) for p in self.pairs]),
            "depth": self.depth,
            "mode": self.mode,
            "slack": format_rational(self.slack),
            "probe_weakened": self.probe_weakened,
        })
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    # -- construction

    def _pair_indices(self, n: int) -> list[tuple[int, int]]:
        if isinstance(self.pairs, PairSample):
            combos = list(itertools.combinations(range(n), 2))
            if self.pairs.count > len(combos):
                raise ScenarioError(f"asked for {self.pairs.count} pairs from {len(combos)}")
            return random.Random(self.pairs.seed).sample(combos, self.pairs.count)
        for i, j in self.pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ScenarioError(f"pair ({i}, {j}) outside the grid of {n} points")
        return list(self.pairs)

    def build(self, depth: int | None = None):
        """Grid (with combination points adjoined), maps and test pairs."""
        depth = self.depth if depth is None else depth
        base = self.grid.build()
        if base.dim != self.dim:
            raise DimensionError(f"grid dimension {base.dim} differs from dim {self.dim}")
        value_dims = {self.map.dim, self.A.dim, self.B.dim}
        if len(value_dims) != 1:
            raise DimensionError("F, A and B take values in different dimensions")
        ts = tuple(dyadic_lattice(depth))
        pairs = [TestPair(k, base.points[i], base.points[j], ts)
                 for k, (i, j) in enumerate(self._pair_indices(len(base)))]
        grid = base.adjoin(p.point(t) for p in pairs for t in ts)
        diffs = sorted({p.u for p in pairs} | {zero(self.dim)})
        A = ErrorMap(self.A, self.dim, diffs)
        B = ErrorMap(self.B, self.dim, diffs)
        return grid, self.map, A, B, pairs


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def parse_scenario(text: str) -> Scenario:
    def no_floats(s):
        raise ScenarioError(f"floating-point literal {s} not allowed; use a rational string")

    try:
        obj = json.loads(text, parse_float=no_floats)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return Scenario.from_json(obj)


def run_scenario(sc: Scenario, slack=None, depth: int | None = None, workers: int | None = None) -> VerificationReport:
    depth = sc.depth if depth is None else depth
    if depth < 0:
        raise ScenarioError("depth must be nonnegative")
    grid, F, A, B, pairs = sc.build(depth)
    config = RunConfig(mode=sc.mode, depth=depth, slack=sc.slack if slack is None else Fraction(slack),
                       probe=sc.probe_weakened)
    return run_checks(sc.id, F, A, B, grid, pairs, config, workers)


def builtin_scenarios() -> list[Scenario]:
    """The shipped suite, in file-name order."""
    folder = resources.files("svtakagi") / "scenarios"
    files = sorted((p for p in folder.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)
    return [parse_scenario(p.read_text(encoding="utf-8")) for p in files]


def builtin(name: str) -> Scenario:
    for sc in builtin_scenarios():
        if sc.id == name:
            return sc
    raise KeyError(name)


def report_text(report: VerificationReport) -> str:
    return json.dumps(report.to_json(), indent=1) + "\n"


def write_report(report: VerificationReport, path) -> None:
    Path(path).write_text(report_text(report), encoding="utf-8")
