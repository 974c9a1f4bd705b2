"""Closed semi-algebraic set descriptors and the built-in catalog.

Three representations are supported:

* :class:`LinearSubspace` -- a linear subspace given by an orthonormal frame;
* :class:`ConicGraph`  -- the cone over a :class:`SphericalGraph`;
* :class:`SmoothSet`   -- a smooth submanifold given by a chart atlas, an
  optional implicit polynomial, and a declared Euler characteristic.

Set-definition files use a small JSON schema mirroring these variants; see
``load_set_file``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..errors import SetValidationError
from .charts import Chart, build_chart
from .graphs import SphericalGraph, builtin_graphs, validate_graph
from .polynomial import Poly

TANGENT_GRAM_TOL = 1e-12
IMPLICIT_RESIDUAL_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-6
_SPOT_CHECK_POINTS = 64


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    ambient_dim: int
    frame: np.ndarray  # (k, n) orthonormal rows

    def __post_init__(self):
        object.__setattr__(self, "frame", np.atleast_2d(np.asarray(self.frame, dtype=float)))

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def compact(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class ConicGraph:
    ambient_dim: int
    graph: SphericalGraph

    @property
    def dim(self) -> int:
        return 2 if self.graph.n_edges else (1 if self.graph.n_vertices else 0)

    @property
    def compact(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class SmoothSet:
    ambient_dim: int
    dim: int
    charts: Tuple[Chart, ...]
    implicit: Optional[Poly] = None
    declared_chi: Optional[int] = None
    compact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "charts", tuple(self.charts))


SetDescriptor = Union[LinearSubspace, ConicGraph, SmoothSet]


def kind_of(x: SetDescriptor) -> str:
    if isinstance(x, LinearSubspace):
        return "linear"
    if isinstance(x, ConicGraph):
        return "conic_graph"
    if isinstance(x, SmoothSet):
        return "smooth"
    raise TypeError(f"not a set descriptor: {x!r}")


def coefficient_scale(x: SetDescriptor) -> float:
    """Size scale of the defining data; seeds the link-radius policy."""
    scale = 1.0
    if isinstance(x, SmoothSet):
        if x.implicit is not None and x.implicit.terms:
            scale = max(scale, max(abs(c) for c in x.implicit.terms.values()))
        for chart in x.charts:
            for value in chart.params.values():
                arr = np.asarray(value, dtype=float)
                if arr.size:
                    scale = max(scale, float(np.max(np.abs(arr))))
    return scale


# ------------------------------------------------------------------ validation

def validate_set(x: SetDescriptor) -> None:
    if isinstance(x, LinearSubspace):
        frame = x.frame
        if frame.shape[1] != x.ambient_dim:
            raise SetValidationError("frame", "vector length differs from ambient_dim")
        gram = frame @ frame.T
        if np.max(np.abs(gram - np.eye(frame.shape[0]))) > 1e-10:
            raise SetValidationError("frame", "rows are not orthonormal")
        return
    if isinstance(x, ConicGraph):
        if x.graph.ambient_dim != x.ambient_dim:
            raise SetValidationError("vertices", "vertex length differs from ambient_dim")
        validate_graph(x.graph)
        return
    if isinstance(x, SmoothSet):
        _validate_smooth(x)
        return
    raise TypeError(f"not a set descriptor: {x!r}")


def _validate_smooth(x: SmoothSet) -> None:
    if not 1 <= x.dim <= x.ambient_dim - 1:
        raise SetValidationError("dim", f"need 1 <= d <= n-1, got d={x.dim}, n={x.ambient_dim}")
    if not x.charts:
        raise SetValidationError("charts", "smooth set needs at least one chart")
    if x.implicit is not None and x.implicit.nvars != x.ambient_dim:
        raise SetValidationError("polynomial", "variable count differs from ambient_dim")
    if x.implicit is not None and x.dim != x.ambient_dim - 1:
        raise SetValidationError("polynomial", "implicit form requires codimension one")
    rng = np.random.Generator(np.random.Philox(key=np.array([17, 23], dtype=np.uint64)))
    deg = x.implicit.degree() if x.implicit is not None else 0
    for ci, chart in enumerate(x.charts):
        if chart.dim != x.dim:
            raise SetValidationError("charts.domain", f"chart {ci} parameter dim != set dim")
        if chart.ambient_dim != x.ambient_dim:
            raise SetValidationError("charts.map", f"chart {ci} ambient dim mismatch")
        box = chart.domain_for_ball(8.0 * coefficient_scale(x), np.zeros(x.ambient_dim))
        if box is None:
            continue
        u = rng.uniform(box[:, 0], box[:, 1], size=(_SPOT_CHECK_POINTS, chart.dim))
        pts = chart.map_fn(u)
        jac = chart.jac_fn(u)
        gram = np.einsum("bia,bic->bac", jac, jac)
        dets = np.linalg.det(gram)
        if np.min(dets) <= TANGENT_GRAM_TOL:
            raise SetValidationError("charts.map", f"chart {ci} tangent frame degenerates")
        if x.implicit is not None:
            vals = np.abs(x.implicit.eval(pts))
            bound = IMPLICIT_RESIDUAL_TOL * (1.0 + np.linalg.norm(pts, axis=1) ** deg)
            if np.any(vals > bound):
                raise SetValidationError("polynomial", f"chart {ci} points violate the implicit form")
            grads = np.linalg.norm(x.implicit.grad_eval(pts), axis=1)
            if np.min(grads) < 1e-10:
                raise SetValidationError("polynomial", "implicit gradient vanishes on the set")
        total = np.zeros(pts.shape[0])
        for other in x.charts:
            total += other.weights(pts)
        if np.max(np.abs(total - 1.0)) > WEIGHT_SUM_TOL:
            raise SetValidationError("charts", "partition-of-unity weights do not sum to 1")


# -------------------------------------------------------------------- builtins

def _implicit(nvars, terms):
    return Poly(nvars, terms)


def _torus_implicit(R0: float, r0: float) -> Poly:
    q = Poly(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0,
                 (0, 0, 0): R0 * R0 - r0 * r0})
    planar = Poly(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0})
    return q * q - (4.0 * R0 * R0) * planar


def builtin_sets() -> Dict[str, SetDescriptor]:
    graphs = builtin_graphs()
    sets: Dict[str, SetDescriptor] = {}

    sets["line_r2"] = LinearSubspace(2, np.array([[1.0, 0.0]]))
    sets["line_r3"] = LinearSubspace(3, np.array([[1.0, 0.0, 0.0]]))
    sets["cross_r2"] = ConicGraph(2, graphs["cross_s1"])
    sets["plane_cone_r3"] = ConicGraph(3, graphs["circle_s2"])
    sets["star3_cone_r3"] = ConicGraph(3, graphs["star3_s2"])

    sets["sphere_s2"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("sphere", params={"radius": 1.0}),),
        implicit=_implicit(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0, (0, 0, 0): -1.0}),
        declared_chi=2, compact=True,
    )
    sets["torus_r3"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("torus", params={"major_radius": 2.0, "minor_radius": 0.5}),),
        implicit=_torus_implicit(2.0, 0.5),
        declared_chi=0, compact=True,
    )
    sets["cylinder_r3"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("cylinder", params={"radius": 1.0}),),
        implicit=_implicit(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 0): -1.0}),
        declared_chi=0, compact=False,
    )
    sets["plane_r2_in_r3"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("plane"),),
        implicit=_implicit(3, {(0, 0, 1): 1.0}),
        declared_chi=1, compact=False,
    )
    sets["paraboloid_r3"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("paraboloid", params={"coefficient": 1.0}),),
        implicit=_implicit(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 1): -1.0}),
        declared_chi=1, compact=False,
    )
    sets["hyperboloid_r3"] = SmoothSet(
        ambient_dim=3, dim=2,
        charts=(build_chart("hyperboloid_one_sheet"),),
        implicit=_implicit(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0, (0, 0, 0): -1.0}),
        declared_chi=0, compact=False,
    )
    sets["twisted_cubic_r3"] = SmoothSet(
        ambient_dim=3, dim=1,
        charts=(build_chart("poly_curve", params={
            "coefficients": [[0.0, 1.0, 0.0, 0.0],
                             [0.0, 0.0, 1.0, 0.0],
                             [0.0, 0.0, 0.0, 1.0]]}),),
        implicit=None,
        declared_chi=1, compact=False,
    )
    return sets


def describe(x: SetDescriptor) -> Dict[str, object]:
    from .links import euler_char  # local import to avoid a cycle

    try:
        chi = euler_char(x)
    except Exception:
        chi = None
    return {
        "kind": kind_of(x),
        "ambient_dim": x.ambient_dim,
        "dim": x.dim,
        "chi": chi,
        "compact": x.compact,
    }


# ------------------------------------------------------------------------- io

def set_from_dict(doc: Dict) -> SetDescriptor:
    try:
        n = int(doc["ambient_dim"])
        kind = doc["kind"]
    except KeyError as exc:
        raise SetValidationError(str(exc.args[0]), "missing required field") from exc
    if kind == "linear":
        if "frame" not in doc:
            raise SetValidationError("frame", "missing for kind=linear")
        x: SetDescriptor = LinearSubspace(n, np.asarray(doc["frame"], dtype=float))
    elif kind == "conic_graph":
        for key in ("vertices",):
            if key not in doc:
                raise SetValidationError(key, "missing for kind=conic_graph")
        graph = SphericalGraph(
            vertices=np.asarray(doc["vertices"], dtype=float),
            edges=tuple((int(i), int(j)) for i, j in doc.get("edges", [])),
        )
        x = ConicGraph(n, graph)
    elif kind == "smooth":
        charts = []
        for ci, spec in enumerate(doc.get("charts", [])):
            name = spec.get("map")
            if name is None:
                raise SetValidationError("charts.map", f"chart {ci} missing map name")
            charts.append(build_chart(name, spec.get("domain"), spec.get("params", {})))
        if not charts:
            raise SetValidationError("charts", "missing for kind=smooth")
        implicit = None
        if doc.get("polynomial"):
            implicit = Poly.from_json_terms(n, doc["polynomial"])
        dim = int(doc.get("dim", charts[0].dim))
        x = SmoothSet(
            ambient_dim=n, dim=dim, charts=tuple(charts), implicit=implicit,
            declared_chi=doc.get("declared_chi"), compact=bool(doc.get("compact", False)),
        )
    else:
        raise SetValidationError("kind", f"unknown kind {kind!r}")
    validate_set(x)
    return x


def set_to_dict(name: str, x: SetDescriptor) -> Dict:
    doc: Dict = {"name": name, "ambient_dim": x.ambient_dim, "kind": kind_of(x)}
    if isinstance(x, LinearSubspace):
        doc["frame"] = x.frame.tolist()
    elif isinstance(x, ConicGraph):
        doc["vertices"] = x.graph.vertices.tolist()
        doc["edges"] = [list(e) for e in x.graph.edges]
    elif isinstance(x, SmoothSet):
        doc["dim"] = x.dim
        doc["charts"] = [
            {
                "domain": None if c.base_domain is None else np.asarray(c.base_domain).tolist(),
                "map": c.label,
                "params": _jsonable_params(c.params),
            }
            for c in x.charts
        ]
        doc["polynomial"] = x.implicit.to_json_terms() if x.implicit is not None else None
        doc["declared_chi"] = x.declared_chi
        doc["compact"] = x.compact
    return doc


def _jsonable_params(params: Dict) -> Dict:
    out = {}
    for key, value in params.items():
        arr = np.asarray(value)
        out[key] = arr.tolist() if arr.ndim else value
    return out


def load_set_file(path: str) -> Tuple[str, SetDescriptor]:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    name = doc.get("name", path)
    return name, set_from_dict(doc)


def resolve_set(ref: str) -> Tuple[str, SetDescriptor]:
    """Resolve a builtin name or a set-definition file path."""
    table = builtin_sets()
    if ref in table:
        return ref, table[ref]
    return load_set_file(ref)
