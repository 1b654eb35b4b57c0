"""Metric spaces, links, instances, generation and the JSON instance codec.

Point handles are plain integer indices into the metric's point set.  A link
is a (sender, receiver) pair of handles; link ids are dense ``0..n-1`` and
link ``i`` is ``instance.links[i]``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import ClassVar, Iterable, Sequence, Union

import numpy as np

from .errors import ConfigError, InstanceParseError, MetricValidationError

TRIANGLE_TOL = 1e-9


def _check_handle(x: int, size: int) -> None:
    if not (0 <= x < size):
        raise IndexError(f"point handle {x} out of range for {size} points")


@dataclass(frozen=True)
class Euclidean2D:
    points: tuple[tuple[float, float], ...]
    kind: ClassVar[str] = "euclidean2d"

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if not all(math.isfinite(c) for pt in pts for c in pt):
            raise MetricValidationError("point coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return len(self.points)

    def distance(self, x: int, y: int) -> float:
        _check_handle(x, self.size)
        _check_handle(y, self.size)
        (x0, y0), (x1, y1) = self.points[x], self.points[y]
        return float(np.hypot(x0 - x1, y0 - y1))

    def pairwise(self, xs: Sequence[int], ys: Sequence[int]) -> np.ndarray:
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        a, b = pts[list(xs)], pts[list(ys)]
        diff = a[:, None, :] - b[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class MatrixMetric:
    """Explicit distance table; validated as a metric on construction."""

    d: tuple[tuple[float, ...], ...]
    kind: ClassVar[str] = "matrix"

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.d)
        object.__setattr__(self, "d", rows)
        k = len(rows)
        m = np.asarray(rows, dtype=float).reshape(k, -1) if k else np.zeros((0, 0))
        if m.shape != (k, k):
            raise MetricValidationError(f"distance matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise MetricValidationError("distance matrix has non-finite entries")
        if np.any(m < 0):
            raise MetricValidationError("distance matrix has negative entries")
        if np.any(np.diag(m) != 0):
            raise MetricValidationError("distance matrix diagonal must be zero")
        if not np.array_equal(m, m.T):
            i, j = np.argwhere(m != m.T)[0]
            raise MetricValidationError(f"distance matrix not symmetric at ({i},{j})")
        # d(i,j) <= d(i,k) + d(k,j) for all triples
        via = m[:, :, None] + m[None, :, :]  # via[i,k,j] = d(i,k)+d(k,j)
        slack = m[:, None, :] - via
        if k and slack.max() > TRIANGLE_TOL:
            i, kk, j = np.unravel_index(np.argmax(slack), slack.shape)
            raise MetricValidationError(
                f"triangle inequality violated: d({i},{j}) > d({i},{kk}) + d({kk},{j})"
            )

    @property
    def size(self) -> int:
        return len(self.d)

    def distance(self, x: int, y: int) -> float:
        _check_handle(x, self.size)
        _check_handle(y, self.size)
        return self.d[x][y]

    def pairwise(self, xs: Sequence[int], ys: Sequence[int]) -> np.ndarray:
        m = np.asarray(self.d, dtype=float)
        return m[np.ix_(list(xs), list(ys))]


MetricSpace = Union[Euclidean2D, MatrixMetric]


def distance(m: MetricSpace, x: int, y: int) -> float:
    return m.distance(x, y)


@dataclass(frozen=True)
class Link:
    id: int
    sender: int
    receiver: int


@dataclass(frozen=True)
class SinrParams:
    alpha: float = 3.0
    beta: float = 2.0
    noise: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "noise"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite real, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.alpha <= 0:
            raise ConfigError("alpha must be > 0")
        if self.beta <= 0:
            raise ConfigError("beta must be > 0")
        if self.noise < 0:
            raise ConfigError("noise must be >= 0")


@dataclass(frozen=True)
class Instance:
    metric: MetricSpace
    links: tuple[Link, ...]
    params: SinrParams = field(default_factory=SinrParams)

    def __post_init__(self):
        links = tuple(self.links)
        object.__setattr__(self, "links", links)
        for i, link in enumerate(links):
            if link.id != i:
                raise ConfigError(f"link ids must be dense 0..n-1; position {i} has id {link.id}")
            _check_handle(link.sender, self.metric.size)
            _check_handle(link.receiver, self.metric.size)
            if self.metric.distance(link.sender, link.receiver) <= 0:
                raise ConfigError(f"link {i} has coincident sender and receiver")

    @classmethod
    def euclidean(
        cls,
        coords: Iterable[Sequence[float]],
        params: SinrParams | None = None,
    ) -> "Instance":
        """Build from ``(sx, sy, rx, ry)`` rows; link i uses points 2i and 2i+1."""
        pts: list[tuple[float, float]] = []
        links = []
        for i, (sx, sy, rx, ry) in enumerate(coords):
            pts += [(sx, sy), (rx, ry)]
            links.append(Link(i, 2 * i, 2 * i + 1))
        return cls(Euclidean2D(tuple(pts)), tuple(links), params or SinrParams())

    @property
    def n(self) -> int:
        return len(self.links)

    @cached_property
    def lengths(self) -> np.ndarray:
        out = np.array(
            [self.metric.distance(l.sender, l.receiver) for l in self.links], dtype=float
        )
        out.flags.writeable = False
        return out

    @cached_property
    def cross(self) -> np.ndarray:
        """``cross[w, v] = d(s_w, r_v)``; the diagonal holds the link lengths."""
        out = self.metric.pairwise(
            [l.sender for l in self.links], [l.receiver for l in self.links]
        )
        np.fill_diagonal(out, self.lengths)
        out.flags.writeable = False
        return out

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Link ids ascending in the total order (length, id)."""
        lengths = self.lengths
        return tuple(sorted(range(self.n), key=lambda i: (lengths[i], i)))

    @cached_property
    def rank(self) -> np.ndarray:
        out = np.empty(self.n, dtype=int)
        out[list(self.order)] = np.arange(self.n)
        out.flags.writeable = False
        return out

    def shorter(self, v: int, w: int) -> bool:
        """True iff link v precedes link w in the (length, id) order."""
        return bool(self.rank[v] < self.rank[w])

    def sender_distance(self, v: int, w: int) -> float:
        """d(s_v, s_w)."""
        return self.metric.distance(self.links[v].sender, self.links[w].sender)


def _ids(inst: Instance, links: Iterable[int] | None) -> list[int]:
    return list(range(inst.n)) if links is None else sorted(set(links))


def delta(inst: Instance, links: Iterable[int] | None = None) -> float:
    ids = _ids(inst, links)
    if not ids:
        raise ValueError("delta of an empty link set is undefined")
    lens = inst.lengths[ids]
    return float(lens.max() / lens.min())


def length_classes(inst: Instance, links: Iterable[int] | None = None) -> list[list[int]]:
    """Partition into classes [l_min 2^i, l_min 2^(i+1)), empty classes dropped."""
    ids = _ids(inst, links)
    if not ids:
        raise ValueError("length classes of an empty link set are undefined")
    lmin = float(inst.lengths[ids].min())
    buckets: dict[int, list[int]] = {}
    for v in ids:
        ratio = float(inst.lengths[v]) / lmin
        i = max(int(math.floor(math.log2(ratio))), 0)
        # log2 rounding can land one class off near powers of two
        while i > 0 and lmin * 2.0**i > inst.lengths[v]:
            i -= 1
        while lmin * 2.0 ** (i + 1) <= inst.lengths[v]:
            i += 1
        buckets.setdefault(i, []).append(v)
    return [buckets[i] for i in sorted(buckets)]


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    world_size: float = 10.0
    target_delta: float = 4.0
    length_min: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n!r}")
        if not (math.isfinite(self.world_size) and self.world_size > 0):
            raise ConfigError("world_size must be > 0")
        if not (math.isfinite(self.target_delta) and self.target_delta >= 1):
            raise ConfigError("target_delta must be >= 1")
        if not (math.isfinite(self.length_min) and self.length_min > 0):
            raise ConfigError("length_min must be > 0")


def generate(config: GeneratorConfig, params: SinrParams | None = None) -> Instance:
    """Random instance: uniform senders, log-uniform lengths, uniform receiver angle.

    The length exponent is shrunk by a 1e-9 relative margin so that rounding in
    the receiver placement cannot push the realized Delta above target_delta.
    At target_delta = 1 the lengths agree only up to a few ulps.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n
    senders = rng.uniform(0.0, config.world_size, size=(n, 2))
    u = rng.uniform(0.0, 1.0, size=n) * (1.0 - 1e-9)
    lengths = config.length_min * config.target_delta ** u
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    receivers = senders + lengths[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    rows = np.hstack([senders, receivers])
    return Instance.euclidean(rows.tolist(), params)


# --- codec -----------------------------------------------------------------

def to_dict(inst: Instance) -> dict:
    p = inst.params
    doc: dict = {"params": {"alpha": p.alpha, "beta": p.beta, "noise": p.noise}}
    m = inst.metric
    if isinstance(m, Euclidean2D):
        doc["metric"] = {"kind": "euclidean2d"}
        doc["links"] = [
            {
                "id": l.id,
                "sx": m.points[l.sender][0],
                "sy": m.points[l.sender][1],
                "rx": m.points[l.receiver][0],
                "ry": m.points[l.receiver][1],
            }
            for l in inst.links
        ]
    else:
        doc["metric"] = {"kind": "matrix", "points": m.size, "d": [list(r) for r in m.d]}
        doc["links"] = [{"id": l.id, "s": l.sender, "r": l.receiver} for l in inst.links]
    return doc


def dumps(inst: Instance) -> str:
    return json.dumps(to_dict(inst), indent=1, allow_nan=False) + "\n"


def _field(obj: dict, key: str, where: str, kind=float):
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceParseError("missing field", f"{where}.{key}")
    val = obj[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise InstanceParseError("expected a number", f"{where}.{key}")
        return float(val)
    if isinstance(val, bool) or not isinstance(val, int):
        raise InstanceParseError("expected an integer", f"{where}.{key}")
    return val


def from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceParseError("top level must be an object", "$")
    pd = doc.get("params")
    try:
        params = SinrParams(
            _field(pd, "alpha", "params"), _field(pd, "beta", "params"), _field(pd, "noise", "params")
        )
    except ConfigError as e:
        raise InstanceParseError(str(e), "params") from e
    md = doc.get("metric")
    kind = md.get("kind") if isinstance(md, dict) else None
    raw_links = doc.get("links")
    if not isinstance(raw_links, list):
        raise InstanceParseError("missing or non-list field", "links")
    if kind == "euclidean2d":
        rows = {}
        for i, ld in enumerate(raw_links):
            where = f"links[{i}]"
            lid = _field(ld, "id", where, int)
            rows[lid] = tuple(_field(ld, k, where) for k in ("sx", "sy", "rx", "ry"))
        if sorted(rows) != list(range(len(raw_links))):
            raise InstanceParseError("link ids must be unique and dense 0..n-1", "links")
        try:
            return Instance.euclidean([rows[i] for i in range(len(rows))], params)
        except ConfigError as e:
            raise InstanceParseError(str(e), "links") from e
    if kind == "matrix":
        d = md.get("d")
        if not isinstance(d, list) or not all(isinstance(r, list) for r in d):
            raise InstanceParseError("expected a list of rows", "metric.d")
        npts = _field(md, "points", "metric", int)
        if len(d) != npts:
            raise InstanceParseError(f"expected {npts} rows, got {len(d)}", "metric.d")
        for i, row in enumerate(d):
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise InstanceParseError("expected a number", f"metric.d[{i}][{j}]")
        metric = MatrixMetric(tuple(tuple(r) for r in d))
        links = {}
        for i, ld in enumerate(raw_links):
            where = f"links[{i}]"
            lid = _field(ld, "id", where, int)
            links[lid] = Link(lid, _field(ld, "s", where, int), _field(ld, "r", where, int))
        if sorted(links) != list(range(len(raw_links))):
            raise InstanceParseError("link ids must be unique and dense 0..n-1", "links")
        try:
            return Instance(metric, tuple(links[i] for i in range(len(links))), params)
        except (ConfigError, IndexError) as e:
            raise InstanceParseError(str(e), "links") from e
    raise InstanceParseError(f"unknown metric kind {kind!r}", "metric.kind")


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(e.msg, f"line {e.lineno} column {e.colno}") from e
    return from_dict(doc)


def save(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst))


def load(path: str | Path) -> Instance:
    return loads(Path(path).read_text())


def digest(inst: Instance) -> str:
    canon = json.dumps(to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
