"""TSPLIB instance model: parsing and exact integer edge costs.

Supports the symmetric-TSP subset of the TSPLIB format: coordinate-based
EUC_2D, CEIL_2D, GEO and ATT instances plus EXPLICIT matrices in
FULL_MATRIX, UPPER_ROW, LOWER_DIAG_ROW and UPPER_DIAG_ROW layout.
All costs are 64-bit integers after the standard TSPLIB rounding rules so
that gain arithmetic downstream stays exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    MalformedHeader,
    NonPositiveCost,
    NonSymmetricMatrix,
    NotAPermutation,
    SelfLoop,
    UnsupportedWeightType,
)

GEO_PI = 3.141592
GEO_RADIUS = 6378.388

_EXPLICIT_FORMATS = ("FULL_MATRIX", "UPPER_ROW", "LOWER_DIAG_ROW", "UPPER_DIAG_ROW")


class WeightKind(Enum):
    EUC_2D = "EUC_2D"
    CEIL_2D = "CEIL_2D"
    GEO = "GEO"
    ATT = "ATT"
    EXPLICIT = "EXPLICIT"


def _nint(x: float) -> int:
    return int(math.floor(x + 0.5))


def _geo_radians(value: float) -> float:
    # TSPLIB DDD.MM convention: integer part degrees, fraction minutes.
    deg = int(value)
    minutes = value - deg
    return GEO_PI * (deg + 5.0 * minutes / 3.0) / 180.0


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable symmetric TSP instance with an exact integer cost oracle."""

    name: str
    dimension: int
    weight_kind: WeightKind
    coords: np.ndarray | None = None
    matrix: np.ndarray | None = None
    known_optimum: int | None = None

    def __post_init__(self) -> None:
        n = self.dimension
        if n < 3:
            raise DimensionMismatch(f"dimension must be >= 3, got {n}")
        if self.weight_kind is WeightKind.EXPLICIT:
            if self.matrix is None or self.coords is not None:
                raise MalformedHeader("EXPLICIT instance requires a matrix and no coords")
            if self.matrix.shape != (n, n):
                raise DimensionMismatch(
                    f"matrix shape {self.matrix.shape} does not match dimension {n}"
                )
        else:
            if self.coords is None or self.matrix is not None:
                raise MalformedHeader(
                    f"{self.weight_kind.value} instance requires coords and no matrix"
                )
            if self.coords.shape != (n, 2):
                raise DimensionMismatch(
                    f"coords shape {self.coords.shape} does not match dimension {n}"
                )
        object.__setattr__(self, "_cost", _make_cost_function(self))

    def cost(self, i: int, j: int) -> int:
        """Exact integer cost of edge (i, j); vertices are 1-based."""
        n = self.dimension
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRange(f"vertex out of range 1..{n}: ({i}, {j})")
        if i == j:
            raise SelfLoop(f"self-loop cost requested at vertex {i}")
        return self._cost(i, j)  # type: ignore[attr-defined]


def _make_cost_function(inst: Instance) -> Callable[[int, int], int]:
    """Build a per-kind scalar cost closure (inputs pre-validated)."""
    kind = inst.weight_kind
    if kind is WeightKind.EXPLICIT:
        rows = inst.matrix.tolist()

        def explicit(i: int, j: int) -> int:
            return rows[i - 1][j - 1]

        return explicit

    xs = inst.coords[:, 0].tolist()
    ys = inst.coords[:, 1].tolist()
    if kind is WeightKind.EUC_2D:

        def euc(i: int, j: int) -> int:
            dx = xs[i - 1] - xs[j - 1]
            dy = ys[i - 1] - ys[j - 1]
            return int(math.sqrt(dx * dx + dy * dy) + 0.5)

        return euc
    if kind is WeightKind.CEIL_2D:

        def ceil2d(i: int, j: int) -> int:
            dx = xs[i - 1] - xs[j - 1]
            dy = ys[i - 1] - ys[j - 1]
            return int(math.ceil(math.sqrt(dx * dx + dy * dy)))

        return ceil2d
    if kind is WeightKind.ATT:

        def att(i: int, j: int) -> int:
            dx = xs[i - 1] - xs[j - 1]
            dy = ys[i - 1] - ys[j - 1]
            rij = math.sqrt((dx * dx + dy * dy) / 10.0)
            tij = _nint(rij)
            return tij + 1 if tij < rij else tij

        return att
    # GEO: degree-minute coordinates on a sphere.
    lat = [_geo_radians(x) for x in xs]
    lon = [_geo_radians(y) for y in ys]

    def geo(i: int, j: int) -> int:
        q1 = math.cos(lon[i - 1] - lon[j - 1])
        q2 = math.cos(lat[i - 1] - lat[j - 1])
        q3 = math.cos(lat[i - 1] + lat[j - 1])
        arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
        arg = max(-1.0, min(1.0, arg))
        return int(GEO_RADIUS * math.acos(arg) + 1.0)

    return geo


def edge_cost(inst: Instance, i: int, j: int) -> int:
    """Exact integer cost of edge (i, j) per the instance's weight kind."""
    return inst.cost(i, j)


def cost_row(inst: Instance, i: int) -> np.ndarray:
    """All costs from vertex i as an int64 vector (entry i-1 forced to 0).

    EUC/CEIL/ATT rows are vectorised; GEO rows fall back to the scalar
    formula because acos is not guaranteed bit-identical between libm and
    numpy and the rounding step must agree with :func:`edge_cost`.
    """
    n = inst.dimension
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"vertex out of range 1..{n}: {i}")
    kind = inst.weight_kind
    if kind is WeightKind.EXPLICIT:
        return inst.matrix[i - 1].copy()
    if kind is WeightKind.GEO:
        cost = inst._cost  # type: ignore[attr-defined]
        row = np.fromiter(
            (cost(i, j) if j != i else 0 for j in range(1, n + 1)),
            dtype=np.int64,
            count=n,
        )
        return row
    dx = inst.coords[:, 0] - inst.coords[i - 1, 0]
    dy = inst.coords[:, 1] - inst.coords[i - 1, 1]
    if kind is WeightKind.EUC_2D:
        row = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
    elif kind is WeightKind.CEIL_2D:
        row = np.ceil(np.sqrt(dx * dx + dy * dy)).astype(np.int64)
    else:  # ATT
        rij = np.sqrt((dx * dx + dy * dy) / 10.0)
        tij = np.floor(rij + 0.5)
        row = (tij + (tij < rij)).astype(np.int64)
    row[i - 1] = 0
    return row


def tour_cost(inst: Instance, order: Sequence[int]) -> int:
    """Cost of the closed tour visiting `order`, a permutation of 1..n."""
    n = inst.dimension
    _check_permutation(order, n)
    idx = np.asarray(order, dtype=np.int64) - 1
    nxt = np.roll(idx, -1)
    kind = inst.weight_kind
    if kind is WeightKind.EXPLICIT:
        return int(inst.matrix[idx, nxt].sum())
    if kind is WeightKind.GEO:
        cost = inst._cost  # type: ignore[attr-defined]
        return sum(cost(int(a) + 1, int(b) + 1) for a, b in zip(idx, nxt))
    dx = inst.coords[idx, 0] - inst.coords[nxt, 0]
    dy = inst.coords[idx, 1] - inst.coords[nxt, 1]
    if kind is WeightKind.EUC_2D:
        return int(np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64).sum())
    if kind is WeightKind.CEIL_2D:
        return int(np.ceil(np.sqrt(dx * dx + dy * dy)).astype(np.int64).sum())
    rij = np.sqrt((dx * dx + dy * dy) / 10.0)
    tij = np.floor(rij + 0.5)
    return int((tij + (tij < rij)).astype(np.int64).sum())


def _check_permutation(order: Sequence[int], n: int) -> None:
    if len(order) != n:
        raise NotAPermutation(f"sequence length {len(order)} != dimension {n}")
    seen = bytearray(n + 1)
    for v in order:
        if not 1 <= v <= n or seen[v]:
            raise NotAPermutation(f"sequence is not a permutation of 1..{n}")
        seen[v] = 1


# ---------------------------------------------------------------------------
# Parsing


def parse_tsplib(text: str) -> Instance:
    """Parse a TSPLIB TSP file into a validated :class:`Instance`.

    Triangular explicit matrices are symmetrised into full form; a full
    matrix must already be symmetric. Coordinate instances with duplicate
    points (which round to zero-cost edges) are accepted with a warning,
    explicit matrices must have strictly positive off-diagonal costs.
    """
    headers: dict[str, str] = {}
    lines = text.splitlines()
    pos = 0
    coords: np.ndarray | None = None
    weights: list[int] | None = None

    def read_header_line(line: str) -> None:
        key, _, value = line.partition(":")
        headers[key.strip().upper()] = value.strip()

    n_declared: int | None = None
    while pos < len(lines):
        line = lines[pos].strip()
        pos += 1
        if not line or line == "EOF":
            continue
        upper = line.split(":")[0].strip().upper()
        if upper == "NODE_COORD_SECTION":
            n_declared = _require_dimension(headers)
            coords, pos = _read_coords(lines, pos, n_declared)
        elif upper == "EDGE_WEIGHT_SECTION":
            n_declared = _require_dimension(headers)
            fmt = headers.get("EDGE_WEIGHT_FORMAT", "")
            weights, pos = _read_weights(lines, pos, n_declared, fmt)
        elif upper in ("DISPLAY_DATA_SECTION", "FIXED_EDGES_SECTION"):
            pos = _skip_section(lines, pos)
        elif ":" in line:
            read_header_line(line)
        else:
            raise MalformedHeader(f"unrecognised line: {line!r}")

    if "NAME" not in headers:
        raise MalformedHeader("missing NAME")
    problem_type = headers.get("TYPE", "TSP").split()[0].upper() if headers.get("TYPE") else "TSP"
    if problem_type != "TSP":
        raise MalformedHeader(f"unsupported problem TYPE: {problem_type}")
    n = _require_dimension(headers)
    kind_name = headers.get("EDGE_WEIGHT_TYPE")
    if kind_name is None:
        raise MalformedHeader("missing EDGE_WEIGHT_TYPE")
    try:
        kind = WeightKind(kind_name.upper())
    except ValueError:
        raise UnsupportedWeightType(f"EDGE_WEIGHT_TYPE {kind_name} not supported") from None

    if kind is WeightKind.EXPLICIT:
        fmt = headers.get("EDGE_WEIGHT_FORMAT", "").upper()
        if fmt not in _EXPLICIT_FORMATS:
            raise UnsupportedWeightType(f"EDGE_WEIGHT_FORMAT {fmt or '(missing)'} not supported")
        if weights is None:
            raise MalformedHeader("EXPLICIT instance without EDGE_WEIGHT_SECTION")
        matrix = _assemble_matrix(weights, n, fmt)
        _validate_explicit(matrix, n)
        inst = Instance(headers["NAME"], n, kind, matrix=matrix)
    else:
        if coords is None:
            raise MalformedHeader(f"{kind.value} instance without NODE_COORD_SECTION")
        inst = Instance(headers["NAME"], n, kind, coords=coords)
        if len(np.unique(np.round(coords, 9), axis=0)) < n:
            warnings.warn(
                f"{headers['NAME']}: duplicate coordinates produce zero-cost edges",
                stacklevel=2,
            )
    return inst


def _require_dimension(headers: dict[str, str]) -> int:
    raw = headers.get("DIMENSION")
    if raw is None:
        raise MalformedHeader("missing DIMENSION")
    try:
        n = int(raw)
    except ValueError:
        raise MalformedHeader(f"DIMENSION not an integer: {raw!r}") from None
    if n < 3:
        raise DimensionMismatch(f"dimension must be >= 3, got {n}")
    return n


def _read_coords(lines: list[str], pos: int, n: int) -> tuple[np.ndarray, int]:
    coords = np.empty((n, 2), dtype=np.float64)
    seen = bytearray(n + 1)
    for _ in range(n):
        if pos >= len(lines):
            raise DimensionMismatch("NODE_COORD_SECTION ended early")
        parts = lines[pos].split()
        pos += 1
        if len(parts) < 3:
            raise DimensionMismatch(f"bad coordinate line: {lines[pos - 1]!r}")
        idx = int(parts[0])
        if not 1 <= idx <= n or seen[idx]:
            raise DimensionMismatch(f"bad or repeated node index {idx}")
        seen[idx] = 1
        coords[idx - 1, 0] = float(parts[1])
        coords[idx - 1, 1] = float(parts[2])
    return coords, pos


def _weight_count(n: int, fmt: str) -> int:
    if fmt == "FULL_MATRIX":
        return n * n
    if fmt == "UPPER_ROW":
        return n * (n - 1) // 2
    return n * (n + 1) // 2  # both *_DIAG_ROW layouts


def _read_weights(lines: list[str], pos: int, n: int, fmt: str) -> tuple[list[int], int]:
    fmt = fmt.upper()
    if fmt not in _EXPLICIT_FORMATS:
        raise UnsupportedWeightType(f"EDGE_WEIGHT_FORMAT {fmt or '(missing)'} not supported")
    need = _weight_count(n, fmt)
    values: list[int] = []
    while len(values) < need and pos < len(lines):
        line = lines[pos].strip()
        if not line or not (line[0].isdigit() or line[0] in "+-."):
            break
        pos += 1
        for tok in line.split():
            values.append(int(round(float(tok))))
    if len(values) != need:
        raise DimensionMismatch(
            f"EDGE_WEIGHT_SECTION has {len(values)} entries, expected {need}"
        )
    return values, pos


def _skip_section(lines: list[str], pos: int) -> int:
    while pos < len(lines):
        line = lines[pos].strip()
        if not line or not (line[0].isdigit() or line[0] in "+-."):
            break
        pos += 1
    return pos


def _assemble_matrix(values: list[int], n: int, fmt: str) -> np.ndarray:
    mat = np.zeros((n, n), dtype=np.int64)
    it = iter(values)
    if fmt == "FULL_MATRIX":
        mat = np.array(values, dtype=np.int64).reshape(n, n)
        if not np.array_equal(mat, mat.T):
            raise NonSymmetricMatrix("FULL_MATRIX is not symmetric")
        np.fill_diagonal(mat, 0)
        return mat
    if fmt == "UPPER_ROW":
        for i in range(n):
            for j in range(i + 1, n):
                mat[i, j] = next(it)
    elif fmt == "UPPER_DIAG_ROW":
        for i in range(n):
            for j in range(i, n):
                mat[i, j] = next(it)
    else:  # LOWER_DIAG_ROW
        for i in range(n):
            for j in range(i + 1):
                mat[j, i] = next(it)
    mat = mat + mat.T  # diagonal entries of *_DIAG_ROW are discarded below
    np.fill_diagonal(mat, 0)
    return mat


def _validate_explicit(matrix: np.ndarray, n: int) -> None:
    off_diag = matrix[~np.eye(n, dtype=bool)]
    if (off_diag <= 0).any():
        raise NonPositiveCost("explicit matrix has non-positive off-diagonal costs")


def format_tsplib(inst: Instance) -> str:
    """Render an instance back to TSPLIB text (round-trips through the parser)."""
    out = [
        f"NAME: {inst.name}",
        "TYPE: TSP",
        f"DIMENSION: {inst.dimension}",
        f"EDGE_WEIGHT_TYPE: {inst.weight_kind.value}",
    ]
    if inst.weight_kind is WeightKind.EXPLICIT:
        out.append("EDGE_WEIGHT_FORMAT: FULL_MATRIX")
        out.append("EDGE_WEIGHT_SECTION")
        for row in inst.matrix:
            out.append(" ".join(str(int(v)) for v in row))
    else:
        out.append("NODE_COORD_SECTION")
        for idx, (x, y) in enumerate(inst.coords, start=1):
            out.append(f"{idx} {x:.10g} {y:.10g}")
    out.append("EOF")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Optima registry


def read_optima(text: str) -> dict[str, int]:
    """Parse a "name cost" registry, one entry per line, '#' comments."""
    registry: dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedHeader(f"bad registry line: {raw!r}")
        try:
            name, cost = parts[0], int(parts[1])
        except ValueError:
            raise MalformedHeader(f"bad registry line: {raw!r}") from None
        if cost <= 0:
            raise MalformedHeader(f"registry optimum must be positive: {raw!r}")
        registry[name] = cost
    return registry
