"""Support-function sweeps of the witness-expectation plane and their emission.

For a direction θ, every family reports max ⟨cos θ·X- + sin θ·X+⟩ over its
states together with the expectation pair (⟨X-⟩, ⟨X+⟩) of a maximizer, where
(X-, X+) is either (W-, W+) or the partially transposed pair (𝕎-, 𝕎+). The
support points traced over θ outline each region.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from entlab.config import SeesawConfig, derive_seed
from entlab.errors import EmptyResultError, UnsupportedCombinationError
from entlab.gm import (
    BiseparableState,
    ProductState,
    biseparable_optimum,
    fully_separable_optimum,
    invariant_biseparable_optimum,
)
from entlab.linalg import ComplexArray, Operator, StateVector
from entlab.sdp import (
    BoundaryFamily,
    BoundaryPoint,
    WitnessPair,
    find_ppt_gme,
    invariant_boundary,
    pptmix_boundary,
    pt_invariant_boundary,
    witness_pair,
)
from entlab.subspaces import antichiral_basis, basis_from_projector, chiral_basis, tripartite_projectors
from entlab.witnesses import spectral_coefficients

SUPPORTED_DIMS = (3, 4)
MIN_GRID = 16
DEFAULT_GRID = 360
# θ values per warm-started chunk; fixed so results do not depend on the thread count
CHUNK_SIZE = 8

CSV_HEADER = ("theta", "family", "value", "wx", "wy")


class Family(str, Enum):
    """State families of the witness plane."""

    FS = "fs"
    BS = "bs"
    PPT = "ppt"
    PPTMIX = "pptmix"
    QUANTUM = "quantum"
    PPTGME = "pptgme"


DEFAULT_FAMILIES = (Family.FS, Family.BS, Family.PPT, Family.PPTMIX, Family.QUANTUM)

# Drawing order (largest region first), colors and legend text
PALETTE: dict[Family, tuple[str, str]] = {
    Family.QUANTUM: ("#2ca02c", "quantum"),
    Family.PPTMIX: ("#6baed6", "PPT mixture"),
    Family.BS: ("#1f3b73", "biseparable"),
    Family.PPT: ("#ff9896", "PPT (all cuts)"),
    Family.FS: ("#d62728", "fully separable"),
    Family.PPTGME: ("#9467bd", "PPT GME"),
}

# Pointwise ordering of support values, smaller set first
NESTING = (
    (Family.FS, Family.BS),
    (Family.BS, Family.PPTMIX),
    (Family.PPTMIX, Family.QUANTUM),
    (Family.FS, Family.PPT),
    (Family.PPT, Family.QUANTUM),
)


@dataclass(frozen=True)
class SweepRow:
    """One support value; for pptgme rows value is the coefficient a."""

    theta: float
    family: str
    value: float
    point: tuple[float, float]


@dataclass
class SweepTable:
    """Rows ordered by θ index, then by requested family."""

    local_dim: int
    witness_pair: str
    rows: list[SweepRow] = field(default_factory=list)

    def family_rows(self, family: str | Family) -> list[SweepRow]:
        label = Family(family).value
        return [r for r in self.rows if r.family == label]

    def values_at(self, theta: float) -> dict[str, float]:
        return {r.family: r.value for r in self.rows if r.theta == theta}


@dataclass(frozen=True)
class Vertex:
    """Expected and measured corner of the W-pair quantum region."""

    label: str
    expected: tuple[float, float]
    measured: tuple[float, float]

    @property
    def deviation(self) -> float:
        return float(np.hypot(self.expected[0] - self.measured[0], self.expected[1] - self.measured[1]))


def _expectations(vector: ComplexArray, minus: Operator, plus: Operator) -> tuple[float, float]:
    return (
        float(np.vdot(vector, minus.entries @ vector).real),
        float(np.vdot(vector, plus.entries @ vector).real),
    )


@dataclass(frozen=True)
class _Context:
    d: int
    pair: WitnessPair
    families: tuple[Family, ...]
    grid_size: int
    cfg: SeesawConfig
    tol: float
    minus: Operator
    plus: Operator


def _theta(index: int, grid_size: int) -> float:
    return 2 * np.pi * index / grid_size


def _sdp_row(point: BoundaryPoint, family: Family) -> SweepRow:
    return SweepRow(point.theta, family.value, point.value, point.point)


def _evaluate_chunk(ctx: _Context, indices: list[int]) -> list[SweepRow]:
    """Evaluate a contiguous run of θ values, warm-starting see-saws from the previous θ."""
    rows: list[SweepRow] = []
    warm_product: list[ComplexArray] | None = None
    warm_cut: BiseparableState | None = None
    boundary = invariant_boundary if ctx.pair is WitnessPair.W else pt_invariant_boundary
    for index in indices:
        theta = _theta(index, ctx.grid_size)
        w = (np.cos(theta) * ctx.minus + np.sin(theta) * ctx.plus).as_hermitian()
        cfg = ctx.cfg.model_copy(update={"seed": derive_seed(ctx.cfg.seed, "statespace", index)})
        for family in ctx.families:
            if family is Family.FS:
                product = fully_separable_optimum(w, cfg, initial=warm_product)
                assert isinstance(product.argument, ProductState)
                warm_product = product.argument.factors
                point = _expectations(product.argument.vector(), ctx.minus, ctx.plus)
                rows.append(SweepRow(theta, family.value, product.value, point))
            elif family is Family.BS:
                if ctx.pair is WitnessPair.W:
                    cut = invariant_biseparable_optimum(w)
                else:
                    cut = biseparable_optimum(w, cfg, initial=warm_cut)
                assert isinstance(cut.argument, BiseparableState)
                warm_cut = cut.argument
                point = _expectations(cut.argument.vector(), ctx.minus, ctx.plus)
                rows.append(SweepRow(theta, family.value, cut.value, point))
            elif family is Family.PPT:
                rows.append(_sdp_row(boundary(ctx.d, theta, BoundaryFamily.PPT_ALL, tol=ctx.tol), family))
            elif family is Family.PPTMIX:
                rows.append(_sdp_row(pptmix_boundary(ctx.d, theta, ctx.pair, ctx.tol), family))
            elif family is Family.QUANTUM:
                rows.append(_sdp_row(boundary(ctx.d, theta, BoundaryFamily.QUANTUM), family))
    return rows


def pptgme_overlay(d: int, points: int = 12, tol: float = 1e-8, threads: int = 1) -> list[SweepRow]:
    """PPT states detected as GME, as rows with value = a and θ = angle of the point."""
    rows = []
    for found in find_ppt_gme(d, points, tol, threads).gme_rows():
        angle = float(np.arctan2(found.w_plus, found.w_minus) % (2 * np.pi))
        rows.append(SweepRow(angle, Family.PPTGME.value, found.a, (found.w_minus, found.w_plus)))
    return rows


def sweep(
    d: int,
    pair: str | WitnessPair = WitnessPair.W,
    families: tuple[str | Family, ...] = DEFAULT_FAMILIES,
    grid_size: int = DEFAULT_GRID,
    cfg: SeesawConfig | None = None,
    threads: int = 1,
    tol: float = 1e-8,
    pptgme_points: int = 12,
) -> SweepTable:
    """Support values of each family on a uniform θ grid over [0, 2π).

    Args:
        d: Local dimension (3 or 4).
        pair: "w" for (W-, W+) or "wpt" for (𝕎-, 𝕎+).
        families: Any of fs, bs, ppt, pptmix, quantum, pptgme (W pair only).
        grid_size: Number of θ values, at least 16.
        cfg: See-saw settings for fs and (𝕎 pair) bs.
        threads: Worker threads; chunks of θ are distributed over them.
        tol: SDP gap target.
        pptgme_points: Sweep points for the pptgme overlay.

    Raises:
        UnsupportedCombinationError: For unsupported d, grid, family or pair.
    """
    kind = WitnessPair(pair)
    if d not in SUPPORTED_DIMS:
        raise UnsupportedCombinationError("statespace dimension", d, SUPPORTED_DIMS)
    if grid_size < MIN_GRID:
        raise UnsupportedCombinationError("grid size", grid_size, [f">= {MIN_GRID}"])
    chosen = tuple(Family(f) for f in families)
    if not chosen:
        raise UnsupportedCombinationError("family list", "empty", [f.value for f in Family])
    if Family.PPTGME in chosen and kind is not WitnessPair.W:
        raise UnsupportedCombinationError("pptgme overlay for pair", kind.value, ["w"])
    minus, plus = witness_pair(d, kind)
    ctx = _Context(
        d=d,
        pair=kind,
        families=tuple(f for f in chosen if f is not Family.PPTGME),
        grid_size=grid_size,
        cfg=cfg or SeesawConfig(),
        tol=tol,
        minus=minus,
        plus=plus,
    )
    chunks = [list(range(k, min(k + CHUNK_SIZE, grid_size))) for k in range(0, grid_size, CHUNK_SIZE)]
    rows: list[SweepRow] = []
    if ctx.families:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            for chunk_rows in executor.map(lambda c: _evaluate_chunk(ctx, c), chunks):
                rows.extend(chunk_rows)
    if Family.PPTGME in chosen:
        rows.extend(pptgme_overlay(d, pptgme_points, tol, threads))
    return SweepTable(local_dim=d, witness_pair=kind.value, rows=rows)


def _antisymmetric_vector(d: int) -> StateVector:
    return basis_from_projector("A", tripartite_projectors(d).A).vectors[0]


def vertices(d: int) -> list[Vertex]:
    """Corners of the W-pair region and the symmetric point, each evaluated on a basis state.

    Chiral (-d√3, c_J), antichiral (+d√3, c_J), antisymmetric (0, c_A) and
    symmetric (0, c_S).
    """
    coeffs = spectral_coefficients(d)
    minus, plus = witness_pair(d, WitnessPair.W)
    symmetric = np.zeros(d**3, dtype=np.complex128)
    symmetric[0] = 1.0
    states = {
        "chiral": (chiral_basis(d).vectors[0].amplitudes, (-coeffs.alpha, coeffs.c_J)),
        "antichiral": (antichiral_basis(d).vectors[0].amplitudes, (coeffs.alpha, coeffs.c_J)),
        "antisymmetric": (_antisymmetric_vector(d).amplitudes, (0.0, coeffs.c_A)),
        "symmetric": (symmetric, (0.0, coeffs.c_S)),
    }
    return [
        Vertex(label, expected, _expectations(vector, minus, plus))
        for label, (vector, expected) in states.items()
    ]


def nesting_violations(table: SweepTable, tol: float = 1e-6) -> list[str]:
    """Pointwise violations of fs ≤ bs ≤ pptmix ≤ quantum and fs ≤ ppt ≤ quantum."""
    by_theta: dict[float, dict[str, float]] = {}
    for row in table.rows:
        if row.family != Family.PPTGME.value:
            by_theta.setdefault(row.theta, {})[row.family] = row.value
    violations = []
    for theta, values in by_theta.items():
        for inner, outer in NESTING:
            if inner.value in values and outer.value in values:
                if values[inner.value] > values[outer.value] + tol:
                    violations.append(
                        f"theta={theta:.6f}: {inner.value}={values[inner.value]:.10g} > "
                        f"{outer.value}={values[outer.value]:.10g}"
                    )
    return violations


def polytope_residual(table: SweepTable) -> float:
    """Largest gap between the quantum support values and the vertex-triangle support function."""
    corners = [v.expected for v in vertices(table.local_dim) if v.label != "symmetric"]
    residual = 0.0
    for row in table.family_rows(Family.QUANTUM):
        direction = (np.cos(row.theta), np.sin(row.theta))
        support = max(direction[0] * x + direction[1] * y for x, y in corners)
        residual = max(residual, abs(row.value - support))
    return residual


def support_curvature(table: SweepTable, family: str | Family = Family.QUANTUM) -> float:
    """Largest triangle area spanned by three consecutive support points.

    Near zero for a polygon traced on a fine grid, positive for a curved boundary.
    """
    points = [np.array(r.point) for r in table.family_rows(family)]
    largest = 0.0
    for k in range(len(points)):
        a, b, c = points[k - 2], points[k - 1], points[k]
        u, v = b - a, c - a
        largest = max(largest, abs(float(u[0] * v[1] - u[1] * v[0])) / 2)
    return largest


# Emission


def render_csv(table: SweepTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in table.rows:
        writer.writerow([repr(r.theta), r.family, repr(r.value), repr(r.point[0]), repr(r.point[1])])
    return buffer.getvalue()


def render_json(table: SweepTable) -> str:
    payload = {
        "local_dim": table.local_dim,
        "witness_pair": table.witness_pair,
        "rows": [asdict(r) for r in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def render_svg(table: SweepTable, width: int = 640, height: int = 480, margin: int = 48) -> str:
    """Filled support polygons per family with a legend, no plotting dependency."""
    xs = [r.point[0] for r in table.rows]
    ys = [r.point[1] for r in table.rows]
    x_low, x_high = min(xs), max(xs)
    y_low, y_high = min(ys), max(ys)
    x_span = (x_high - x_low) or 1.0
    y_span = (y_high - y_low) or 1.0

    def project(x: float, y: float) -> str:
        px = margin + (x - x_low) / x_span * (width - 2 * margin)
        py = height - margin - (y - y_low) / y_span * (height - 2 * margin)
        return f"{px:.3f},{py:.3f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    present = {r.family for r in table.rows}
    legend_y = 16
    for family, (color, name) in PALETTE.items():
        if family.value not in present:
            continue
        points = " ".join(project(*r.point) for r in table.family_rows(family))
        if family is Family.PPTGME:
            lines.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            lines.append(
                f'<polygon points="{points}" fill="{color}" fill-opacity="0.35" '
                f'stroke="{color}" stroke-width="1"/>'
            )
        lines.append(f'<rect x="{width - 170}" y="{legend_y - 10}" width="12" height="12" fill="{color}"/>')
        lines.append(f'<text x="{width - 152}" y="{legend_y}" font-size="12">{name}</text>')
        legend_y += 18
    lines.append(
        f'<text x="{width / 2:.0f}" y="{height - 12}" font-size="12" text-anchor="middle">'
        f"&#10216;{table.witness_pair}-&#10217;</text>"
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


RENDERERS = {"csv": render_csv, "json": render_json, "svg": render_svg}


def emit(table: SweepTable, formats: tuple[str, ...], path: Path) -> list[Path]:
    """Write the table in each format next to `path` (suffix replaced per format).

    Raises:
        EmptyResultError: If the table has no rows; nothing is written.
        UnsupportedCombinationError: For an unknown format.
    """
    if not table.rows:
        raise EmptyResultError("sweep table")
    for fmt in formats:
        if fmt not in RENDERERS:
            raise UnsupportedCombinationError("output format", fmt, sorted(RENDERERS))
    written = []
    for fmt in formats:
        target = path.with_suffix(f".{fmt}")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(RENDERERS[fmt](table))
        written.append(target)
    return written
