"""Literature reference columns and table layouts.

The Donoho and Donoho-Tanner strong-threshold columns come from the
classical polytope-neighborliness computations (projected cross-polytope
for general unknowns, projected simplex for nonnegative ones).  They are
external geometric results quoted for comparison: this library never
recomputes them, and the table command tags them as literature values.
"""

from __future__ import annotations

from dataclasses import dataclass

TABLE_ALPHAS_LOW = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
TABLE_ALPHAS_HIGH = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999)

# strong threshold, general x: central neighborliness of the projected
# cross-polytope (Donoho)
DONOHO_STRONG = {
    0.01: 0.00031, 0.05: 0.00205, 0.1: 0.00488, 0.2: 0.01250,
    0.3: 0.02109, 0.4: 0.03192, 0.5: 0.04471,
    0.6: 0.05977, 0.7: 0.07760, 0.8: 0.1000, 0.9: 0.1264,
    0.95: 0.1438, 0.99: 0.1620, 0.999: 0.1677, 0.9999: 0.1685,
}

# strong threshold, nonnegative x: neighborliness of the projected simplex
# (Donoho-Tanner)
DONOHO_TANNER_STRONG_NONNEG = {
    0.01: 0.00033, 0.05: 0.0024, 0.1: 0.0060, 0.2: 0.0157,
    0.3: 0.0287, 0.4: 0.0455, 0.5: 0.0667,
    0.6: 0.0935, 0.7: 0.1280, 0.8: 0.1739, 0.9: 0.2399,
    0.95: 0.2881, 0.99: 0.3463, 0.999: 0.3675, 0.9999: 0.3750,
}


@dataclass(frozen=True)
class TableSpec:
    """Layout of one published comparison table: which kind, which alphas,
    which columns are recomputed here and which are shipped constants."""

    which: int
    kind: str
    alphas: tuple[float, ...]
    computed_methods: tuple[str, ...]
    reference_label: str | None = None
    reference: dict | None = None


TABLES = {
    1: TableSpec(1, "sectional", TABLE_ALPHAS_LOW, ("direct", "lifted")),
    2: TableSpec(2, "sectional", TABLE_ALPHAS_HIGH, ("direct", "lifted")),
    3: TableSpec(3, "strong", TABLE_ALPHAS_LOW, ("lifted",),
                 "donoho (literature)", DONOHO_STRONG),
    4: TableSpec(4, "strong", TABLE_ALPHAS_HIGH, ("lifted",),
                 "donoho (literature)", DONOHO_STRONG),
    5: TableSpec(5, "strong_nonneg", TABLE_ALPHAS_LOW, ("lifted",),
                 "donoho-tanner (literature)", DONOHO_TANNER_STRONG_NONNEG),
    6: TableSpec(6, "strong_nonneg", TABLE_ALPHAS_HIGH, ("lifted",),
                 "donoho-tanner (literature)", DONOHO_TANNER_STRONG_NONNEG),
}
