"""Loader for the plain-text reference-table fixture.

The fixture encodes, per matrix entry, exact coefficients of the spectral
densities (or plain constants for the basis transformations) in the form
``value = COEFF * sqrt(RADICAND)`` with both tokens rational ``p/q``.
Lines prefixed PRINTED record as-published variants of entries that are
inconsistent with the double-commutator assembly; they are kept for
documentation and loaded separately (see README).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .phys_params import SpectralDensities

_TERMS = ("J0", "J1", "J2")


@dataclass(frozen=True)
class CoefficientTable:
    """Entries of one matrix: (row, col) -> {term: value}, rows/cols 1-based."""

    name: str
    shape: tuple[int, int]
    entries: dict

    def evaluate(self, j: SpectralDensities) -> np.ndarray:
        coeffs = {"J0": j.j0, "J1": j.j1, "J2": j.j2, "CONST": 1.0}
        out = np.zeros(self.shape)
        for (r, c), terms in self.entries.items():
            out[r - 1, c - 1] = sum(v * coeffs[t] for t, v in terms.items())
        return out

    def constant_matrix(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for (r, c), terms in self.entries.items():
            extra = [t for t in terms if t != "CONST"]
            if extra:
                raise ValueError(f"{self.name} is not a constant table (has {extra})")
            out[r - 1, c - 1] = terms["CONST"]
        return out


@dataclass(frozen=True)
class ReferenceTables:
    version: int
    j0_block: CoefficientTable          # 8x8, zero-coherence superoperator
    j1_block: CoefficientTable          # 7x7, first-coherence superoperator
    u0: np.ndarray
    u0_bar: np.ndarray
    u1: np.ndarray
    u1_bar: np.ndarray
    printed_j1_variants: CoefficientTable


def _rational(token: str) -> Fraction:
    return Fraction(token)


def _parse_value(coeff_tok: str, rad_tok: str) -> float:
    coeff = _rational(coeff_tok)
    rad = _rational(rad_tok)
    if rad < 0:
        raise ValueError(f"negative radicand {rad_tok}")
    return float(coeff) * np.sqrt(float(rad))


_SHAPES = {"J0T": (8, 8), "J1T": (7, 7), "U0": (8, 8), "U0BAR": (8, 8),
           "U1": (7, 7), "U1BAR": (7, 7)}


@lru_cache(maxsize=1)
def load_reference_tables() -> ReferenceTables:
    text = resources.files("quadrelax").joinpath("_table_data/reference_tables.txt").read_text()
    version = None
    raw: dict[str, dict] = {name: {} for name in _SHAPES}
    printed: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "version":
            version = int(parts[1])
            continue
        target = raw
        if parts[0] == "PRINTED":
            parts = parts[1:]
            target = None
        if len(parts) != 6:
            raise ValueError(f"reference-table fixture line {lineno}: expected 6 fields, got {len(parts)}")
        name, row_s, col_s, term, coeff_tok, rad_tok = parts
        if name not in _SHAPES:
            raise ValueError(f"reference-table fixture line {lineno}: unknown table {name}")
        if term not in _TERMS and term != "CONST":
            raise ValueError(f"reference-table fixture line {lineno}: unknown term {term}")
        r, c = int(row_s), int(col_s)
        nrows, ncols = _SHAPES[name]
        if not (1 <= r <= nrows and 1 <= c <= ncols):
            raise ValueError(f"reference-table fixture line {lineno}: index ({r},{c}) outside {name}")
        value = _parse_value(coeff_tok, rad_tok)
        store = printed if target is None else raw[name]
        store.setdefault((r, c), {})
        if term in store[(r, c)] and store is not printed:
            raise ValueError(f"reference-table fixture line {lineno}: duplicate {name}({r},{c}) {term}")
        store[(r, c)][term] = value
    if version is None:
        raise ValueError("reference-table fixture missing version line")

    def table(name: str) -> CoefficientTable:
        return CoefficientTable(name=name, shape=_SHAPES[name], entries=raw[name])

    return ReferenceTables(
        version=version,
        j0_block=table("J0T"),
        j1_block=table("J1T"),
        u0=table("U0").constant_matrix(),
        u0_bar=table("U0BAR").constant_matrix(),
        u1=table("U1").constant_matrix(),
        u1_bar=table("U1BAR").constant_matrix(),
        printed_j1_variants=CoefficientTable(name="J1T-printed", shape=(7, 7), entries=printed),
    )
