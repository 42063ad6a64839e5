"""Default 24-knot car skeleton and bottom-corner geometry.

Vehicle frame: x forward, y left, z up, origin at the middle of the bottom.
Knots come in 12 left/right mirror pairs; knot ``2k`` is on the left side and
``2k + 1`` is its mirror on the right.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIRROR = np.diag([1.0, -1.0, 1.0])

# left-side knots of a sedan-like box-with-cabin outline (metres)
_LEFT_KNOTS = [
    (2.30, 0.85, 0.30),  # front bumper, low
    (2.30, 0.85, 0.80),  # front bumper, top
    (1.00, 0.85, 0.95),  # hood rear / windshield base
    (0.40, 0.72, 1.45),  # roof front
    (-1.00, 0.72, 1.45),  # roof rear
    (-1.60, 0.85, 0.95),  # rear window base
    (-2.30, 0.85, 0.90),  # trunk top, rear
    (-2.30, 0.85, 0.30),  # rear bumper, low
    (1.40, 0.90, 0.33),  # front wheel centre
    (-1.40, 0.90, 0.33),  # rear wheel centre
    (0.90, 0.92, 1.00),  # side mirror
    (2.25, 0.60, 0.70),  # headlight
]

DEFAULT_XI = np.array([4.6, 1.8])

# Simulated vehicles whose outlines differ from the generic template (same knot
# semantics and ordering).  Left-side knots and bottom extent [length, width].
_BUS_LEFT = [
    (5.00, 1.25, 0.35),
    (5.00, 1.25, 1.10),
    (4.90, 1.25, 2.60),
    (4.60, 1.15, 3.00),
    (-4.80, 1.15, 3.00),
    (-5.00, 1.25, 2.60),
    (-5.00, 1.25, 1.10),
    (-5.00, 1.25, 0.35),
    (3.20, 1.27, 0.50),
    (-2.80, 1.27, 0.50),
    (4.20, 1.30, 2.20),
    (4.95, 0.90, 0.80),
]
_SUV_LEFT = [
    (2.35, 0.90, 0.40),
    (2.35, 0.90, 0.95),
    (1.20, 0.90, 1.10),
    (0.60, 0.78, 1.70),
    (-1.50, 0.78, 1.72),
    (-2.25, 0.88, 1.25),
    (-2.35, 0.90, 1.00),
    (-2.35, 0.90, 0.40),
    (1.45, 0.95, 0.38),
    (-1.45, 0.95, 0.38),
    (1.00, 0.98, 1.15),
    (2.30, 0.65, 0.80),
]
VEHICLE_SHAPES = {
    "sedan": (_LEFT_KNOTS, (4.6, 1.8)),
    "bus": (_BUS_LEFT, (10.0, 2.5)),
    "suv": (_SUV_LEFT, (4.7, 1.9)),
}

# corner ids 1..4 -> signs of (length, width): front-left, front-right, rear-right, rear-left
CORNER_SIGNS = ((1, 1), (1, -1), (-1, -1), (-1, 1))


def corner_matrix(corner_id: int) -> np.ndarray:
    """G_i mapping ξ = [l, w] to the VCS position of bottom corner ``corner_id`` (1..4)."""
    if corner_id not in (1, 2, 3, 4):
        raise ValueError(f"corner id must be in 1..4, got {corner_id}")
    sl, sw = CORNER_SIGNS[corner_id - 1]
    return np.array([[0.5 * sl, 0.0], [0.0, 0.5 * sw], [0.0, 0.0]])


CORNER_G = np.stack([corner_matrix(i) for i in (1, 2, 3, 4)])


def _mirrored(left) -> np.ndarray:
    rows = []
    for k in left:
        left = np.array(k)
        rows.append(left)
        rows.append(MIRROR @ left)
    return np.array(rows)


def _default_knots() -> np.ndarray:
    return _mirrored(_LEFT_KNOTS)


def default_pairs(n: int) -> np.ndarray:
    """Pair knots (0,1), (2,3), ...; an odd last knot is its own mirror image."""
    idx = np.arange(n)
    pairs = idx ^ 1
    pairs[pairs >= n] = idx[pairs >= n]
    return pairs


@dataclass
class SkeletonTemplate:
    knots: np.ndarray = field(default_factory=_default_knots)  # (T, 3) in VCS
    sym: np.ndarray | None = None  # (T,) mirror partner index
    xi: np.ndarray = field(default_factory=lambda: DEFAULT_XI.copy())

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        if self.sym is None:
            self.sym = default_pairs(len(self.knots))
        self.sym = np.asarray(self.sym, dtype=int)
        if np.any(self.sym[self.sym] != np.arange(len(self.sym))):
            raise ValueError("symmetry pairing must be an involution")

    @property
    def T(self) -> int:
        return len(self.knots)

    def scaled(self, sx: float, sy: float, sz: float) -> "SkeletonTemplate":
        s = np.array([sx, sy, sz])
        return SkeletonTemplate(self.knots * s, self.sym.copy(), self.xi * s[:2])

    @staticmethod
    def vehicle(name: str) -> "SkeletonTemplate":
        """One of the built-in vehicle outlines: sedan (the default), bus or suv."""
        left, xi = VEHICLE_SHAPES[name]
        return SkeletonTemplate(_mirrored(left), None, np.array(xi, dtype=float))

    def to_dict(self) -> dict:
        return {"knots": self.knots.tolist(), "sym": self.sym.tolist(), "xi": self.xi.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "SkeletonTemplate":
        return SkeletonTemplate(np.array(d["knots"]), np.array(d["sym"]), np.array(d["xi"]))
