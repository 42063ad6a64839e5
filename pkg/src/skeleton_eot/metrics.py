"""Plane-projected IOU of 3D shapes and velocity RMSE."""

from __future__ import annotations

import logging

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .motion import KinematicState
from .template import CORNER_G

log = logging.getLogger(__name__)

PLANES = {"xy": (0, 1), "yz": (1, 2), "zx": (2, 0)}


def polygon_area(poly) -> float:
    """Signed shoelace area (positive for counter-clockwise vertices)."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def convex_hull_2d(points) -> np.ndarray | None:
    """Counter-clockwise hull vertices, or None if the points are degenerate."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        return None
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return None
    return pts[hull.vertices]  # scipy returns 2D hulls counter-clockwise


def clip_convex(subject, clipper) -> np.ndarray:
    """Sutherland–Hodgman clipping of a convex polygon by a convex CCW polygon."""
    out = [np.asarray(p, dtype=float) for p in subject]
    clipper = np.asarray(clipper, dtype=float)
    for i in range(len(clipper)):
        a, b = clipper[i], clipper[(i + 1) % len(clipper)]
        edge = b - a
        inp, out = out, []
        if not inp:
            break

        def side(p):
            return edge[0] * (p[1] - a[1]) - edge[1] * (p[0] - a[0])

        prev = inp[-1]
        s_prev = side(prev)
        for cur in inp:
            s_cur = side(cur)
            if s_cur >= 0:
                if s_prev < 0:
                    out.append(prev + (cur - prev) * (s_prev / (s_prev - s_cur)))
                out.append(cur)
            elif s_prev >= 0:
                out.append(prev + (cur - prev) * (s_prev / (s_prev - s_cur)))
            prev, s_prev = cur, s_cur
    return np.array(out).reshape(-1, 2)


def iou_convex(a, b) -> float:
    """IOU of the convex hulls of two 2D point sets (0 for degenerate hulls)."""
    ha, hb = convex_hull_2d(a), convex_hull_2d(b)
    if ha is None or hb is None:
        log.debug("degenerate hull in IOU computation")
        return 0.0
    area_a, area_b = polygon_area(ha), polygon_area(hb)
    inter = clip_convex(ha, hb)
    area_i = max(polygon_area(inter), 0.0) if len(inter) >= 3 else 0.0
    union = area_a + area_b - area_i
    if union <= 0:
        return 0.0
    return float(np.clip(area_i / union, 0.0, 1.0))


def iou_plane(shape_true, shape_est, plane: str) -> float:
    """IOU of two 3D point sets projected onto a coordinate plane (xy, yz or zx)."""
    i, j = PLANES[plane]
    a = np.asarray(shape_true)[:, [i, j]]
    b = np.asarray(shape_est)[:, [i, j]]
    return iou_convex(a, b)


def shape_points(knots_vcs, xi) -> np.ndarray:
    """Knots together with the four corners of the ξ-sized bottom rectangle (VCS)."""
    return np.vstack([np.asarray(knots_vcs), CORNER_G @ np.asarray(xi)])


def shape_in_frame(x_shape: KinematicState, knots_vcs, x_frame: KinematicState) -> np.ndarray:
    """A shape defined in the frame of ``x_shape`` expressed in the frame of ``x_frame``."""
    pts = shape_points(knots_vcs, x_shape.xi) @ x_shape.R.T + x_shape.p
    return (pts - x_frame.p) @ x_frame.R


def frame_ious(x_true, knots_true, x_est, knots_est) -> dict:
    a = shape_points(knots_true, x_true.xi)
    b = shape_in_frame(x_est, knots_est, x_true)
    return {f"iou_{pl}": iou_plane(a, b, pl) for pl in PLANES}


def rmse_velocity(v_true, v_est) -> float:
    v_true = np.asarray(v_true, dtype=float)
    v_est = np.asarray(v_est, dtype=float)
    if v_true.shape != v_est.shape:
        raise ValueError(f"length mismatch: {v_true.shape} vs {v_est.shape}")
    if v_true.size == 0:
        raise ValueError("empty series")
    return float(np.sqrt(np.mean((v_true - v_est) ** 2)))
