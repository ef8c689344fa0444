"""Static SVG frames of planar scenarios, one per slice time."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError
from .geometry import Scenario, position_at

SVG_NS = "http://www.w3.org/2000/svg"
PALETTE = ("#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3", "#b3de69", "#fccde5", "#ffffb3",
           "#bc80bd", "#ccebc5")


def label_color(label: int) -> str:
    return PALETTE[label % len(PALETTE)]


def _runs(row: np.ndarray):
    """(start, stop, value) for maximal runs of equal non-negative values in a 1-D array."""
    start = 0
    for k in range(1, len(row) + 1):
        if k == len(row) or row[k] != row[start]:
            if row[start] >= 0:
                yield start, k, int(row[start])
            start = k


def render_frame(scenario: Scenario, t: float, free_components=None, width: int = 480) -> str:
    """One SVG 1.1 document: domain box, free cells tinted by label, sensor balls at time t."""
    if scenario.dimension != 2:
        raise DomainError("frames are only drawn for planar scenarios")
    (x0, y0), (x1, y1) = scenario.lower, scenario.upper
    w, h = x1 - x0, y1 - y0
    height = int(round(width * h / w))
    root = ET.Element("svg", {"xmlns": SVG_NS, "version": "1.1", "width": str(width), "height": str(height),
                              "viewBox": f"{x0:g} {y0:g} {w:g} {h:g}"})
    ET.SubElement(root, "title").text = f"t = {t:.6g}"
    # flip so that y grows upwards
    scene = ET.SubElement(root, "g", {"transform": f"matrix(1 0 0 -1 0 {y0 + y1:g})"})
    ET.SubElement(scene, "rect", {"x": f"{x0:g}", "y": f"{y0:g}", "width": f"{w:g}", "height": f"{h:g}",
                                  "fill": "white", "stroke": "black", "stroke-width": f"{0.004 * w:g}"})
    if free_components is not None:
        grid = free_components.grid
        labels = free_components.labels.reshape(grid.shape)
        dx, dy = grid.spacing
        cells = ET.SubElement(scene, "g", {"class": "free", "stroke": "none"})
        for i in range(grid.shape[0]):
            # runs along y inside column i
            for a, b, lab in _runs(labels[i]):
                ET.SubElement(cells, "rect", {
                    "x": f"{grid.lower[0] + i * dx:.6g}", "y": f"{grid.lower[1] + a * dy:.6g}",
                    "width": f"{dx:.6g}", "height": f"{(b - a) * dy:.6g}",
                    "fill": label_color(lab), "data-label": str(lab)})
    balls = ET.SubElement(scene, "g", {"class": "sensors", "fill-opacity": "0.35"})
    for s in scenario.sensors:
        cx, cy = (float(v) for v in position_at(s, t))
        ET.SubElement(balls, "circle", {
            "cx": repr(cx), "cy": repr(cy), "r": repr(float(s.radius)),
            "fill": "#555555" if s.fence else "#d62728", "stroke": "black", "stroke-width": f"{0.002 * w:g}",
            "data-sensor": s.sensor_id})
    return ET.tostring(root, encoding="unicode")


def render_frames(scenario: Scenario, slices: Sequence, out_dir=None, prefix: str = "frame") -> list:
    """Frames for each slice (objects with ``time`` and ``free_components``); optionally written to disk."""
    frames = [render_frame(scenario, float(s.time), s.free_components) for s in slices]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, svg in enumerate(frames):
            (out / f"{prefix}_{k:03d}.svg").write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + svg)
    return frames


def parse_circles(svg: str) -> dict:
    """sensor id -> (cx, cy, r) read back from a frame."""
    root = ET.fromstring(svg)
    return {c.get("data-sensor"): (float(c.get("cx")), float(c.get("cy")), float(c.get("r")))
            for c in root.iter(f"{{{SVG_NS}}}circle")}
