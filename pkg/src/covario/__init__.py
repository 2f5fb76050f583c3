"""Covariograms, chord transforms and Fourier-Laplace zero branches of planar convex bodies."""

from covario.geometry import (
    Body,
    Direction,
    Disk,
    Polygon,
    Segment,
    SupportBody,
    area,
    body_from_spec,
    body_hash,
    body_to_spec,
    boundary_point,
    curvature,
    example_pair,
    polygonal_approximation,
    reflect,
    support,
    translate,
    width,
    zonogon,
)

__all__ = [
    "Body", "Direction", "Disk", "Polygon", "Segment", "SupportBody",
    "area", "body_from_spec", "body_hash", "body_to_spec", "boundary_point",
    "curvature", "example_pair", "polygonal_approximation", "reflect",
    "support", "translate", "width", "zonogon",
]
