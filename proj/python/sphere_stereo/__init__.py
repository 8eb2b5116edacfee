"""Spherical top-bottom stereo: rendering, matching and evaluation."""

from ._core import (
    ConfigError,
    DomainError,
    EvalError,
    IoError,
    ParseError,
    Scene,
    depth_to_disparity,
    disparity_to_depth,
    evaluate,
    match,
    match_bruteforce,
    num_threads,
    point_cloud,
    polar_angle_map,
    read_floatmap,
    read_image,
    render,
    set_num_threads,
    texture_mask,
    write_floatmap,
    write_image,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "EvalError",
    "IoError",
    "ParseError",
    "Scene",
    "depth_to_disparity",
    "disparity_to_depth",
    "evaluate",
    "match",
    "match_bruteforce",
    "num_threads",
    "point_cloud",
    "polar_angle_map",
    "read_floatmap",
    "read_image",
    "render",
    "set_num_threads",
    "texture_mask",
    "write_floatmap",
    "write_image",
]
