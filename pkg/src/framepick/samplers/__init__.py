from .common import center_of_bin, subsample_center_of_bin, uniform_fps_indices
from .maxinfo import (
    MaxInfoRows,
    finish_maxinfo,
    sample_maxinfo,
    sample_uniform_pool,
    select_maxinfo_rows,
)
from .scored import sample_scored
from .standard import sample_single, sample_uniform_fps

__all__ = [
    "MaxInfoRows",
    "center_of_bin",
    "finish_maxinfo",
    "sample_maxinfo",
    "sample_scored",
    "sample_single",
    "sample_uniform_fps",
    "sample_uniform_pool",
    "select_maxinfo_rows",
    "subsample_center_of_bin",
    "uniform_fps_indices",
]
