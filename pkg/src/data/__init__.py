# Data Package
from .angles import AngleFileSpec, AngleUnit, read_angle_file, write_angle_file
from .synthetic import NULL_PARAMS, WIND_PARAMS, synthetic_null_sample, synthetic_wind_sample

__all__ = [
    "AngleFileSpec",
    "AngleUnit",
    "read_angle_file",
    "write_angle_file",
    "NULL_PARAMS",
    "WIND_PARAMS",
    "synthetic_null_sample",
    "synthetic_wind_sample",
]
