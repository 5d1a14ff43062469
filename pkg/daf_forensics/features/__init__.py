# Patch-based spatial/frequency feature pipeline
from daf_forensics.features.frequency import dct2, idct2, lfs
from daf_forensics.features.hog import hog
from daf_forensics.features.patches import PatchConfig, PatchGrid, extract, multiscale, partition

__all__ = ["PatchConfig", "PatchGrid", "dct2", "extract", "hog", "idct2", "lfs", "multiscale", "partition"]
