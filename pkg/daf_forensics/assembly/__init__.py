# Dynamic assembly of cascade forests
from daf_forensics.assembly.sampling import SampleWeights, update_weights, weighted_sample
from daf_forensics.assembly.selector import assemble, score_pool, select_components
from daf_forensics.assembly.sources import CacheSource, InMemorySource
from daf_forensics.assembly.trainer import TrainConfig, TrainingHooks, peak_residency, run_daf

__all__ = [
	"CacheSource",
	"InMemorySource",
	"SampleWeights",
	"TrainConfig",
	"TrainingHooks",
	"assemble",
	"peak_residency",
	"run_daf",
	"score_pool",
	"select_components",
	"update_weights",
	"weighted_sample",
]
