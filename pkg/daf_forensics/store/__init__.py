# Model and feature cache persistence
from daf_forensics.store.feature_cache import CacheWriter, read_cache, read_header, write_cache
from daf_forensics.store.model_file import (
	load_model,
	model_from_bytes,
	model_summary,
	model_to_bytes,
	save_model,
)

__all__ = [
	"CacheWriter",
	"load_model",
	"model_from_bytes",
	"model_summary",
	"model_to_bytes",
	"read_cache",
	"read_header",
	"save_model",
	"write_cache",
]
