# Trees, forests and cascades
from daf_forensics.forest.cascade import CascadeLayer, DeepForestModel, fit_cascade, last_layer_features, predict_score
from daf_forensics.forest.forest import Forest, fit_forest, predict_proba
from daf_forensics.forest.trees import ForestKind, ForestParams, Tree, TreeNode, fit_tree

__all__ = [
	"CascadeLayer",
	"DeepForestModel",
	"Forest",
	"ForestKind",
	"ForestParams",
	"Tree",
	"TreeNode",
	"fit_cascade",
	"fit_forest",
	"fit_tree",
	"last_layer_features",
	"predict_proba",
	"predict_score",
]
