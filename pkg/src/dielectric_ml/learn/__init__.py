"""From-scratch supervised learners: random forest, KNN, and kernel SVM."""

from .tree import DecisionTree, RandomForestModel, RandomForestParams, fit_forest, fit_tree
from .knn import KnnModel, KnnParams, fit_knn
from .svm import SvmModel, SvmParams, fit_svm
from .model import TrainedModel, model_from_json_dict, model_to_json_dict

__all__ = [
    "DecisionTree",
    "RandomForestModel",
    "RandomForestParams",
    "fit_forest",
    "fit_tree",
    "KnnModel",
    "KnnParams",
    "fit_knn",
    "SvmModel",
    "SvmParams",
    "fit_svm",
    "TrainedModel",
    "model_to_json_dict",
    "model_from_json_dict",
]
