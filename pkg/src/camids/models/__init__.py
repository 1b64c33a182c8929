"""From-scratch classifiers with a scikit-learn compatible surface."""

from .adaboost import AdaBoostClassifier
from .artifact import KINDS, ModelArtifact, load_model, load_model_path, make_estimator, save_model, save_model_path
from .forest import RandomForestClassifier
from .logistic import LogisticRegression
from .naive_bayes import GaussianNB
from .perceptron import Perceptron
from .tree import DecisionTreeClassifier, Tree, best_split, gini, train_tree

__all__ = [
    "AdaBoostClassifier",
    "DecisionTreeClassifier",
    "GaussianNB",
    "KINDS",
    "LogisticRegression",
    "ModelArtifact",
    "Perceptron",
    "RandomForestClassifier",
    "Tree",
    "best_split",
    "gini",
    "load_model",
    "load_model_path",
    "make_estimator",
    "save_model",
    "save_model_path",
    "train_tree",
]
