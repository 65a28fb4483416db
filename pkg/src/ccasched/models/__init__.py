"""The five EDP regressors behind a common train/predict contract."""

from .linear import LinearModel, LmsParams, fit_linear, fit_lms, median_squared_residual, ols
from .m5 import M5ModelTree, M5Params, fit_m5
from .metrics import accuracy, rmae
from .mlp import MlpParams, MlpWeights, MultilayerPerceptron, fit_mlp, loss_and_grad
from .predictor import (
    ALGORITHMS,
    Predictor,
    check_algorithm,
    make_params,
    train,
    train_linear,
    train_lms,
    train_m5,
    train_mlp,
    train_reptree,
)
from .reptree import REPTree, RepParams, fit_reptree

__all__ = [
    "ALGORITHMS", "LinearModel", "LmsParams", "M5ModelTree", "M5Params", "MlpParams", "MlpWeights",
    "MultilayerPerceptron", "Predictor", "REPTree", "RepParams", "accuracy", "check_algorithm",
    "fit_linear", "fit_lms", "fit_m5", "fit_mlp", "fit_reptree", "loss_and_grad", "make_params",
    "median_squared_residual", "ols", "rmae", "train", "train_linear", "train_lms", "train_m5",
    "train_mlp", "train_reptree",
]
