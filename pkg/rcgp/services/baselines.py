"""Reference baselines: a small logistic MLP, a linear primal SVM and the
majority-class predictor. All consume the same partitions as the CGP path.
"""

import logging
from typing import Optional

import numpy as np

from rcgp.core.seeding import make_rng
from rcgp.core.validate import EmptyDatasetError, SingleClassError
from rcgp.schemas.baselines import (
    BaselineRun,
    MlpConfig,
    MlpFit,
    MlpModel,
    SvmConfig,
    SvmFit,
    SvmModel,
)
from rcgp.schemas.dataset import Dataset

logger = logging.getLogger(__name__)


def _standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    return mean, scale


def _accuracy(predictions: np.ndarray, data: Optional[Dataset]) -> Optional[float]:
    if data is None or len(data) == 0:
        return None
    return float(np.mean(predictions == data.y))


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


# MLP


def mlp_forward(params: dict, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hidden activations and output logits."""
    hidden = sigmoid(X @ params["W1"] + params["b1"])
    return hidden, hidden @ params["W2"] + params["b2"]


def mlp_loss_and_gradient(params: dict, X: np.ndarray, y: np.ndarray) -> tuple[float, dict]:
    """Mean binary cross-entropy and its gradient by backpropagation.

    ``params`` holds W1 (d, h), b1 (h,), W2 (h,) and b2 (scalar array).
    """
    n = X.shape[0]
    hidden, logits = mlp_forward(params, X)
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))

    d_logits = (sigmoid(logits) - y) / n
    d_hidden = np.outer(d_logits, params["W2"]) * hidden * (1.0 - hidden)
    grads = {
        "W1": X.T @ d_hidden,
        "b1": d_hidden.sum(axis=0),
        "W2": hidden.T @ d_logits,
        "b2": np.asarray(d_logits.sum()),
    }
    return loss, grads


def init_mlp_params(n_inputs: int, hidden_units: int, rng: np.random.Generator) -> dict:
    return {
        "W1": rng.normal(0.0, 1.0 / np.sqrt(n_inputs), size=(n_inputs, hidden_units)),
        "b1": np.zeros(hidden_units),
        "W2": rng.normal(0.0, 1.0 / np.sqrt(hidden_units), size=hidden_units),
        "b2": np.asarray(0.0),
    }


def _mlp_params(model: MlpModel) -> dict:
    return {
        "W1": np.asarray(model.W1),
        "b1": np.asarray(model.b1),
        "W2": np.asarray(model.W2),
        "b2": np.asarray(model.b2),
    }


def mlp_predict(model: MlpModel, X: np.ndarray) -> np.ndarray:
    Xs = (np.asarray(X, dtype=np.float64) - model.mean) / model.scale
    _, logits = mlp_forward(_mlp_params(model), Xs)
    return (logits >= 0.0).astype(np.int64)


def train_mlp(
    train: Dataset,
    val: Optional[Dataset],
    config: MlpConfig,
    test: Optional[Dataset] = None,
) -> MlpFit:
    """Mini-batch gradient descent on cross-entropy; validation is only reported.

    Raises:
        EmptyDatasetError: If ``train`` is empty
    """
    if len(train) == 0:
        raise EmptyDatasetError("Cannot train an MLP on an empty dataset")
    rng = make_rng(config.seed)
    X, y = train.X, train.y.astype(np.float64)
    mean, scale = _standardizer(X)
    Xs = (X - mean) / scale

    params = init_mlp_params(X.shape[1], config.hidden_units, rng)
    for _ in range(config.epochs):
        order = rng.permutation(len(Xs))
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            _, grads = mlp_loss_and_gradient(params, Xs[batch], y[batch])
            for name in params:
                params[name] = params[name] - config.learning_rate * grads[name]

    model = MlpModel(
        config=config,
        W1=params["W1"].tolist(),
        b1=params["b1"].tolist(),
        W2=params["W2"].tolist(),
        b2=float(params["b2"]),
        mean=mean.tolist(),
        scale=scale.tolist(),
    )
    run = BaselineRun(
        method="ANN",
        seed=config.seed,
        train_acc=_accuracy(mlp_predict(model, train.X), train),
        val_acc=_accuracy(mlp_predict(model, val.X), val) if val is not None and len(val) else None,
        test_acc=_accuracy(mlp_predict(model, test.X), test) if test is not None and len(test) else None,
    )
    logger.debug("MLP seed=%d train=%.4f", config.seed, run.train_acc)
    return MlpFit(model=model, run=run)


# linear SVM


def _signed(y: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(y) == 1, 1.0, -1.0)


def hinge_objective(w: np.ndarray, b: float, Xs: np.ndarray, signs: np.ndarray, lam: float) -> float:
    margins = signs * (Xs @ w + b)
    return float(0.5 * lam * np.dot(w, w) + np.mean(np.maximum(0.0, 1.0 - margins)))


def svm_objective(model: SvmModel, X: np.ndarray, y: np.ndarray) -> float:
    """Regularised hinge loss of ``model`` on raw features and 0/1 labels."""
    Xs = (np.asarray(X, dtype=np.float64) - model.mean) / model.scale
    return hinge_objective(
        np.asarray(model.weights), model.bias, Xs, _signed(y), model.config.regularization
    )


def svm_predict(model: SvmModel, X: np.ndarray) -> np.ndarray:
    Xs = (np.asarray(X, dtype=np.float64) - model.mean) / model.scale
    return (Xs @ np.asarray(model.weights) + model.bias >= 0.0).astype(np.int64)


def train_linear_svm(
    train: Dataset,
    config: SvmConfig,
    test: Optional[Dataset] = None,
) -> SvmFit:
    """Primal subgradient descent on the regularised hinge loss.

    Step size is lr / (1 + lr * lambda * t); the averaged iterate is returned.
    Only the training and test partitions are evaluated.

    Raises:
        EmptyDatasetError, SingleClassError
    """
    if len(train) == 0:
        raise EmptyDatasetError("Cannot train an SVM on an empty dataset")
    counts = train.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClassError("Linear SVM needs both classes")

    rng = make_rng(config.seed)
    X = train.X
    mean, scale = _standardizer(X)
    Xs = (X - mean) / scale
    signs = _signed(train.y)
    lam, lr0 = config.regularization, config.learning_rate

    w, b = np.zeros(X.shape[1]), 0.0
    w_sum, b_sum, steps = np.zeros_like(w), 0.0, 0
    for _ in range(config.epochs):
        order = rng.permutation(len(Xs))
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            Xb, sb = Xs[batch], signs[batch]
            violated = sb * (Xb @ w + b) < 1.0
            grad_w = lam * w - (sb[violated] @ Xb[violated]) / len(batch)
            grad_b = -np.sum(sb[violated]) / len(batch)
            eta = lr0 / (1.0 + lr0 * lam * steps)
            w = w - eta * grad_w
            b = b - eta * grad_b
            steps += 1
            w_sum += w
            b_sum += b

    if steps:
        w, b = w_sum / steps, b_sum / steps
    model = SvmModel(
        config=config,
        weights=w.tolist(),
        bias=float(b),
        mean=mean.tolist(),
        scale=scale.tolist(),
    )
    run = BaselineRun(
        method="SVM",
        seed=config.seed,
        train_acc=_accuracy(svm_predict(model, train.X), train),
        test_acc=_accuracy(svm_predict(model, test.X), test) if test is not None and len(test) else None,
    )
    logger.debug("SVM seed=%d train=%.4f", config.seed, run.train_acc)
    return SvmFit(model=model, run=run)


# majority class


def majority_label(train: Dataset) -> int:
    counts = train.class_counts()
    return 1 if counts[1] > counts[0] else 0


def majority_baseline(
    train: Dataset, val: Optional[Dataset] = None, test: Optional[Dataset] = None
) -> BaselineRun:
    """Accuracies of always predicting the training majority class (ties -> 0)."""
    if len(train) == 0:
        raise EmptyDatasetError("Cannot take the majority of an empty dataset")
    label = majority_label(train)

    def score(data):
        if data is None or len(data) == 0:
            return None
        return float(np.mean(data.y == label))

    return BaselineRun(
        method="Majority",
        seed=0,
        train_acc=score(train),
        val_acc=score(val),
        test_acc=score(test),
    )
