"""Label aggregation: weighted and plain majority voting."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import InputError
from .labels import LabelSet

log = logging.getLogger(__name__)


def vote_scores(labels: LabelSet, weights) -> np.ndarray:
    """T x M matrix of summed voter weights per class."""
    weights = np.asarray(weights, float)
    if weights.shape != (labels.W,):
        raise InputError(f"expected {labels.W} weights, got shape {weights.shape}")
    if not np.all(np.isfinite(weights)):
        raise InputError("vote weights must be finite")
    flat = labels.tasks * labels.M + labels.labels
    scores = np.bincount(flat, weights=weights[labels.workers], minlength=labels.T * labels.M)
    return scores.reshape(labels.T, labels.M)


def unlabeled_tasks(labels: LabelSet) -> np.ndarray:
    return np.flatnonzero(np.bincount(labels.tasks, minlength=labels.T) == 0)


def predict_weighted(labels: LabelSet, weights) -> np.ndarray:
    """Per task, the class with the largest total weight; ties go to the lowest class.

    Tasks nobody labeled are predicted as class 0.
    """
    pred = np.argmax(vote_scores(labels, weights), axis=1)
    empty = unlabeled_tasks(labels)
    if empty.size:
        pred[empty] = 0
        log.warning("%d tasks have no labels and default to class 0", empty.size)
    return pred


def predict_majority(labels: LabelSet) -> np.ndarray:
    return predict_weighted(labels, np.ones(labels.W))


def prediction_error(predicted, truths) -> float:
    predicted = np.asarray(predicted)
    truths = np.asarray(truths)
    if predicted.shape != truths.shape:
        raise InputError(f"length mismatch: {predicted.shape} vs {truths.shape}")
    if predicted.size == 0:
        return 0.0
    return float(np.mean(predicted != truths))
