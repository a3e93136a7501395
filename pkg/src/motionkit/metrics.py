"""Evaluation metrics: instruction-following recall, displacement errors,
detection accuracies, and the Gaussian-mixture loss arithmetic.

Instruction-following recall (IFR) of one scenario is the fraction of its M
generated trajectories whose extracted direction matches the instructed one;
the micro corpus value averages per-scenario fractions, the macro variant
averages per-direction means first. Directions are extracted from predictions
with the same classifier used for ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .attributes import DirectionLabel, DirectionThresholds, classify_direction_arrays, collapse_direction
from .behavior import Safety
from .errors import NoValidOverlap, NonPositiveSigma, SchemaError
from .feasibility import FeasTag
from .instructions import Decision


@dataclass(frozen=True)
class PredictionSet:
    """M candidate future trajectories for one scenario plus mode scores."""

    scenario_id: str
    trajectories: np.ndarray  # (M, T, 2)
    scores: np.ndarray  # (M,)
    valid: Optional[np.ndarray] = None  # (M, T) bool; default all valid
    direction: Optional[DirectionLabel] = None  # disambiguates multi-row scenarios
    decision: Optional[Decision] = None
    with_context: Optional[bool] = None

    def __post_init__(self) -> None:
        traj = np.asarray(self.trajectories, dtype=float)
        if traj.ndim != 3 or traj.shape[0] < 1 or traj.shape[2] != 2:
            raise SchemaError(f"trajectories must be (M, T, 2), got {traj.shape}")
        scores = np.asarray(self.scores, dtype=float)
        if scores.shape != (traj.shape[0],):
            raise SchemaError("scores must have one entry per mode")
        valid = self.valid
        if valid is None:
            valid = np.ones(traj.shape[:2], dtype=bool)
        else:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != traj.shape[:2]:
                raise SchemaError("valid mask must be (M, T)")
        object.__setattr__(self, "trajectories", traj)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "valid", valid)

    @property
    def n_modes(self) -> int:
        return int(self.trajectories.shape[0])


def classify_prediction(
    xy: np.ndarray, valid: Optional[np.ndarray], dt: float, th: DirectionThresholds = DirectionThresholds()
) -> Optional[DirectionLabel]:
    """Direction bucket of one generated trajectory; None when unclassifiable.

    Predictions are bare positions: per-sample speed is derived from the
    displacement to the next valid sample over the elapsed time (the last
    sample repeats the previous speed), matching the ground-truth extractor's
    view of the motion.
    """
    xy = np.asarray(xy, dtype=float)
    if valid is None:
        pts = xy
        gaps = np.ones(max(xy.shape[0] - 1, 0))
    else:
        idx = np.flatnonzero(np.asarray(valid, dtype=bool))
        pts = xy[idx]
        gaps = np.diff(idx).astype(float)
    if pts.shape[0] < 2:
        return None
    seg = np.diff(pts, axis=0)
    pair_speeds = np.hypot(seg[:, 0], seg[:, 1]) / (dt * gaps)
    speeds = np.append(pair_speeds, pair_speeds[-1])
    fine = classify_direction_arrays(pts, speeds, th, fallback_heading=0.0)
    return collapse_direction(fine)


def ifr_scenario(
    instructed: DirectionLabel,
    preds: PredictionSet,
    dt: float,
    th: DirectionThresholds = DirectionThresholds(),
) -> tuple[float, int]:
    """Per-scenario IFR plus the count of unclassifiable trajectories.

    Unclassifiable trajectories (fewer than two valid steps) count as
    non-matches in the denominator and are reported separately.
    """
    matches = 0
    unclassifiable = 0
    for j in range(preds.n_modes):
        label = classify_prediction(preds.trajectories[j], preds.valid[j], dt, th)
        if label is None:
            unclassifiable += 1
        elif label == instructed:
            matches += 1
    return matches / preds.n_modes, unclassifiable


def ifr_micro(per_scenario: Sequence[float]) -> float:
    """Corpus IFR: plain mean of per-scenario fractions."""
    if not per_scenario:
        return 0.0
    return float(np.sum(np.asarray(per_scenario, dtype=float)) / len(per_scenario))


def ifr_macro(
    rows: Sequence[tuple[DirectionLabel, float]]
) -> tuple[float, dict[DirectionLabel, float]]:
    """Macro IFR: average per-direction means over the directions present."""
    buckets: dict[DirectionLabel, list[float]] = {}
    for label, value in rows:
        buckets.setdefault(label, []).append(value)
    per_class = {
        label: float(np.sum(np.asarray(vals)) / len(vals)) for label, vals in buckets.items()
    }
    if not per_class:
        return 0.0, {}
    macro = float(np.sum(np.asarray(list(per_class.values()))) / len(per_class))
    return macro, per_class


def _joint_valid(gt_valid: np.ndarray, pred_valid: np.ndarray) -> np.ndarray:
    if gt_valid.shape != pred_valid.shape:
        raise SchemaError("ground truth and prediction must share t_pred")
    return gt_valid & pred_valid


def min_ade(gt_xy: np.ndarray, gt_valid: np.ndarray, preds: PredictionSet) -> float:
    """Minimum over modes of the mean displacement over jointly valid steps."""
    gt_xy = np.asarray(gt_xy, dtype=float)
    gt_valid = np.asarray(gt_valid, dtype=bool)
    best = None
    for j in range(preds.n_modes):
        mask = _joint_valid(gt_valid, preds.valid[j])
        if not mask.any():
            continue
        d = np.linalg.norm(preds.trajectories[j][mask] - gt_xy[mask], axis=1)
        ade = float(np.mean(d))
        if best is None or ade < best:
            best = ade
    if best is None:
        raise NoValidOverlap("no mode shares a valid step with the ground truth")
    return best


def min_fde(gt_xy: np.ndarray, gt_valid: np.ndarray, preds: PredictionSet) -> float:
    """Minimum over modes of the displacement at the last jointly valid step."""
    gt_xy = np.asarray(gt_xy, dtype=float)
    gt_valid = np.asarray(gt_valid, dtype=bool)
    best = None
    for j in range(preds.n_modes):
        mask = _joint_valid(gt_valid, preds.valid[j])
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            continue
        last = idx[-1]
        fde = float(np.linalg.norm(preds.trajectories[j][last] - gt_xy[last]))
        if best is None or fde < best:
            best = fde
    if best is None:
        raise NoValidOverlap("no mode shares a valid step with the ground truth")
    return best


def detection_accuracy(decisions: Sequence[tuple[Decision, FeasTag]]) -> dict[FeasTag, float]:
    """Per-tag accuracy: GT/F rows are correct when accepted, IF when rejected."""
    totals: dict[FeasTag, int] = {}
    correct: dict[FeasTag, int] = {}
    for decision, tag in decisions:
        totals[tag] = totals.get(tag, 0) + 1
        expected = Decision.ACCEPT if tag in (FeasTag.GT, FeasTag.F) else Decision.REJECT
        if decision == expected:
            correct[tag] = correct.get(tag, 0) + 1
    return {tag: correct.get(tag, 0) / total for tag, total in totals.items()}


def safety_accuracy(
    decisions: Sequence[tuple[Decision, Safety, bool]]
) -> dict[tuple[Safety, bool], float]:
    """Accuracy split four ways by (safety tag, with/without context)."""
    totals: dict[tuple[Safety, bool], int] = {}
    correct: dict[tuple[Safety, bool], int] = {}
    for decision, safety, with_context in decisions:
        key = (safety, bool(with_context))
        totals[key] = totals.get(key, 0) + 1
        expected = Decision.ACCEPT if safety is Safety.SAFE else Decision.REJECT
        if decision == expected:
            correct[key] = correct.get(key, 0) + 1
    return {key: correct.get(key, 0) / total for key, total in totals.items()}


@dataclass(frozen=True)
class GmmTrajectory:
    """Per-mode, per-step diagonal-Gaussian parameters (mu_x, mu_y, sigma_x, sigma_y)."""

    mu: np.ndarray  # (M, T, 2)
    sigma: np.ndarray  # (M, T, 2), strictly positive

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if mu.ndim != 3 or mu.shape[2] != 2 or sigma.shape != mu.shape:
            raise SchemaError(f"mu/sigma must both be (M, T, 2), got {mu.shape} / {sigma.shape}")
        if np.any(sigma <= 0):
            raise NonPositiveSigma("sigma values must be strictly positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    def best_mode(self, gt_xy: np.ndarray, t_select: Sequence[int]) -> int:
        return best_mode(self.mu, gt_xy, t_select)

    def nll(self, gt_xy: np.ndarray, gt_valid: np.ndarray, best: int, t_select: Sequence[int]) -> float:
        return gmm_nll(self.mu, self.sigma, gt_xy, gt_valid, best, t_select)


def best_mode(mode_xy: np.ndarray, gt_xy: np.ndarray, t_select: Sequence[int]) -> int:
    """Mode index minimizing the mean displacement at the selected steps; ties
    resolve to the lowest index."""
    mode_xy = np.asarray(mode_xy, dtype=float)
    gt_xy = np.asarray(gt_xy, dtype=float)
    steps = list(t_select)
    d = np.linalg.norm(mode_xy[:, steps, :] - gt_xy[None, steps, :], axis=2)
    return int(np.argmin(d.mean(axis=1)))


def gmm_nll(
    mu: np.ndarray,
    sigma: np.ndarray,
    gt_xy: np.ndarray,
    gt_valid: np.ndarray,
    best: int,
    t_select: Sequence[int],
) -> float:
    """Diagonal-Gaussian NLL of the best mode summed over the selected steps.

    Per step: log(sx) + log(sy) + ((dx/sx)^2 + (dy/sy)^2) / 2, additive
    constants omitted (they cancel in comparisons).
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    gt_xy = np.asarray(gt_xy, dtype=float)
    gt_valid = np.asarray(gt_valid, dtype=bool)
    steps = list(t_select)
    if np.any(sigma[best, steps, :] <= 0):
        raise NonPositiveSigma("sigma values must be strictly positive")
    if not np.all(gt_valid[steps]):
        raise NoValidOverlap("a selected step is invalid in the ground truth")
    delta = gt_xy[steps] - mu[best, steps, :]
    s = sigma[best, steps, :]
    per_step = np.log(s[:, 0]) + np.log(s[:, 1]) + 0.5 * ((delta[:, 0] / s[:, 0]) ** 2 + (delta[:, 1] / s[:, 1]) ** 2)
    return float(np.sum(per_step))


def score_loss(scores: np.ndarray, best: int) -> float:
    """Cross-entropy of sum-normalized mode scores against the best-mode one-hot.

    Scores are treated as nonnegative unnormalized probabilities; apply a
    softmax upstream when working with logits.
    """
    scores = np.asarray(scores, dtype=float)
    if np.any(scores < 0):
        raise SchemaError("scores must be nonnegative probabilities (softmax logits upstream)")
    total = float(scores.sum())
    if total <= 0:
        raise SchemaError("scores must not all be zero")
    p = scores[best] / total
    if p <= 0:
        return float("inf")
    return float(-np.log(p))


def combined_loss(nll: float, cross_entropy: float, pseudocode_literal: bool = False) -> float:
    """Trajectory loss combining NLL and score cross-entropy.

    The default is the standard additive composite NLL + CE;
    ``pseudocode_literal`` switches to NLL - CE.
    """
    return nll - cross_entropy if pseudocode_literal else nll + cross_entropy


@dataclass
class EvalReport:
    """Corpus-level evaluation summary; rates are in [0, 1]."""

    ifr_micro: Optional[float] = None
    ifr_macro: Optional[float] = None
    per_class_ifr: dict[str, float] = field(default_factory=dict)
    ifr_by_tag: dict[str, float] = field(default_factory=dict)
    classes_absent: list[str] = field(default_factory=list)
    min_ade: Optional[float] = None
    min_fde: Optional[float] = None
    feas_accuracy: dict[str, float] = field(default_factory=dict)
    safety_accuracy: dict[str, float] = field(default_factory=dict)
    n_rows: int = 0
    n_scored: int = 0
    n_missing_predictions: int = 0
    n_unclassifiable: int = 0

    def to_obj(self) -> dict:
        return {
            "ifr_micro": self.ifr_micro,
            "ifr_macro": self.ifr_macro,
            "per_class_ifr": dict(sorted(self.per_class_ifr.items())),
            "ifr_by_tag": dict(sorted(self.ifr_by_tag.items())),
            "classes_absent": sorted(self.classes_absent),
            "min_ade": self.min_ade,
            "min_fde": self.min_fde,
            "feas_accuracy": dict(sorted(self.feas_accuracy.items())),
            "safety_accuracy": dict(sorted(self.safety_accuracy.items())),
            "n_rows": self.n_rows,
            "n_scored": self.n_scored,
            "n_missing_predictions": self.n_missing_predictions,
            "n_unclassifiable": self.n_unclassifiable,
        }
