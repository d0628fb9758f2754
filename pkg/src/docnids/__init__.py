"""One-class network anomaly detection toolkit.

Trains on benign flow records only: a dense network contracts benign
embeddings toward a fixed center, and per-dimension histograms of those
embeddings score how unusual new flows are.
"""

from .backend import BACKEND
from .data import (
    LabeledDataset,
    ScalerParams,
    SplitSpec,
    apply_scaler,
    fit_scaler,
    load_csv,
    split_benign,
    synth_generate,
)
from .hbos import HistogramSet, fit_histograms, hbos_score
from .nn import Activation, Gradients, MlpParams, backprop, forward, init_params, sgd_step
from .pipeline import DocModel, Verdict, classify, fit, load, save, score
from .svdd import SvddConfig, SvddModel, distance_score, embed, init_center, svdd_loss, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Activation",
    "DocModel",
    "Gradients",
    "HistogramSet",
    "LabeledDataset",
    "MlpParams",
    "ScalerParams",
    "SplitSpec",
    "SvddConfig",
    "SvddModel",
    "Verdict",
    "apply_scaler",
    "backprop",
    "classify",
    "distance_score",
    "embed",
    "fit",
    "fit_histograms",
    "fit_scaler",
    "forward",
    "hbos_score",
    "init_center",
    "init_params",
    "load",
    "load_csv",
    "save",
    "score",
    "sgd_step",
    "split_benign",
    "svdd_loss",
    "synth_generate",
    "train",
]
