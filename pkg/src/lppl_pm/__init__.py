"""Unsupervised failure prediction from log-periodic power law fits."""
from .backtest import BacktestConfig, BacktestReport, run_backtest
from .changepoint import Detection, DetectorState, detector_update, run_dual_detectors
from .detector import (
    EventClass,
    IbAlert,
    IbDecision,
    RootCause,
    classify,
    decide,
    failure_window,
    find_extrema,
    group_alerts,
    is_ib_point,
    predict_root_cause,
)
from .estimators import DualCusumDetector, IBPointDetector, LpplFitter
from .evaluation import GroundTruthEvent, MatchLabel, match_alerts, precision_recall
from .exceptions import *  # noqa: F401,F403
from .fitter import FitConstraints, FitResult, fit_best, fit_window, solve_linear
from .model import LpplParams, TransformKind, eval_lppl, fit_mse
from .series import TimeSeries, load_series, save_series, window
from .synthetic import HazardParams, SynthSpec, degradation_path, gen_lppl_series, hazard

__version__ = "0.1.0"
