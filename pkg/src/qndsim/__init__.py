"""Finite-dimensional simulator of quantum measurement processes.

Certifies whether a read-out interaction is of the first kind or quantum
non-demolition under the weak, moderate and strong conditions, and evaluates
the bias, error and information of the resulting estimate.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .conditions import (ConditionReport, classify_measurement, conserve_interaction,
                         conserve_system, implication_report, moderate_violation,
                         strong_violation, vaidman_violation, weak_violation)
from .estimation import (EstimationReport, bias, conditional_mean_estimator,
                         counter_information_heuristic, evaluate_estimation_report,
                         mutual_information, squared_error)
from .linalg import commutator_norm, hermitian_expm, is_hermitian, is_unitary
from .measurement import (MeasurementModel, Observable, PostEnsemble, collapse,
                          joint_amplitudes, outcome_distribution, post_ensemble,
                          q_marginal_post, q_marginal_pre, sample_outcomes)
