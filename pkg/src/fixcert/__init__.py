"""Picard iteration through an auxiliary map, with a posteriori certificates."""

from .errors import (ControlError, DegenerateStepError, DomainError, FixcertError, FormatError,
                     HypothesisError, InvariantError, NonInjectiveError,
                     RectangularTailUnsupported, StateError, WindowError)
from .functions import GridFunc, PolyFunc, sup_distance, sup_norm
from .mappings import (NO_SAMPLES, AuxiliaryMap, ControlAlpha, ControlBeta, SelfMap,
                       TrackedPair, annulus_sup, check_geraghty, check_injective,
                       check_kannan_geraghty, check_weakly_contractive, check_weakly_kannan,
                       constant_alpha, constant_beta, induced_apply)
from .metric import (FiniteMetric, MetricSpace, distance, validate, validate_metric,
                     validate_rectangular)
from .picard import (Certificate, MonitorState, Orbit, apriori_tail_bound, certificate,
                     certify_at, geraghty_tail_Q, iterate, monitor_step, observed_ratio,
                     run_monitor, true_distance_to_limit, window_max)

__version__ = "0.1.0"
