"""Simulator and analysis toolkit for group motor synchronisation.

A network of heterogeneous, nonlinearly coupled phase oscillators stands
in for a group of players coordinating oscillatory hand motions under
different visual-interaction topologies. The package integrates the
network dynamics, computes individual/group/dyadic synchronisation
indices, runs the structural prediction studies, calibrates the
coupling strength against target indices, and provides the
measurement pipeline used to extract phases and natural frequencies
from recorded position signals.
"""

from .errors import ConfigurationError, GroupsyncError, SignalError, StatisticsError
from .graphs import AdjacencyMatrix, complete, custom, path, ring, ring_minus_edge, star
from .ensemble import (FrequencyProfile, FrequencySignal, builtin_profiles,
                       coefficient_of_variation, constant_frequencies, individual_cv,
                       profile_by_name, sample_frequencies)
from .dynamics import (PhaseTrajectory, TrialConfig, integrate_signal, integrate_signals,
                       integrate_trial, kuramoto_rhs, synth_positions, trajectory_to_csv)
from .metrics import (SyncReport, cluster_phase, cluster_phase_series, dyadic_sync,
                      dyadic_table, group_sync, group_sync_t, individual_sync,
                      trial_report, wrap)
from .sigproc import (MarkerSeries, despike, estimate_frequency_fourier,
                      estimate_frequency_hilbert, hilbert_phase, interpolate_gaps,
                      pca_project)
from .stats import (AnovaResult, betainc_reg, describe, f_sf, one_way_anova,
                    welch_anova, welch_t)
from .harness import (CalibrationResult, ExperimentSpec, TargetTable, TopologyAggregate,
                      calibrate_coupling, dispersion_pattern, prediction_suite,
                      reproduce_tables, run_experiment, standard_topologies,
                      synthetic_profile)

__version__ = "0.1.0"
