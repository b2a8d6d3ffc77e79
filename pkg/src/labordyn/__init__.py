"""labordyn: predator-prey dynamics of labor-market dissimilarities.

Three coupled dissimilarity levels (balance of workers as resources, worker
stock as prey, active employers as predators) are simulated with RK4,
their equilibria computed in closed form or by fixed-point iteration, and
the monthly aggregate records that feed the model are parsed, validated and
turned into Minkowski dissimilarities.
"""
from .analysis import PeakSet, RelaxationReport, find_peaks, find_troughs, lagged_correlation, phase_lag, relaxation_metric
from .dissimilarity import (DissimilarityMatrix, DissimilaritySeries, build_matrix, minkowski_distance,
                            observational_scales, series_from_records)
from .equilibrium import (EquilibriumMethod, EquilibriumPoint, equilibrium, equilibrium_holling_k2zero, equilibrium_lv,
                          resource_level_given_prey, verify_equilibrium)
from .export import (PlotSpec, export_equilibrium, export_matrix, export_report, export_series, export_trajectory,
                     read_matrix, read_trajectory, render_svg)
from .ingestion import (Dataset, LaborRecord, Period, load_dataset, load_caged_1996, parse_dataset, serialize_dataset,
                        validate_balances)
from .integrator import IntegrationConfig, Trajectory, integrate, order_check, sign_changes
from .model import (HOLLING, LV, FunctionalResponseKind, ModelParams, ScaleSchedule, StateVector, derivative,
                    derivative_blasius, functional_response)

__version__ = "0.1.0"
