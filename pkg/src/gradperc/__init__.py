"""Gradient-percolation simulator and critical-exponent laboratory for
site percolation on the triangular lattice."""

from .lattice import DualEdge, Region, box, box_boundary, dist, neighbors, x_of_edge
from .sampling import (Configuration, ProbabilityField, StripSpec,
                       gradient_field, homogeneous_field, sample,
                       sample_coupled, sample_strip)
from .connectivity import (ClusterLabels, CrossingQuery, crossing_probability,
                           has_crossing, label_clusters)
from .front import (BoundaryResult, FrontResult, FrontStats, check_uniqueness,
                    extract_front, front_stats, highest_occupied_crossing,
                    lowest_vacant_crossing, outer_boundary)
from .arms import ArmQuery, TwoArmQuery, arm_probability, has_polychromatic_arms, has_two_arms
from .scaling import (CharLengthParams, ExperimentSpec, ExponentFit,
                      characteristic_length, check_near_critical_relations,
                      fit_exponent, run_front_experiment)

__version__ = "0.1.0"
