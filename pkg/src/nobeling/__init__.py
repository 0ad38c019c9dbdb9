"""Exact finite-sample embeddings into compact parts of codimension-2 Nöbeling spaces."""

from .geometry import AxisLine, MetricKind, diameter, dist, dist_point_line, point
from .lines import index_of_line, lines_through, nth_line, nth_rational
from .moves import MoveMap, bump_displacement, compose, push_away, straighten
from .game import Certificate, EmbeddingState, RunConfig, constant_C, delta_k, epsilon_k, play_round, run
from .codim import VoxelSet, classify, complement_connected, complement_nonempty

__version__ = "0.1.0"
