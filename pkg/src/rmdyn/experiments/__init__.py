"""Reproducible Monte-Carlo experiments composing the walk, geometry and dynamics layers."""

from .base import (
    ClassLattice,
    ExperimentRecord,
    TrialOutcome,
    born_targets,
    empirical_distribution,
    total_variation,
)
from .born import run_born_experiment, run_half_probability
from .brownian import run_constrained_brownian
from .epr import joint_born_targets, make_two_lobe_pair, run_epr
from .product_form import run_device_product_form
from .qct import run_qct
from .slit import fringe_visibility, run_double_slit
from .zeno import run_zeno

__all__ = [
    "ClassLattice",
    "ExperimentRecord",
    "TrialOutcome",
    "born_targets",
    "empirical_distribution",
    "total_variation",
    "run_born_experiment",
    "run_half_probability",
    "run_constrained_brownian",
    "run_qct",
    "run_double_slit",
    "fringe_visibility",
    "run_epr",
    "make_two_lobe_pair",
    "joint_born_targets",
    "run_zeno",
    "run_device_product_form",
]
