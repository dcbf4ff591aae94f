# app/services/__init__.py
"""
Service layer for the channel computations.

One service per domain module: states, channels, purity, optimization,
sweeps, perturbation, boundary tables, majorization and verification.
"""

from .state_service import StateService, get_state_service
from .channel_service import ChannelService, get_channel_service
from .purity_service import PurityService, get_purity_service
from .optimization_service import OptimizationService, get_optimization_service
from .sweep_service import SweepService, get_sweep_service
from .perturbation_service import PerturbationService, get_perturbation_service
from .boundary_service import BoundaryService, get_boundary_service
from .majorization_service import MajorizationService, get_majorization_service
from .verification_service import VerificationService, get_verification_service

__all__ = [
    "StateService",
    "get_state_service",
    "ChannelService",
    "get_channel_service",
    "PurityService",
    "get_purity_service",
    "OptimizationService",
    "get_optimization_service",
    "SweepService",
    "get_sweep_service",
    "PerturbationService",
    "get_perturbation_service",
    "BoundaryService",
    "get_boundary_service",
    "MajorizationService",
    "get_majorization_service",
    "VerificationService",
    "get_verification_service",
]
