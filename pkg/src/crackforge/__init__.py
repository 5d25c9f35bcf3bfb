"""Stage-conditioned crack-mask growth and crack morphology statistics."""

__version__ = "0.1.0"

from .evaluation import l1_distance, psnr, quality_report, ssim, stage_delta_report
from .mask_core import PixelCoord, draw_line, load_mask, saturation, save_mask
from .morphometry import (
    StageStats,
    continuity_loss,
    half_thickness,
    mean_thickness,
    partition_stages,
    saturation_loss,
    severity_score,
    stage_statistics,
    thickness_loss,
)
from .orientation import Endpoint, LeeParams, estimate_orientation, filter_endpoints
from .propagation import PropagationParams, WalkTrace, elongate_to_target, propagate
from .skeleton import detect_endpoints, neighbor_counts, skeletonize
from .synthesis import TranslationRequest, TranslationResult, morphology_score, thicken, translate_stage

__all__ = [
    "Endpoint", "LeeParams", "PixelCoord", "PropagationParams", "StageStats",
    "TranslationRequest", "TranslationResult", "WalkTrace",
    "continuity_loss", "detect_endpoints", "draw_line", "elongate_to_target",
    "estimate_orientation", "filter_endpoints", "half_thickness", "l1_distance",
    "load_mask", "mean_thickness", "morphology_score", "neighbor_counts",
    "partition_stages", "propagate", "psnr", "quality_report", "saturation",
    "saturation_loss", "save_mask", "severity_score", "skeletonize", "ssim",
    "stage_delta_report", "stage_statistics", "thicken", "thickness_loss",
    "translate_stage",
]
