"""Zeros of truncated and Euler-accelerated sections of the zeta function."""
from .sections import Rearrangement, Section, SectionSpec, section_eval
from .special import ComplexPoint, Tolerance
from .tracker import PairTrajectory, TrackerConfig, TrackingLoss, track_pair

__all__ = ["ComplexPoint", "PairTrajectory", "Rearrangement", "Section", "SectionSpec",
           "Tolerance", "TrackerConfig", "TrackingLoss", "section_eval", "track_pair"]
