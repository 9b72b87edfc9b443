from .scenarios import LabeledTrajectory, ScenarioSpec, TrueSegment, generate

__all__ = ['LabeledTrajectory', 'ScenarioSpec', 'TrueSegment', 'generate']
