"""Rotation numbers of circle lifts and degree growth of rational maps."""
