"""Test package for the collision model simulator."""
