"""Outer layer: particle swarm over antenna positions."""
