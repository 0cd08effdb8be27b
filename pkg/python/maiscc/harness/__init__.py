"""Scenarios, baselines, sweeps and validation runs."""
