"""Experiment configuration, sweeps and result files."""
