"""Placement solvers for cache-enabled multi-tier networks."""
