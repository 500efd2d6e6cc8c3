"""Popularity models and benchmark placement policies."""
