"""Monte Carlo simulation of the Poisson network model."""
