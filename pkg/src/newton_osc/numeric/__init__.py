"""Numeric back end: quadrature for the oscillatory form, dyadic sums,
sublevel volumes and rate fits."""
