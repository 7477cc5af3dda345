"""Shipped data files: geodetic exception table and output document schema."""
