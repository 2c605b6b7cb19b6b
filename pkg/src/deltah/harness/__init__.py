"""Generators, oracles and property drivers for the metatheory."""
