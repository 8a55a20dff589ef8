"""Symmetric functions of two noncommuting variables, at matrix scale."""
