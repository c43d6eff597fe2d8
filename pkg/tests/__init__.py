"""
Test package for the ALS toolkit.
"""
