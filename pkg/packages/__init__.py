"""
Phase-coherent Doppler velocimetry packages.
"""
