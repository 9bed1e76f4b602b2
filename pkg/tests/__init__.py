"""Test suite for doppler-velocimetry."""
