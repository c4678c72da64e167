"""Exact and simulated quantum protocols for Fourier sampling and quantum sampling"""
