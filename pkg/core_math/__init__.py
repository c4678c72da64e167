"""Bit vectors, states, Walsh-Hadamard transform and the shared error types"""
