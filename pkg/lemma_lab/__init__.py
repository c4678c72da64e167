"""Numeric checks of the correlated-distribution lemmas"""
