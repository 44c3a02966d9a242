"""Numerical realisation of the Izergin-Korepin spin chain and checks of its closed-form identities."""

__version__ = "0.1.0"
