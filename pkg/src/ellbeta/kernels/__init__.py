"""Kernel functions, certificate functions and parameter-domain checks."""
