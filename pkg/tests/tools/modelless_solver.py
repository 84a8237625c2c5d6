#!/usr/bin/env python3
"""Solver stand-in that claims satisfiability but never prints a model."""

print("s SATISFIABLE")
