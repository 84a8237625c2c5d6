#!/usr/bin/env python3
"""Solver stand-in that emits nonsense (no status line)."""

print("hello from a confused solver")
