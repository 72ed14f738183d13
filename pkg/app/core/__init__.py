"""Core package - exact arithmetic and instanton sums"""
