"""
Instanton Engine
Exact computations of Nekrasov partition functions, blow-up formulas and
Mochizuki residues
"""

__version__ = "1.0.0"
__author__ = "Instanton Engine Team"
