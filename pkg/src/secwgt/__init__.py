"""Exact mod-2 lower bounds for sectional category.

Decides weight, module weight and the secondary-operation obstruction behind
secondary module weight on finite modules over the mod-2 Steenrod algebra.
"""

__version__ = "0.1.0"
