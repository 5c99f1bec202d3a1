"""
Hyperdiff - differentials as algebraic objects over a truncated Levi-Civita field
"""
