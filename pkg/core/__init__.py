"""
Core computations: scalars, subspaces, relations, algebras, reflexivity and the quantum torus
"""
