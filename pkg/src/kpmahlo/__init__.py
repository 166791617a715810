"""Ordinal notations, Mahlo indices, finite reflection and an operator-controlled sequent calculus."""
