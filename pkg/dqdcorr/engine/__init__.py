"""Numerical engine: Hamiltonian, Gibbs states, correlation measures and sweeps."""
