"""Monte Carlo Tree Search simulator for a lattice search game."""
