"""Search game engine: lattice geometry, targets, walkers and UCT."""
