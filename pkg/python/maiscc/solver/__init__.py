"""Inner-layer solvers and their brute-force reference oracles."""
