"""Douglas-Rachford restoration of images with values in Hadamard manifolds."""
