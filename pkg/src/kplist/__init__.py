"""CONGEST simulation and sparsity-aware K_p listing."""
