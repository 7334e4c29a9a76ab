"""Quantization workflow: CLRQ runs, Frechet means, decay study."""
