"""
Shared library for the Riemannian quantization workflows.

This package provides the geometry and algorithms used by the
manifoldsamples, manifoldquantization and airtraffic scripts:
- manifold_core: manifold ids, points, tangent vectors, the Geometry contract
- constant_curvature: circle, sphere and hyperbolic half-plane
- spd: affine-invariant geometry of SPD matrices
- sampling: seeded generators (uniform, von Mises, vMF, hyperbolic Gaussian)
- quantization: CLRQ, Voronoi cells, distortion, Karcher means
- transport: discrete Wasserstein distances
- quantization_io / cache_manager / svg_plot: config, artifacts, caching, plots

Usage:
    from shared.manifold_core import ManifoldId
    from shared.sampling import sample_von_mises
    from shared.quantization import clrq_run
"""

__version__ = "1.0.0"
