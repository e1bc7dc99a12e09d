"""objsynth: synthetic training-image pipeline.

Physics-settled object arrangements on polygonal stages, visibility-gated
camera sampling, tiered path-traced rendering with full ground-truth
annotations (2D box, segmentation mask, 6D pose), a baseline compositor
over real photographs, and mAP@.75IoU evaluation.
"""

__version__ = "0.1.0"
