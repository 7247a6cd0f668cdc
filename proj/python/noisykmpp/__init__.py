"""Noisy k-means++ seeding and the adversarial sampling game."""

try:
    from . import _noisykmpp as _ext  # installed layout
except ImportError:  # build-tree layout: extension on sys.path
    import _noisykmpp as _ext

globals().update({k: v for k, v in vars(_ext).items() if not k.startswith("_")})
__all__ = sorted(k for k in vars(_ext) if not k.startswith("_"))
__doc__ = _ext.__doc__
