"""Python front end for the ddmlab diffuse-domain solver core."""

try:
    from ddmlab._ddmlab import *  # noqa: F401,F403  (installed layout)
    from ddmlab import _ddmlab as _core  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package on PYTHONPATH
    from _ddmlab import *  # noqa: F401,F403
    import _ddmlab as _core  # noqa: F401

__all__ = [name for name in dir(_core) if not name.startswith("_")]
