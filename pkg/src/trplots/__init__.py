"""Figure rendering for the beamforming experiment CSV artifacts."""

__version__ = "0.1.0"

from .figures import (EmptyTableError, FigureSpec, KINDS, default_spec,
                      render, render_all)

__all__ = ["EmptyTableError", "FigureSpec", "KINDS", "default_spec",
           "render", "render_all"]
