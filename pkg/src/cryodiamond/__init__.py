"""Optical cryocooling of NV- and SiV-doped diamond microcrystals."""

__version__ = "0.1.0"
