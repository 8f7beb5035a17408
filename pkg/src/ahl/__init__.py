"""Access Hoare logic toolchain for a small While language."""

__version__ = "0.1.0"
