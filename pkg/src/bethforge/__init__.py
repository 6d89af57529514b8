"""Beth-model workbench for typed intuitionistic functionals."""

__version__ = "0.1.0"
