"""Non-perturbative Unruh-DeWitt qubit channels: channel structure, field-side
two-point functions, Petz recovery gaps and a truncated-mode oracle."""

__version__ = "0.1.0"
