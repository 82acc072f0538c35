"""qgforge: quality-gate lifecycle repositories and explanation scoring.

A validated, versioned, queryable graph of quality gates over the AI
lifecycle, plus a numerical fidelity-robustness evaluator for
feature-importance explanations.
"""

__version__ = "0.1.0"
