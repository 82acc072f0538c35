"""Explanation-bundle exporter: real explainers over small tabular models."""

from .export import ExportJob, export, run_export

__all__ = ["ExportJob", "export", "run_export"]
