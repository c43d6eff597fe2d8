"""
Report module for the ALS toolkit.

This module provides the writer for trace, sweep, stability and metadata
artifacts.
"""

from als.report.writer import ReportWriter

__all__ = ['ReportWriter']
