"""
Parser module for ALS input files.

This module provides parsing of the matrix/vector text format and of INI
run manifests.
"""

from als.parser.base import InputParser
from als.parser.matrix_parser import MatrixTextParser, format_matrix, format_number
from als.parser.manifest_parser import (ManifestParser, build_manifest, manifest_entries,
                                       parse_dims, parse_methods)

__all__ = ['InputParser', 'MatrixTextParser', 'ManifestParser', 'build_manifest',
           'format_matrix', 'format_number', 'manifest_entries', 'parse_dims',
           'parse_methods']
