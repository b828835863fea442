"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/utils/__init__.py
    Module: Utilities Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Logging setup and atomic file output shared by the pipeline and CLI.

Contents:
    Submodules:
        - logs: Rich-rendered logging configured from THINPRICE_LOG
        - io: Write-then-rename file output and deterministic JSON
"""

from thinprice.utils.io import atomic_write_json, atomic_write_text, dumps_json
from thinprice.utils.logs import configure_logging

__all__ = ["atomic_write_json", "atomic_write_text", "configure_logging", "dumps_json"]
