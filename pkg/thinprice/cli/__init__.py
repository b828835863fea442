"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/cli/__init__.py
    Module: CLI Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Command-line interface for ThinPrice built with Typer and Rich.

Usage:
    $ thinprice --help
    $ thinprice run --config study.json
"""

from thinprice.cli.app import app, main

__all__ = ["app", "main"]
