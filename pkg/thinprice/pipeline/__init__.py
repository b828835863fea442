"""
Metadata:
    Project: ThinPrice
    File Name: __init__.py
    File Path: thinprice/pipeline/__init__.py
    Module: Pipeline Package
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Stage orchestration and run-directory artifacts.

Contents:
    Submodules:
        - runner: Pipeline stages, failure isolation, run manifest
        - reports: CSV / JSON emitters and Rich table rendering
"""
