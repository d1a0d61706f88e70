# src/scenarios/__init__.py

# This file is intentionally left blank to mark the scenarios package.
