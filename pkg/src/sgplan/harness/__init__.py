"""Bundled assets, the end-to-end pipeline, trial runner and reports."""
