"""Sphinx configuration of the bgwqsd documentation."""

import os
import sys

sys.path.insert(0, os.path.abspath(".."))
import bgwqsd  # noqa: E402

project = "bgwqsd"
copyright = "2026, bgwqsd developers"
version = release = bgwqsd.__version__

# docstrings use the Google layout (Args/Returns/Raises)
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
]
master_doc = "index"
exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "sphinx_rtd_theme"
html_static_path = []

man_pages = [("index", "bgwqsd", "bgwqsd Documentation", ["bgwqsd developers"], 1)]
