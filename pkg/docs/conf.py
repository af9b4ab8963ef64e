"""Sphinx configuration."""

import os
import sys

import subjetlab

# automodapi pages of the larger modules nest deeply
sys.setrecursionlimit(2000)

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx_automodapi.automodapi",
    "sphinx_automodapi.smart_resolver",
]

source_suffix = ".rst"
master_doc = "index"

project = "subjet-lab"
copyright = "2026 subjet-lab developers"
author = "subjet-lab developers"

version = subjetlab.__version__
release = version

exclude_patterns = ["_build", "README.rst"]
pygments_style = "sphinx"

# `text` cross-links Python objects
default_role = "py:obj"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "sympy": ("https://docs.sympy.org/latest/", None),
}

linkcheck_retries = 2

# -- HTML ---------------------------------------------------------------------

html_theme = "alabaster"
html_theme_options = {"description": "Exact nonsmooth variational analysis"}
html_short_title = project
html_context = {
    "display_github": True,
    "github_user": "subjet-lab",
    "github_repo": "subjet-lab",
    "conf_py_path": "docs/",
    "github_version": os.getenv("GITHUB_REF", default="main") + "/",
}
html_static_path: list = []
html_show_sourcelink = False
html_copy_source = False

# -- API reference ------------------------------------------------------------

# Docstrings follow the numpy convention (see setup.cfg, flake8).
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_include_special_with_doc = True
napoleon_use_param = True
napoleon_use_rtype = True

automodapi_inheritance_diagram = False
automodapi_toctreedirnm = "api"
automodsumm_inherited_members = True
autodoc_inherit_docstrings = True
autoclass_content = "class"
