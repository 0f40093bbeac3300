#
# kernhmc documentation build configuration file
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os.path as op
import datetime

package_path = op.abspath(op.join(op.dirname(op.abspath(__file__)), "..", ".."))
sys.path.insert(0, package_path)
from kernhmc import __version__, __authors__  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.todo",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.autosectionlabel",
    "sphinx_click.ext",
    "numpydoc",
]

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "kernhmc"
author = ", ".join(a for a, _ in __authors__)
copyright = "{}, {}".format(datetime.datetime.now().year, author)

version = ".".join(__version__.split(".")[:2])
release = __version__

language = None

exclude_patterns = []

pygments_style = "lovelace"
pygments_dark_style = "fruity"

todo_include_todos = True

numpydoc_show_class_members = False

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
}

# -- Options for HTML output ----------------------------------------------

html_theme = "furo"

html_theme_options = {
    "light_css_variables": {
        "color-brand-primary": "#2d5f7b",
        "color-brand-content": "#2d5f7b",
    },
    "dark_css_variables": {
        "color-brand-primary": "#5e9bb9",
        "color-brand-content": "#5e9bb9",
    },
}

html_title = "kernhmc v{}".format(__version__)

htmlhelp_basename = "kernhmc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
    "papersize": "a4paper",
}

latex_documents = [
    (master_doc, "kernhmc.tex", "kernhmc Documentation", author, "manual"),
]

man_pages = [(master_doc, "kernhmc", "kernhmc Documentation", [author], 1)]
