from pathlib import Path

PACKAGE_NAME = "kernhmc"
PACKAGE_ROOT = Path(__file__).parent
CODE_URL = f"https://github.com/kernhmc/{PACKAGE_NAME}"

__authors__ = [("kernhmc developers", "kernhmc@users.noreply.github.com")]

install_requires = [
    "numpy>=1.22",
    "scipy>=1.8",
    "attrs>=22.1",
    "click>=7.1.2",
    "PyYAML>=6.0",
]

tests_require = [
    "pytest>=5.4.3",
    "pytest-cov>=2.12.1",
]

docs_require = [
    "docutils>=0.10",
    "numpydoc>=0.6.0",
    "sphinx-click>=3.1",
    "furo>=2022.2.14.1",
]

dev_requires = ["black>=21.4b2", "pre-commit>=2.19.0"]

all_requires = install_requires + tests_require + docs_require + dev_requires

python_versions = ["3.8", "3.9", "3.10", "3.11"]
