import sys
from pathlib import Path
from setuptools import setup, find_packages

# Get version from module inside package
sys.path.insert(0, str(Path(__file__).parent / "kernhmc"))
from __about__ import (
    PACKAGE_NAME,
    CODE_URL,
    install_requires,
    tests_require,
    dev_requires,
    docs_require,
    all_requires,
    python_versions,
)  # noqa pylint: disable=no-name-in-module

sys.path.pop(0)


setup(
    name=PACKAGE_NAME,
    version="0.1.0.dev0",
    author="kernhmc developers",
    author_email="kernhmc@users.noreply.github.com",
    packages=find_packages(exclude=["tests", "test"]),
    package_data={"kernhmc.targets": ["fixtures/*.yaml"]},
    url=CODE_URL,
    license="Apache License, Version 2.0",
    description=(
        "Gradient-free kernel Hamiltonian Monte Carlo with score-matching "
        "surrogates"
    ),
    long_description=open("README.rst").read(),
    install_requires=install_requires,
    tests_require=tests_require,
    entry_points={
        "console_scripts": [
            "kernhmc=kernhmc.cli:cli",
        ]
    },
    extras_require={
        "test": tests_require,
        "docs": docs_require,
        "dev": dev_requires,
        "all": all_requires,
    },
    classifiers=(
        [
            "Development Status :: 3 - Alpha",
            "Intended Audience :: Science/Research",
            "License :: OSI Approved :: Apache Software License",
            "Natural Language :: English",
            "Topic :: Scientific/Engineering :: Mathematics",
        ]
        + ["Programming Language :: Python :: " + str(v) for v in python_versions]
    ),
    keywords="mcmc hamiltonian monte carlo kernel score matching pseudo-marginal",
)
