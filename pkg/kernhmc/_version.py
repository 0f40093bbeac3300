"""Version lookup for installed and source-tree copies of the package"""

FALLBACK_VERSION = "0.1.0.dev0"


def get_versions():
    try:
        from importlib.metadata import version, PackageNotFoundError
    except ImportError:  # Python < 3.8
        return {"version": FALLBACK_VERSION}
    try:
        return {"version": version("kernhmc")}
    except PackageNotFoundError:
        return {"version": FALLBACK_VERSION}
