"""
SETUP - Create Data Directories
===============================
Optional: every writer creates its parent directory on demand. Running this
once makes the default layout under TCH_DATA_DIR visible up front.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

import config  # noqa: E402


def create_directories():
    """Create the graph, hierarchy, query and report directories."""
    for directory in (config.GRAPH_DIR, config.HIERARCHY_DIR, config.QUERY_DIR,
                      config.REPORT_DIR):
        directory.mkdir(parents=True, exist_ok=True)
        print(f"  Ready: {directory}")

    print("\nNext steps:")
    print("  python main.py gen --grid 20 20 --seed 1 --queries 1000")
    print("  python main.py preprocess data/graphs/grid_20x20_s1.tdg")
    print("  python main.py verify data/graphs/grid_20x20_s1.tdg "
          "data/hierarchies/grid_20x20_s1.exact.tch")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (e.g. pip install -e .): package metadata only
        from setuptools import setup

        setup(
            name="td-contraction-hierarchies",
            version="0.1.0",
            package_dir={"": "src"},
            py_modules=[p.stem for p in (Path(__file__).parent / "src").glob("*.py")],
            install_requires=["pandas", "numpy", "pyarrow", "python-dotenv"],
        )
    else:
        create_directories()
