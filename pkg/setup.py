# setup.py en la raíz del proyecto
from setuptools import setup, find_packages

setup(
    name="mineria-mvap",
    version="1.0.0",
    packages=find_packages(where=".", exclude=["examples", "examples.*"]),
    package_dir={"": "."},
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26.0",
        "pandas>=2.2.0",
        "scipy>=1.13.0",
        "pydantic>=2.5.0",
        "tqdm>=4.66.0",
        "tabulate>=0.9.0",
    ],
    entry_points={
        "console_scripts": [
            "mvap=src.cli:main",
        ],
    },
)
