from setuptools import setup, find_packages

setup(
    name="cliqueann",
    version="0.1.0",
    packages=find_packages(include=["cliqueann", "cliqueann.*"]),
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "matplotlib",
        "numba",
        "PyYAML",
    ],
    entry_points={"console_scripts": ["cliqueann = cliqueann.cli:main"]},
    python_requires=">=3.9",
)
