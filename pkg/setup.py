from setuptools import setup, find_packages

setup(
    name="isofill",
    version="1.0",
    description="Exact homological filling norms and empirical isoperimetric profiles of finite complexes",
    packages=find_packages(),
    entry_points={"console_scripts": ["isofill=isofill.cli:main"]},
)
