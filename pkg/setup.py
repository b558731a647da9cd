from setuptools import setup, find_packages  
from shutil import rmtree

NAME = "power_free"

# setup
setup(name=NAME, 
      version="0.1",
      license="MIT",
      python_requires=">=3.10",
      install_requires=['pandas', 'numpy', 'sympy', 'mpmath',
                        'networkx>=3.2', 'ortools'], 
      packages = find_packages(exclude=["tests"]))

# remove build and metadata
rmtree(f"{NAME}.egg-info", ignore_errors=True)
rmtree("dist", ignore_errors=True)
rmtree("build", ignore_errors=True)
