import pathlib

from setuptools import find_packages, setup

here = pathlib.Path(__file__).parent.resolve()

# Get the long description from the README file
long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name="dgum",
    version="0.1.0",
    description="Fast sampling of discrete Markov random fields through discretized Gaussian fields",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="markov random field, gaussian random field, gibbs sampling, potts",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    entry_points={
        "console_scripts": ["dgum=dgum.shell:main"],
    },
    package_data={"dgum": ["presets.yaml"]},
    python_requires=">=3.12, <4",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pandas>=2.1",
        "voluptuous>=0.13",
        "PyYAML>=6.0",
        "colorlog>=6.7",
        "importlib_metadata>=6.0",
    ],
    extras_require={"test": ["pytest>=7.4"]},
    platforms="any",
    include_package_data=True,
)
