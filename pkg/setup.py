"""
Setup script for galband
"""

from pathlib import Path

from setuptools import setup, find_packages

HERE = Path(__file__).parent


def long_description() -> str:
    readme = HERE / 'README.md'
    if readme.exists():
        return readme.read_text(encoding='utf-8')
    return "galband - band structure toolkit for PT-symmetric GAL potentials"


def runtime_requirements() -> list:
    """Pinned runtime dependencies from dependencies.txt"""
    path = HERE / 'dependencies.txt'
    if not path.exists():
        return []
    lines = (line.strip() for line in path.read_text(encoding='utf-8').splitlines())
    return [line for line in lines if line and not line.startswith('#')]


setup(
    name="galband",
    version="1.0.0",
    description="Band edges, exact eigenstates, SUSY partners and Heun data for PT-symmetric GAL potentials",
    long_description=long_description(),
    long_description_content_type="text/markdown",
    author="galband developers",
    python_requires='>=3.10',
    py_modules=['config', 'schema', 'main'],
    packages=find_packages(include=['modules', 'pipeline', 'utils']),
    install_requires=runtime_requirements(),
    extras_require={
        'dev': ['pytest>=7.4.0', 'pytest-cov>=4.1.0', 'black>=23.0.0', 'flake8>=6.0.0', 'mypy>=1.6.0'],
    },
    entry_points={'console_scripts': ['galband=main:main']},
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords='elliptic functions, PT symmetry, band structure, quasi-exact solvability, Heun equation',
)
