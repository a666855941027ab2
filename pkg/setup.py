from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='adelic-zeta',
    packages=find_packages(where='.', exclude=['test', 'test.*'], include=['adelic_zeta', "adelic_zeta.*"]),
    package_data={
        'adelic_zeta': ['py.typed', 'fields/*.json']
    },
    version='1.0.0',
    install_requires=['numpy>=1.21', 'scipy>=1.7'],
    extras_require={
        'test': ['mypy', 'coverage', 'mpmath'],
        'dev': ['mypy', 'ipdb', 'autopep8', 'coverage', 'mpmath']
    },
    entry_points={
        'console_scripts': ['adelic-zeta = adelic_zeta.cli:main']
    },
    description='Arithmetic cohomology, lattice stability and non-abelian zeta functions of number fields',
    long_description=long_description,
    license='MIT',
    keywords=['zeta', 'number field', 'lattice', 'theta series', 'arithmetic cohomology', 'harder-narasimhan'],
    python_requires='>=3.8',
    classifiers=[
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Development Status :: 4 - Beta",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
