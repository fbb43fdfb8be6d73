#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages


with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = [
    'pandas',
    'numpy>=1.17',
    'scipy>=1.2'
]

test_requirements = [
    'pytest'
] + requirements

setup(
    name='smdsim',
    version='0.1.0',
    description="Stochastic mirror descent, gradient-free and online "
                "learning experiments with traffic equilibrium applications.",
    long_description=readme + '\n\n' + history,
    author="Franz Woellert",
    author_email='franz.woellert@gmail.com',
    packages=find_packages(exclude=['tests']),
    package_data={'smdsim.transport': ['instances/*.json']},
    install_requires=requirements,
    python_requires='>=3.6',
    entry_points={
        'console_scripts': ['smdsim=smdsim.cli:main']
    },
    license="MIT license",
    zip_safe=False,
    keywords='smdsim mirror descent zeroth order traffic equilibrium',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
    ],
    test_suite='tests',
    tests_require=test_requirements
)
