#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

setup(
    name='apmlr',
    version='0.3.0',
    description='Approximate posterior matching for active logistic '
                'regression: selection policies and benchmark harness',
    license='BSD-3-Clause-Clear',
    packages=find_packages(exclude=['tests', 'tests.*']),
    python_requires='>=3.7',
    install_requires=[
        'pbcommand >= 1.1.1',
        'numpy >= 1.17',
        'scipy >= 1.4',
        'pandas >= 1.0',
    ],
    tests_require=[
        'nose2',
        'POT >= 0.8',
    ],
    test_suite='nose2.collector.collector',
    entry_points={'console_scripts': [
        'apm = apmlr.apmrunner:main',
    ]}
)
