#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

SCRIPTS = [
    'utils',
    'gen_sbm',
    'vicinity_multiprocessing',
    'epd_multiprocessing',
    'diagram_distance',
    'diagram2image',
    'image_error',
    'train',
    'predict',
    'benchmark',
    ]

setup(
    name='graph2epd',
    version='1.0.0',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    py_modules=SCRIPTS,
    scripts=['g2e.py'],
    python_requires='>=3.9',
    install_requires=[
        'torch>=2.1.2',
        'numpy<2',
        'pandas>2',
        'scipy>=1.10',
        'scikit-learn>1.4,<2',
        'joblib>1.3',
        'tqdm',
        'openpyxl>=3',
        ],
    extras_require={
        'test': [
            'pytest',
            'hypothesis',
            'networkx>=3.1',
            ],
    },
)
