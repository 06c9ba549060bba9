#!/usr/bin/env python

import os

import setuptools


def read(filename):
    return open(os.path.join(os.path.dirname(__file__), filename)).read()


setuptools.setup(
    name='ofdm-cvqkd',
    version=read('VERSION').strip(),
    description='Modulation noise and key rate model for OFDM multi-carrier CV-QKD',
    long_description=read('README.md'),
    long_description_content_type='text/markdown',
    license='Apache License 2.0',
    packages=setuptools.find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'click',
        'Flask>=2.0.1',
        'numpy>=1.20',
        'PyYAML',
        'scipy>=1.7',
        'StrEnum',
    ],
    include_package_data=True,
    package_data={
        'ofdmqkd': ['presets/*.yaml']
    },
    zip_safe=False,
    entry_points={
        'console_scripts': [
            'ofdmqkd = ofdmqkd.commands:main'
        ]
    },
    keywords='cv-qkd ofdm quantum key distribution modulation noise',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.9',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    python_requires='>=3.9'
)
