import io
from setuptools import setup

with io.open('README.rst', encoding = 'utf-8') as f:
	long_description = f.read()

setup(name='polyest',
    version='0.1.0',
    description='Polarization constants, l_p norm estimates and power-series radii',
    long_description = long_description,
    license='MIT',
    packages=['polyest', 'polyest.scripts', 'polyest.tests'],
    package_data={'polyest': ['data/example/*.dat', 'data/example/*.json']},
    include_package_data=True,
    entry_points={
        'console_scripts': ['polyest = polyest.scripts.polyest_run:main',
        'pe_write_config = polyest.scripts.pe_write_config:main'],
    },
    python_requires='>=3.8',
    install_requires=[
        'numpy', 'scipy',
        ],
    zip_safe=False)
