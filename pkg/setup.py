"""Setup configuration for Tailgate - DSS follow-up drive scenario generator."""

import re
from pathlib import Path

from setuptools import setup, find_packages

# Read README for long description
readme_file = Path(__file__).parent / 'README.md'
long_description = readme_file.read_text() if readme_file.exists() else ''

# Read requirements; test tooling and oracles go to the "test" extra
requirements_file = Path(__file__).parent / 'requirements.txt'
requirements = []
if requirements_file.exists():
    requirements = [
        line.split('#', 1)[0].strip()
        for line in requirements_file.read_text().splitlines()
        if line.strip() and not line.startswith('#')
    ]
TEST_PACKAGES = {'pytest', 'pytest-cov', 'scipy'}


def _package_name(requirement):
    return re.split(r'[<>=!~\[ ;]', requirement, maxsplit=1)[0].lower()


install_requires = [r for r in requirements if _package_name(r) not in TEST_PACKAGES]
test_requires = [r for r in requirements if _package_name(r) in TEST_PACKAGES]

setup(
    name='tailgate-dss',
    version='0.1.0',
    description='Synthetic follow-up drive scenarios with DSS (Difference Space Stopping) safety assessment',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='Tailgate Contributors',
    author_email='',
    packages=find_packages(include=['src', 'src.*']),
    python_requires='>=3.9',
    install_requires=install_requires,
    extras_require={'test': test_requires},
    entry_points={
        'console_scripts': [
            'tailgate=src.main:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering',
    ],
    include_package_data=True,
    zip_safe=False,
)
