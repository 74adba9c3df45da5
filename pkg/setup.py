#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from setuptools import setup, find_packages


NAME = "schrolab"
VERSION = "0.1.0"
DESCRIPTION = """Weak-type estimates of Schrödinger groups, measured"""
LONG_DESCRIPTION = open('README', 'r').read()
AUTHOR = """schrolab authors"""
LICENSE = "MIT"
CLASSIFIERS = [
    "Development Status :: 2 - Pre-Alpha",
    "Environment :: Console",
    "Intended Audience :: Science/Research",
    "License :: OSI Approved :: MIT License",
    "Operating System :: POSIX :: Linux",
    "Programming Language :: Python",
    "Programming Language :: Python :: 3",
    "Topic :: Scientific/Engineering :: Mathematics",
]
PACKAGES = find_packages('src')
PACKAGE_DIR = {'': 'src'}
PACKAGE_DATA = {'schrolab': ['suites/*.yaml']}
INSTALL_REQUIRES = ['PyYAML', 'numpy', 'scipy']
EXTRAS_REQUIRE = {'tests': ['pytest']}
ENTRY_POINTS = {
    'console_scripts': [
        'schrolab = schrolab:main',
    ],
}


setup(name=NAME,
      version=VERSION,
      description=DESCRIPTION,
      long_description=LONG_DESCRIPTION,
      author=AUTHOR,
      license=LICENSE,
      classifiers=CLASSIFIERS,
      packages=PACKAGES,
      package_dir=PACKAGE_DIR,
      package_data=PACKAGE_DATA,
      install_requires=INSTALL_REQUIRES,
      extras_require=EXTRAS_REQUIRE,
      entry_points=ENTRY_POINTS)


