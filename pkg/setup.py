import os

from setuptools import setup

ext_modules = []
if os.environ.get("CYCLOPROJ_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/cycloproj/_ckernels.pyx"],
            language_level=3,
        )
        include_dirs = [numpy.get_include()]
    except Exception:
        ext_modules = []

setup(ext_modules=ext_modules)
