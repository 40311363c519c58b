"""Build the optional Cython kernels; the package works without them."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [Extension("genjac.supersingular._ckernels", ["src/genjac/supersingular/_ckernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
