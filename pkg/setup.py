"""Build the optional compiled kernels; the package works without them."""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # no build tools: pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "polycusp._kernels",
                ["src/polycusp/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
