"""Builds the optional compiled kernel extension.

The package works without it (the NumPy fallback is selected at import
time), so the extension is marked optional: installation succeeds even
where no C toolchain is available.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "askbayes._kernels._ckernels",
                ["src/askbayes/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
