"""Build script: compiles the optional sweep kernel extension.

The package is pure Python plus one Cython extension for the diametric-sweep
inner loop.  If Cython or a C compiler is unavailable the build degrades to
the NumPy fallback kernel automatically (see grassmannlab.kernels).
"""

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "grassmannlab._sweepkern",
        ["src/grassmannlab/_sweepkern.pyx"],
        extra_compile_args=["-O3", "-ffast-math"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions())
