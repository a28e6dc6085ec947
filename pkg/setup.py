import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RSREPAIR_NO_NATIVE") != "1":
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "rsrepair._kern._core",
            ["src/rsrepair/_kern/_core.pyx"],
            extra_compile_args=["-O3"],
        )
        # Missing compiler must not break the install; the package falls
        # back to the pure-Python kernels at import time.
        ext.optional = True
        ext_modules = cythonize([ext], language_level=3)
    except ImportError:
        pass

setup(ext_modules=ext_modules)
