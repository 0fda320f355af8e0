"""Build script for the optional compiled search kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed, not functionality.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "csitrack._profile_kernel",
                ["src/csitrack/_profile_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"csitrack: skipping compiled kernel ({exc}); pure-Python fallback "
          "will be used", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
