import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PTQUARTIC_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("ptquartic._kernels", ["src/ptquartic/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
