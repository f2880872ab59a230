import os

from setuptools import setup

ext_modules = []
if os.environ.get("SVTAKAGI_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("svtakagi._lpcore", ["src/svtakagi/_lpcore.pyx"], extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
