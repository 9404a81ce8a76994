"""Build hook for the optional compiled rank kernel."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure-Python fallback is used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("opal._rankcore", ["src/opal/_rankcore.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )

setup(ext_modules=ext_modules)
