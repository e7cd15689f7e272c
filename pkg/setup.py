import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "rwg._kernels",
        ["src/rwg/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        # results must match the pure-Python fallback bit-for-bit: no fast-math,
        # no fma contraction, and no sin+cos -> sincos fusion (glibc's sincos
        # rounds differently from separate sin/cos calls for |x| > pi)
        extra_compile_args=[
            "-O2",
            "-ffp-contract=off",
            "-fno-fast-math",
            "-fno-builtin-sin",
            "-fno-builtin-cos",
            "-fno-builtin-sincos",
        ],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        libraries=["m"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False, "cdivision": True},
    )
)
