from setuptools import Extension, setup

from Cython.Build import cythonize

# -ffp-contract=off: the pure-Python fallback must reproduce the kernel's
# arithmetic bit for bit, so fused multiply-adds are disabled.
ext = Extension(
    "mfinfer.gillespie._core",
    ["src/mfinfer/gillespie/_core.pyx"],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
