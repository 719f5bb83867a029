from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rahgd._kernels._stepkernels",
                ["src/rahgd/_kernels/_stepkernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,  # fall back to the pure-python kernels on build failure
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
