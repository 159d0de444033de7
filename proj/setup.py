"""CMake-driven build of the _levyrotor extension (pybind/cmake_example pattern)."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp) / ext.name
        build_dir.mkdir(parents=True, exist_ok=True)
        cfg = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                str(Path(__file__).parent.resolve()),
                f"-DCMAKE_BUILD_TYPE={cfg}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
                "-DLKR_BUILD_TESTS=OFF",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_levyrotor",
             "-j", str(os.cpu_count() or 1)],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("_levyrotor")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
