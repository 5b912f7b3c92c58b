"""Builds the _drlqg extension by driving the project's CMake build.

The CMake tree is the single source of truth for compilation; this shim
configures it with only the bindings enabled and drops the resulting
extension module into the python package.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DDRLQG_BUILD_TESTS=OFF",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_drlqg",
             "--parallel"],
            check=True,
        )
        staged = list((build_dir / "python" / "drlqg").glob("_drlqg*.so"))
        if not staged:
            raise RuntimeError("CMake build produced no _drlqg extension")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(staged[0], target)


setup(
    ext_modules=[CMakeExtension("drlqg._drlqg")],
    cmdclass={"build_ext": CMakeBuild},
)
