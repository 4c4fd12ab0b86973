import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        args = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DQSUM_BUILD_PYTHON=ON",
            "-DQSUM_BUILD_TESTS=OFF",
            "-DCMAKE_BUILD_TYPE=Release",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
        ]
        try:
            import pybind11

            args.append(f"-Dpybind11_DIR={pybind11.get_cmake_dir()}")
        except ImportError:
            pass  # fall back to the system pybind11 config
        subprocess.check_call(args)
        subprocess.check_call(
            ["cmake", "--build", str(build_dir), "--target", "_qsum", "--parallel"]
        )


setup(
    ext_modules=[CMakeExtension("qsum._qsum")],
    cmdclass={"build_ext": CMakeBuild},
)
