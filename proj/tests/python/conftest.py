import pathlib
import sys

root = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(root / "python"))
build = root / "build" / "bindings"
if build.exists():
    sys.path.insert(0, str(build))
