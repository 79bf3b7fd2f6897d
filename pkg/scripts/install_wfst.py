#!/usr/bin/env python3
import os
import platform
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
MAIN_PY = PROJECT_ROOT / "main.py"

WINDOWS_DEFAULT_BIN = Path(os.environ.get("USERPROFILE", str(Path.home()))) / "bin"
UNIX_DEFAULT_BIN = Path.home() / ".local" / "bin"

CMD_NAME = "wfst"


def ensure_dir(path: Path):
    path.mkdir(parents=True, exist_ok=True)
    return path


def is_on_path(path: Path) -> bool:
    target = path.resolve()
    return any(entry and Path(entry).resolve() == target
               for entry in os.environ.get("PATH", "").split(os.pathsep))


def install_windows(target_dir: Path, py_exe: str = sys.executable):
    ensure_dir(target_dir)
    cmd_path = target_dir / f"{CMD_NAME}.cmd"
    ps1_path = target_dir / f"{CMD_NAME}.ps1"

    cmd_path.write_text(f"""@echo off
setlocal
"{py_exe}" "{MAIN_PY}" %*
exit /b %ERRORLEVEL%
""", encoding="utf-8")

    ps1_path.write_text(f"""
param([Parameter(ValueFromRemainingArguments=$true)][string[]]$Args)
& "{py_exe}" "{MAIN_PY}" @Args
exit $LASTEXITCODE
""", encoding="utf-8")

    return {
        "bin_dir": str(target_dir),
        "wrappers": [str(cmd_path), str(ps1_path)],
        "on_path": is_on_path(target_dir),
    }


def install_unix(target_dir: Path, py_exe: str = sys.executable):
    ensure_dir(target_dir)
    wrapper_path = target_dir / CMD_NAME

    # exec keeps the exit status (0 / 1 / 2) of main.py
    wrapper_path.write_text(f"""#!/usr/bin/env bash
exec "{py_exe}" "{MAIN_PY}" "$@"
""", encoding="utf-8")
    os.chmod(wrapper_path, 0o755)

    return {
        "bin_dir": str(target_dir),
        "wrappers": [str(wrapper_path)],
        "on_path": is_on_path(target_dir),
    }


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not MAIN_PY.exists():
        print(f"❌ main.py not found at {MAIN_PY}")
        return 1

    system = platform.system()
    print(f"Installing '{CMD_NAME}' for {system}...")

    if system == "Windows":
        target_dir = Path(argv[0]) if argv else WINDOWS_DEFAULT_BIN
        result = install_windows(target_dir)
    else:
        target_dir = Path(argv[0]) if argv else UNIX_DEFAULT_BIN
        result = install_unix(target_dir)

    print("\nInstalled wrappers:")
    for w in result["wrappers"]:
        print(f" - {w}")
    if not result["on_path"]:
        print(f"\n⚠️  {result['bin_dir']} is not on your PATH. Add it, then open a new terminal.")
    print(f"\n✅ Now you can run: {CMD_NAME} bench rand-nodes --max-nodes 1024 --trials 3")
    return 0


if __name__ == "__main__":
    sys.exit(main())
