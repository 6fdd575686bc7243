import importlib
import shutil

import pytest

MODULES = [
    "ris_uwoc_perf.specfn",
    "ris_uwoc_perf.rf_link",
    "ris_uwoc_perf.uwoc_link",
    "ris_uwoc_perf.e2e_stats",
    "ris_uwoc_perf.metrics",
    "ris_uwoc_perf.mc_oracle",
    "ris_uwoc_perf.sweep",
    "ris_uwoc_perf.cli",
]


def test_check_dependencies():
    for name in ("numpy", "scipy", "pandas", "joblib", "progressbar"):
        importlib.import_module(name)


@pytest.mark.parametrize("name", MODULES)
def test_modules_import(name):
    importlib.import_module(name)


def test_version_and_exports():
    import ris_uwoc_perf

    assert ris_uwoc_perf.__version__ == "0.1.0"
    for name in ris_uwoc_perf.__all__:
        assert hasattr(ris_uwoc_perf, name)


def test_tracking_is_optional():
    # mlflow is only imported when a sweep is tracked
    import ris_uwoc_perf.tracking  # noqa: F401


def test_console_script():
    if shutil.which("ris-uwoc") is None:
        pytest.skip("package not installed")
    import subprocess

    done = subprocess.run(["ris-uwoc", "tables", "-q"], capture_output=True, text=True)
    assert done.returncode == 0
    assert done.stdout.startswith("key,")
