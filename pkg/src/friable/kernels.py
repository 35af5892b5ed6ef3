"""Backend selection for the hot loops.

The compiled module ``friable._ckernels`` is used when it imports; otherwise
(or when ``FRIABLE_PURE_PYTHON`` is set) the numpy twins in ``_pykernels``.
``BACKEND`` names the active one; ``backends()`` lists every importable one so
tests and the benchmark can compare them.
"""
import importlib
import os

_NAMES = {"cython": "friable._ckernels", "python": "friable._pykernels"}


def load(name):
    return importlib.import_module(_NAMES[name])


def backends():
    found = {}
    for name in _NAMES:
        try:
            found[name] = load(name)
        except ImportError:
            pass
    return found


if os.environ.get("FRIABLE_PURE_PYTHON"):
    _impl, BACKEND = load("python"), "python"
else:
    try:
        _impl, BACKEND = load("cython"), "cython"
    except ImportError:
        _impl, BACKEND = load("python"), "python"

factor_window = _impl.factor_window
psi_window = _impl.psi_window
psi_window_sums = _impl.psi_window_sums
count_le = _impl.count_le
count_root_le = _impl.count_root_le
count_kernel_threshold = _impl.count_kernel_threshold
dickman_sum = _impl.dickman_sum
