"""Smoke test for the speclab_py extension module.

Build and install first:

    pip install maturin
    pip install --no-build-isolation -e crates/python

then run `python python/smoke_test.py`.
"""

import math
import sys
import tempfile
from pathlib import Path

import numpy as np

import speclab_py as sl


def check(cond, msg):
    if not cond:
        print(f"FAIL {msg}")
        sys.exit(1)
    print(f"ok   {msg}")


def main():
    n = 16
    x = 2 * np.pi * np.arange(2 * n + 1) / (2 * n + 1)
    samples = np.exp(np.sin(x))
    u = sl.SpectralField.from_values(samples.tolist())
    check(u.degree == n, "degree from grid length")

    ref = np.fft.fftshift(np.fft.fft(samples)) / len(samples)
    check(np.allclose(u.coeffs(), ref, atol=1e-14), "coefficients agree with numpy FFT")
    check(np.allclose(u.values(), samples, atol=1e-13), "synthesis inverts analysis")

    parseval = np.mean(samples**2) * 2 * np.pi
    check(abs(u.l2_norm() ** 2 - parseval) < 1e-12 * parseval, "Parseval")

    prof = sl.SmoothingProfile.two_thirds(n)
    f = prof.factors()
    check(len(f) == 2 * n + 1 and prof.factor(0) == 1.0, "profile covers k = -N..N")
    check(all(prof.factor(k) == 0.0 for k in range(2 * n // 3 + 1, n + 1)), "2/3 profile vanishes past 2N/3")
    check(sl.mollifier(2 / 3) == 0.0, "mollifier zero at 2/3")

    rhs = sl.burgers_rhs(u, "spectral")
    check(abs(u.inner_product(rhs)) < 1e-13 * u.l2_norm() ** 2, "spectral Burgers conserves energy")
    rhs = sl.burgers_rhs(u, "two-thirds")
    check(abs(u.smoothed(prof).inner_product(rhs)) < 1e-13 * u.l2_norm() ** 2, "2/3 Burgers conserves weighted energy")

    centers, values = sl.godunov_reference(1.0, 2.0, 2048)
    tv = sum(abs(values[i] - values[i - 1]) for i in range(len(values)))
    check(len(centers) == 2048 and 3.5 < tv <= 4.0 + 1e-12, f"Godunov reference TV {tv:.3f}")

    names = [name for name, _ in sl.experiments()]
    check(len(names) == 8 and "burgers-sv" in names, "experiment registry")
    text = sl.resolve_config("burgers-smooth-rate", "N = 8,16\n", {"tend": "0.25"})
    check("N = 8,16" in text and "tend = 0.25" in text, "config resolution")

    try:
        sl.resolve_config("burgers-sv", "smoothing = 2\n")
        check(False, "unknown key rejected")
    except ValueError:
        check(True, "unknown key rejected")

    r = sl.run_experiment("burgers-smooth-rate", overrides={"N": "8,16,32", "tend": "0.5"})
    check(r.exit_code == 0 and r.outcome == "completed", repr(r))
    summary = r.table("summary.csv")
    errs = summary["error"]
    check(all(math.isfinite(e) for e in errs) and errs[-1] < errs[0], "errors shrink with N")
    with tempfile.TemporaryDirectory() as d:
        r.write(d)
        manifest = (Path(d) / "manifest.txt").read_text()
        check("sha256.summary.csv=" in manifest, "manifest written")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
