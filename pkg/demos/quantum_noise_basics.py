"""A first walk through the noise floor of a single light mode.

A laser mode in a coherent state carries Gaussian quadrature noise of
variance 1/4 no matter how bright it is.  This script samples a mode,
estimates its moments with standard errors, and shows that the estimate
converges onto the floor as the trial count grows.
"""

import math

from cbcnoise import RngStream, VAR_COH, estimate_stats, photon_number, sample_coherent


def main():
    mean = 3 + 4j
    print(f"mode amplitude {mean}, photon number {photon_number(mean):.0f}")
    print(f"shot-noise floor per quadrature: {VAR_COH}")
    print()
    print(f"{'trials':>9}  {'var_x':>8}  {'var_p':>8}  {'se_var':>8}  {'pull':>6}")
    rng = RngStream(2024)
    for exponent in range(3, 7):
        trials = 10 ** exponent
        stats = estimate_stats(sample_coherent(mean, rng.substream(exponent), size=trials))
        pull = (stats.var_x - VAR_COH) / stats.se_var_x
        print(f"{trials:>9}  {stats.var_x:8.5f}  {stats.var_p:8.5f}"
              f"  {stats.se_var_x:8.5f}  {pull:+6.2f}")
    print()
    print("the pull column is (measured - 1/4) / SE and should hover within a few units")

    # the noise floor does not care about brightness
    print()
    print("brightness sweep at 10^5 trials:")
    for brightness in (0.0, 1.0, 10.0, 100.0):
        stats = estimate_stats(sample_coherent(brightness, rng.substream(9, int(brightness)),
                                               size=100_000))
        print(f"  |alpha|^2 = {brightness:5.0f}: var_x = {stats.var_x:.4f}, "
              f"var_p = {stats.var_p:.4f}")


if __name__ == "__main__":
    main()
