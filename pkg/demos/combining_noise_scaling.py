"""How phase jitter across a beam array shows up in the combined output.

N beams of n photons each are merged through the DFT combiner.  Residual
phase errors with variance V do three things to the bright port: they
shave the mean amplitude by a factor (1 - V/2), they add n*V^2/2 photons
of noise to the amplitude quadrature, and they add n*V photons to the
phase quadrature.  The script sweeps the lock quality factor xi and
compares the closed forms against the Monte Carlo.
"""

import warnings

from cbcnoise import (
    CbcConfig,
    RngStream,
    SmallAngleWarning,
    predict_output,
    simulate_cbc,
    sql_phase_variance,
    xi_threshold,
)

N_BEAMS = 4
PHOTONS = 1000.0
TRIALS = 200_000


def one_row(xi, rng):
    config = CbcConfig(n_beams=N_BEAMS, photons=PHOTONS, xi=xi)
    pred = predict_output(config)
    stats = simulate_cbc(config, TRIALS, rng)
    return config, pred, stats


def main():
    sql = sql_phase_variance(N_BEAMS, PHOTONS)
    print(f"{N_BEAMS} beams, {PHOTONS:.0f} photons each; quantum-limited lock "
          f"variance {sql:.2e} rad^2")
    print(f"a phase-locked array beats one amplified beam while xi stays below "
          f"{xi_threshold(N_BEAMS):.1f}")
    print()
    header = (f"{'xi':>5}  {'Var(psi)':>9}  {'mean (pred)':>11}  {'mean (MC)':>11}"
              f"  {'var_p (pred)':>12}  {'var_p (MC)':>11}")
    print(header)
    base = RngStream(515)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallAngleWarning)
        for index, xi in enumerate((1.0, 2.0, 5.0, 20.0, 100.0)):
            config, pred, stats = one_row(xi, base.substream(index))
            print(f"{xi:5.0f}  {config.phase_var:9.2e}  {pred.mean_amplitude:11.4f}"
                  f"  {stats.mean_x:11.4f}  {pred.var_p:12.4f}  {stats.var_p:11.4f}")
    print()
    print("the phase quadrature soaks up almost all of the added noise: "
          "its excess is larger than the amplitude one by 2/Var(psi)")


if __name__ == "__main__":
    main()
