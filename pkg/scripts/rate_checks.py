"""Monte Carlo rate checks of the trend slope and its HAC t-statistic.

Prints, for each process, the median |beta_hat| or |t| at each length and
the fitted log-log exponent next to its target.

    python3 scripts/rate_checks.py --reps 500 --lengths 100 400 1600
"""
import argparse
import time

from climhet.simulate import DgpSpec, rate_check_beta, rate_check_tstat

BETA = [DgpSpec("iid", 100), DgpSpec("ar1", 100, rho=0.5), DgpSpec("random-walk", 100),
        DgpSpec("fractional", 100, d=0.8), DgpSpec("polynomial", 100, coefficients=(0.01,))]
TSTAT = [DgpSpec("iid", 100), DgpSpec("random-walk", 100), DgpSpec("near-unit-root", 100, c=5.0),
         DgpSpec("local-level", 100, q=1.0), DgpSpec("fractional", 100, d=0.8),
         DgpSpec("fractional", 100, d=1.2)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=500)
    parser.add_argument("--lengths", type=int, nargs="+", default=[100, 400, 1600])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--bandwidth", type=int, default=None,
                        help="fixed HAC bandwidth for the t checks (default: rule at shortest T)")
    args = parser.parse_args()

    print(f"{'stat':5s} {'process':22s} {'exponent':>9s} {'target':>7s}  medians")
    for statistic, specs, check in (("beta", BETA, rate_check_beta), ("t", TSTAT, rate_check_tstat)):
        for spec in specs:
            spec = type(spec)(**{**spec.__dict__, "seed": args.seed})
            start = time.perf_counter()
            kw = {"bandwidth": args.bandwidth} if statistic == "t" else {}
            r = check(spec, args.lengths, args.reps, **kw)
            label = spec.kind + (f"(d={spec.d})" if spec.kind == "fractional" else "")
            medians = " ".join(f"{m:.3g}" for m in r.medians)
            print(f"{statistic:5s} {label:22s} {r.exponent:9.3f} {r.target:7.2f}  {medians}"
                  f"  [{'ok' if r.passed else 'off'}, {time.perf_counter() - start:.1f} s]")


if __name__ == "__main__":
    main()
