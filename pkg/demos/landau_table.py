"""Eigenvalue and Landau coefficient for the exponential and Blasius profiles at nu = 1e-30."""

from oscoeff.nonlinear import run_pipeline
from oscoeff.profiles import make_blasius, make_exponential

NU = 1e-30


def main():
    cases = [("exp", make_exponential(1.0), 1.5), ("exp", make_exponential(1.0), 2.0), ("blasius", make_blasius(), 0.5)]
    print(f"{'profile':8s} {'alpha0':>6s} {'c0':>24s} {'lambda':>26s} {'A':>24s}")
    for name, prof, a0 in cases:
        p = run_pipeline(prof, NU, a0)
        print(f"{name:8s} {a0:6.2f} {p.eigen.c0:24.6f} {p.eigen.lam:26.4e} {p.landau.A:24.6f}")


if __name__ == "__main__":
    main()
