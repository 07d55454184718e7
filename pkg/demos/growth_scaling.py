"""Growth rate of the exponential-profile mode against viscosity: Re lambda scales as nu^(1/2)."""

import numpy as np

from oscoeff.profiles import make_exponential
from oscoeff.spectrum import find_eigenvalue


def main():
    prof = make_exponential(1.0)
    nus = np.array([1e-34, 1e-30, 1e-26, 1e-22])
    growth = np.array([find_eigenvalue(prof, nu, 1.5).lam.real for nu in nus])
    for nu, g in zip(nus, growth):
        print(f"nu = {nu:.0e}  Re lambda = {g:.4e}  Re lambda / nu^(1/2) = {g / np.sqrt(nu):.5f}")
    slope = np.polyfit(np.log(nus), np.log(growth), 1)[0]
    print(f"fitted exponent {slope:.4f}")


if __name__ == "__main__":
    main()
