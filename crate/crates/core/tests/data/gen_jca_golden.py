"""Writes jca_golden.csv: limp-frame JCA properties in the textbook form.

    rho(w) = a rho0 [1 + s phi / (i w rho0 a) sqrt(1 + 4 i a^2 eta rho0 w / (s^2 L^2 phi^2))]
    K(w)   = g P0 / (g - (g - 1) / [1 + 8 eta / (i L'^2 Pr w rho0) sqrt(1 + i rho0 w Pr L'^2 / (16 eta))])

rho and K are divided by the porosity, then the density gets the limp-frame
replacement (rho_t rho_eq - rho0^2) / (rho_t + rho_eq - 2 rho0).

Run: python3 gen_jca_golden.py > jca_golden.csv
"""
import cmath
import math

RHO0, C0, ETA, PR, GAMMA, P0 = 1.213, 343.0, 1.839e-5, 0.710, 1.4, 101325.0

MATERIALS = {
    "wool": dict(phi=0.98, sigma=2.0e4, alpha=1.0, lv=1.0e-4, lt=2.0e-4, rho1=16.0),
    "foam": dict(phi=0.95, sigma=8.0e3, alpha=1.4, lv=8.0e-5, lt=2.5e-4, rho1=30.0),
}
FREQS = [10.0, 50.0, 100.0, 258.0, 500.0, 578.0, 750.0, 1000.0]


def props(m, f):
    w = 2.0 * math.pi * f
    phi, s, a, lv, lt, rho1 = m["phi"], m["sigma"], m["alpha"], m["lv"], m["lt"], m["rho1"]
    rho = a * RHO0 * (1 + s * phi / (1j * w * RHO0 * a)
                      * cmath.sqrt(1 + 4j * a * a * ETA * RHO0 * w / (s * s * lv * lv * phi * phi)))
    g = 1 + 8 * ETA / (1j * lt * lt * PR * w * RHO0) * cmath.sqrt(1 + 1j * RHO0 * w * PR * lt * lt / (16 * ETA))
    k = GAMMA * P0 / (GAMMA - (GAMMA - 1) / g)
    rho_eq, k_eq = rho / phi, k / phi
    rho_t = rho1 + phi * RHO0
    rho_limp = (rho_t * rho_eq - RHO0 ** 2) / (rho_t + rho_eq - 2 * RHO0)
    return rho_limp, k_eq, cmath.sqrt(k_eq / rho_limp)


print("material,f,rho_re,rho_im,bulk_re,bulk_im,c_re,c_im")
for name, m in MATERIALS.items():
    for f in FREQS:
        r, k, c = props(m, f)
        print(f"{name},{f!r},{r.real!r},{r.imag!r},{k.real!r},{k.imag!r},{c.real!r},{c.imag!r}")
