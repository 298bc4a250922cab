"""The diffusion coefficient of the random Lorentz gas scales as D = r f(phi).

Rescaling space by R scales both the disc radius and travelled distances by
R while time (at unit speed) scales by R too, so the MSD slope picks up one
factor of R.  Doubling r at fixed phi should therefore double D; changing
phi at fixed r moves along f(phi) instead.
"""

from statediff.lorentz import estimate_D, f_dilute_asymptote

print("radius scaling at phi = 0.5:")
e1 = estimate_D(0.3, 0.5, ensemble=80, horizon=1500.0, seed=7)
e2 = estimate_D(0.6, 0.5, ensemble=80, horizon=1500.0, seed=8)
print(f"  D(r=0.3) = {e1.d_hat:.4f} +- {e1.stderr:.4f}")
print(f"  D(r=0.6) = {e2.d_hat:.4f} +- {e2.stderr:.4f}")
print(f"  ratio = {e2.d_hat / e1.d_hat:.3f}   (scaling law: 2)")
print()

print("f(phi) = D/r at fixed r = 0.3:")
for phi in (0.5, 0.7, 0.9):
    est = estimate_D(0.3, phi, ensemble=60, horizon=1500.0, seed=int(phi * 100))
    note = ""
    if phi >= 0.9:
        note = f"   (dilute asymptote 3 pi/(16 (1-phi)) = {f_dilute_asymptote(phi):.2f})"
    print(f"  phi={phi}: f = {est.d_hat / 0.3:.3f} +- {est.stderr / 0.3:.3f}{note}")
