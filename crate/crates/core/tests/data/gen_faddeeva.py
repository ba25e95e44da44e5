"""Reference values of w(z) = exp(-z^2) erfc(-iz) on a 100x100 grid over [-8, 8]^2.

Computed with mpmath at 50 significant digits.
"""
import mpmath as mp

mp.mp.dps = 50
xs = [mp.mpf(-8) + mp.mpf(16) * i / 99 for i in range(100)]
with open("faddeeva_grid.csv", "w") as f:
    f.write("# re_z,im_z,re_w,im_w\n")
    for x in xs:
        for y in xs:
            z = mp.mpc(x, y)
            w = mp.exp(-z * z) * mp.erfc(-1j * z)
            f.write("%s,%s,%s,%s\n" % tuple(mp.nstr(v, 17, min_fixed=-1, max_fixed=-1) for v in (x, y, w.real, w.imag)))
