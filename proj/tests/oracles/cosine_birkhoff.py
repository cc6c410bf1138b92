"""S_100 of cos(2 pi theta) along the golden rotation from theta = 0, in
50-digit arithmetic. The printed value is frozen in test_base_dynamics.cpp."""
import mpmath as mp

mp.mp.dps = 50
gamma = (mp.sqrt(5) - 1) / 2
s = mp.fsum(mp.cos(2 * mp.pi * mp.frac(k * gamma)) for k in range(100))
print(mp.nstr(s, 20))
