# Z cap at omega=4, gamma=2 in mpmath, where the cap argument reaches 1 on a curve.
import mpmath as mp
mp.mp.dps=20
# Z cap, omega=4, gamma=2: 2*asin(cos x + cos y) over cos x + cos y <= 1, first octant
def inner(x):
    ylo = mp.acos(1-mp.cos(x)) if 1-mp.cos(x) <= 1 else 0
    return mp.quad(lambda y: 2*mp.asin(min(1, mp.cos(x)+mp.cos(y))), [ylo, mp.pi/2])
print('Z w4 g2', mp.quad(inner,[0,mp.pi/2]))
print('scipy-total-implied', (94.58062251562367/8))
