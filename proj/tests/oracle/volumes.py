# Whole-domain volumes by scipy dblquad over the seven patches (first octant, x8).
# Used for the omega=9, gamma=1 total. Near gamma = sqrt(omega) the Z-cap integrand
# jumps along a curve and dblquad loses about 1e-3; see zcap_endpoint.py.
import numpy as np
from scipy import integrate
A=np.pi/2
def vol(w,g):
    sw=np.sqrt(w)
    cube=A**3
    def capZ(y,x):
        t=g*(np.cos(x)+np.cos(y))/sw
        return sw*np.arcsin(t) if 0<=t<=1 else 0.0
    def capX(z,y):
        t=(g*np.cos(y)+np.cos(z))/(g*sw)
        return sw*np.arcsin(t) if 0<=t<=1 else 0.0
    Z=integrate.dblquad(capZ,0,A,0,A,epsabs=1e-11,epsrel=1e-10)[0]
    X=integrate.dblquad(capX,0,A,0,A,epsabs=1e-11,epsrel=1e-10)[0]
    # ZX in s variables: w * int int arccos(sw sin sx + sw/g sin sz)
    def bridge(c1,c2):
        # region c1 sin s1 + c2 sin s2 <=1, s in [0,pi/2]
        s1max=np.arcsin(min(1,1/c1))
        def inner_hi(s1):
            r=(1-c1*np.sin(s1))/c2
            return np.arcsin(min(1,max(0,r)))
        f=lambda s2,s1: np.arccos(min(1,c1*np.sin(s1)+c2*np.sin(s2)))
        return w*integrate.dblquad(f,0,s1max,0,inner_hi,epsabs=1e-11,epsrel=1e-10)[0]
    ZX=bridge(sw,sw/g)
    XY=bridge(g*sw,g*sw)
    return 8*(cube+Z+2*X+2*ZX+XY), (cube,Z,X,ZX,XY)
for w in (4,9):
    gs=np.geomspace(1/np.sqrt(w),np.sqrt(w),9)
    for g in list(gs)+[1.2,1/1.2]:
        print(w,round(g,4),vol(w,g)[0])
    h=1e-3
    for g in (1,1.2,1/1.2):
        print('dV',w,g,(vol(w,g+h)[0]-vol(w,g-h)[0])/(2*h))
