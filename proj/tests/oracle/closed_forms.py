# Independent values frozen into the C++ tests: symbolic X-cap derivatives,
# the first-octant Z cap at omega=9, gamma=1, and the four kernel integrals.
# Run with: python3 closed_forms.py
import sympy as sp, mpmath as mp
mp.mp.dps=30
x,y,z=sp.symbols('x y z',real=True)
w=9; g=1; a=sp.pi/2
uX=-g*sp.sqrt(w)*sp.sin((x-a)/sp.sqrt(w))+g*sp.cos(y)+sp.cos(z)
pt={x:sp.pi/2+sp.Rational(1,5),y:sp.Rational(3,10),z:sp.Rational(2,5)}
print('Xcap value',sp.N(uX.subs(pt),20))
for v in (x,y,z): print('grad',v,sp.N(sp.diff(uX,v).subs(pt),20))
for v in (x,y,z): print('hess',v,sp.N(sp.diff(uX,v,2).subs(pt),20))
# Z-cap volume w=9,g=1 first octant (mpmath quad)
f=lambda X,Y: 3*mp.asin((mp.cos(X)+mp.cos(Y))/3)
print('Zcap',mp.quad(f,[0,mp.pi/2],[0,mp.pi/2]))
# K kernels at w=9 for gamma grid
for G in (0.6,0.8,1,1.25,1.67):
    G=mp.mpf(G)
    K1=mp.quad(lambda t: mp.acos(t)/mp.sqrt(G**2*9-t**2),[0,1])
    K2=mp.quad(lambda t: mp.acos(t)/mp.sqrt(9/G**2-t**2),[0,1])
    Hp=mp.quad(lambda t: mp.cos(t)/mp.sqrt(9/G**2-mp.cos(t)**2),[0,mp.pi/2])
    Hm=mp.quad(lambda t: mp.cos(t)/mp.sqrt(9*G**2-mp.cos(t)**2),[0,mp.pi/2])
    print('kern',G,K1,K2,Hp,Hm)
# K1 at gamma=1/sqrt(w) (singular endpoint)
print('K1 lowerbound w=9',mp.quad(lambda t: mp.acos(t)/mp.sqrt(1-t**2),[0,1]))
