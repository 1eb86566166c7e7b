# coding: utf-8

# # Runaways
#
# The third-order equation has one extra degree of freedom: the initial
# acceleration. Only one value keeps the motion on the physical
# manifold. Anything else grows like exp(lambda3 t).

# In[1]:

import numpy as np

from backreaction import dynamics as dy
from backreaction import elastic as el
from backreaction.core import ElasticParams

params = ElasticParams(omega=0.5, eta=1.0)
field, s = dy.elastic_field(params.omega), el.self_force(params)
x0, v0 = np.array([1.0, 0.0, 0.0]), np.zeros(3)
a_crit = dy.critical_acceleration(field, s, x0, v0)
print("critical acceleration", a_crit)


# In[2]:

for delta in (0.0, 1e-6, 1e-3, 1.0):
    traj = dy.integrate_lorentz_dirac(field, dy.LDState(x0, v0, a_crit + [delta, 0, 0]),
                                      params.eta, 40.0)
    print("delta=%-6g %-9s t=%.2f" % (delta, traj.reason, traj.t[-1]))


# The growth rate of the deviation is the largest cubic root, not 1/eta.

# In[3]:

traj = dy.integrate_lorentz_dirac(field, dy.LDState(x0, v0, a_crit + [1e-6, 0, 0]),
                                  params.eta, 60.0, tol=1e-12, dt=0.01)
ref = dy.integrate_reduced(field, s, x0, v0, float(traj.t[-1]), dt=0.01)
n = min(len(traj), len(ref))
a_ref = np.array([field(x, v) + s(x, v) for x, v in zip(ref.x[:n], ref.v[:n])])
rate = dy.growth_rate(traj.t[:n], np.linalg.norm(traj.a[:n] - a_ref, axis=1))
print("fitted", rate, "lambda3", el.cardano_roots(params).lambda3, "1/eta", 1 / params.eta)
