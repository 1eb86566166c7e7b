# coding: utf-8

# # Self-force in a constant field
#
# A charge in constant E and B fields. The self-force is affine in the
# velocity, so everything reduces to two numbers, beta and alpha. We get
# them three ways and check they agree.

# In[1]:

import numpy as np

from backreaction import constfield as cf
from backreaction.core import FieldParams


# In[2]:

params = FieldParams(e_vec=(0.1, 0.0, 0.2), b_vec=(0.0, 0.0, 0.5), eta=1.0)
closed = cf.closed_form_coefficients(params)
print("closed form     beta=%.15f alpha=%.15f" % (closed.beta, closed.alpha))
print("char. root      beta=%.15f alpha=%.15f" % cf.coefficients_from_characteristic_root(params))


# The radiation-term iteration starts from the Landau approximation and
# contracts as long as the spectral radius stays below one.

# In[3]:

trace = cf.iterate_radiation_term(params)
print(trace.describe(), "after", len(trace.entries), "steps")
print("limit           beta=%.15f alpha=%.15f" % trace.limit)
print("spectral radius", cf.radiation_term_spectral_radius(params))


# Past eta*b of about 0.636 the radius exceeds one. At eta*b = 1 the orbit
# flips between two points forever, and at 0.9 it runs off.

# In[4]:

for b in (0.5, 0.6356, 0.9, 1.0):
    p = FieldParams(b_vec=(0, 0, b), eta=1.0)
    t = cf.iterate_radiation_term(p, max_steps=2000)
    print("eta*b=%.4f radius=%.4f %s" % (b, cf.radiation_term_spectral_radius(p), t.describe()))


# Iterating the solution instead: envelope polynomials whose slope at zero
# approaches the decay rates. Works for weak coupling only.

# In[5]:

weak = FieldParams(b_vec=(0, 0, 0.1), eta=1.0)
ref = cf.closed_form_coefficients(weak)
for n, pair in enumerate(cf.iterate_solution_envelopes(weak, 8, exact=False)):
    a, b_ = pair.rates()
    print(n, abs(a - ref.alpha), abs(b_ - ref.beta))


# The closed-form velocity agrees with integrating the reduced equation.

# In[6]:

from backreaction import dynamics

v0 = np.array([1.0, 0.0, 0.0])
traj = dynamics.integrate_reduced(dynamics.constant_field(params),
                                  cf.self_force(params).state_function(),
                                  np.zeros(3), v0, 10.0, dt=0.5)
exact = np.array([cf.closed_form_trajectory(params, v0, t) for t in traj.t])
print("max velocity difference", np.abs(traj.v - exact).max())
