# coding: utf-8

# # Elastic force
#
# Harmonic binding, F = -omega^2 x. The reduced equation is again linear
# and the coefficients come out of a cubic.

# In[1]:

from backreaction import elastic as el
from backreaction.core import ElasticParams

params = ElasticParams(omega=0.5, eta=1.0)
coeffs = el.elastic_coefficients(params)
roots = el.cardano_roots(params)
print("beta =", coeffs.beta, "alpha =", coeffs.alpha)
print("roots", roots.all)


# In[2]:

trace = el.iterate_radiation_term_elastic(params)
print(trace.describe(), len(trace.entries))
print(abs(trace.limit[0] - coeffs.beta), abs(trace.limit[1] - coeffs.alpha))


# At eta*omega = 1 the iteration cycles with period three:
# (0, 1) -> (1, 0) -> (0, 0) -> (0, 1).

# In[3]:

stuck = el.iterate_radiation_term_elastic(ElasticParams(omega=1.0, eta=1.0), max_steps=20)
print(stuck.describe())
for e in stuck.entries:
    print(e.n, e.beta, e.alpha)


# Solution iteration: the log-slope of the complex envelope at t = 0
# approaches -alpha/2 + i(nu - omega).

# In[4]:

weak = ElasticParams(omega=1.0, eta=0.1)
target = el.elastic_coefficients(weak)
print("target", -target.alpha / 2, target.frequency - weak.omega)
for env in el.iterate_solution_elastic(weak, 1.0, 0.0, 6, exact=False):
    print(env.rate())
