"""Smoke test for the Python bindings: python python/smoke_test.py"""

import math

import mincontrol as mc

a = mc.worked_example()

pairs = mc.left_eigenbasis(a)
assert [round(lam.real) for lam, _ in pairs] == [5, 4, 3, 2, 1]
assert [mc.structural_pattern(v) for _, v in pairs] == ["**00*", "00*0*", "000*0", "0*000", "*0**0"]

s = mc.solve_mcp(a)
assert s.verified and s.kalman_rank == 5, s
assert s.support == [1, 2, 3] and s.pattern == "0***0"
assert s.sets == [[0, 4], [0, 3], [1, 4], [2, 4], [0, 1]]
b = s.vector
assert all(abs(b[i]) > 0 for i in (1, 2, 3)) and abs(b[2] + b[3]) > 0

assert len(mc.solve_mcp(a, mode="greedy").support) == 4
assert mc.solve_mscp(a) == "0*0*0"
assert mc.brute_force_mcp(a)[0] == 3

v = mc.verify(a, [0, 1, 1, 1, 0])
assert v["kalman"] and v["pbh_eigenvalue"] and v["pbh_eigenvector"] and v["consistent"]
v = mc.verify(a, [0, 1, 0, 0, 0])
assert not v["kalman"] and v["consistent"]

p = mc.perturb(a, 1e-10, seed=3)
assert mc.solve_mcp(p).support == [1, 3]
assert mc.solve_mcp(p, tolerances=mc.Tolerances(zero_tol=1e-6)).support == [1, 2, 3]

# Complex input: a rotation needs one state.
rot = [[0, -1], [1, 0]]
assert len(mc.solve_mcp(rot).support) == 1
assert mc.set_cover_exact(3, [[0], [0, 1], [1, 2], [2, 0]]) == [0, 2]
assert mc.set_cover_greedy(3, [[0], [0, 1], [1, 2], [2, 0]])

for bad, exc in [([[1, 0], [0, 1]], mc.UnsolvableError), ([[1, 2]], mc.InputError)]:
    try:
        mc.solve_mcp(bad)
    except exc:
        pass
    else:
        raise AssertionError(f"{bad} should raise {exc.__name__}")
try:
    mc.Tolerances(tau=-1.0)
except mc.InputError:
    pass
else:
    raise AssertionError("negative tau accepted")
assert issubclass(mc.UnsolvableError, ValueError)
assert math.isclose(mc.Tolerances().tau, 1e-10)

print("python smoke test: ok")
