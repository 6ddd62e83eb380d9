#pragma once

#include "nilmix/errors.hpp"
#include "nilmix/exact/interval.hpp"
#include "nilmix/exact/matrix.hpp"
#include "nilmix/exact/number_field.hpp"
#include "nilmix/exact/polynomial.hpp"
#include "nilmix/exact/roots.hpp"
#include "nilmix/spectrum/action.hpp"
#include "nilmix/spectrum/lyapunov.hpp"
#include "nilmix/diophantine/height.hpp"
#include "nilmix/diophantine/sunit.hpp"
#include "nilmix/diophantine/linear_form.hpp"
#include "nilmix/toral/trig_polynomial.hpp"
#include "nilmix/toral/correlation.hpp"
#include "nilmix/nil/heisenberg.hpp"
#include "nilmix/nil/test_function.hpp"
#include "nilmix/nil/monte_carlo.hpp"
#include "nilmix/nil/box_map.hpp"
#include "nilmix/cocycle/dual_orbits.hpp"
#include "nilmix/cocycle/cocycle.hpp"
#include "nilmix/cocycle/solution_space.hpp"
