#pragma once

#include "robustmv/calibration.hpp"
#include "robustmv/error.hpp"
#include "robustmv/fixed_mean.hpp"
#include "robustmv/market_model.hpp"
#include "robustmv/nominal.hpp"
#include "robustmv/oracle/brute_force.hpp"
#include "robustmv/oracle/gaussian_kl.hpp"
#include "robustmv/oracle/gradient_descent.hpp"
#include "robustmv/oracle/monte_carlo.hpp"
#include "robustmv/oracle/quadratic_form.hpp"
#include "robustmv/oracle/random_model.hpp"
#include "robustmv/robust.hpp"
#include "robustmv/variant.hpp"
