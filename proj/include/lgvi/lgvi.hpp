#pragma once

#include "lgvi/errors.hpp"
#include "lgvi/so3.hpp"
#include "lgvi/rigid_body.hpp"
#include "lgvi/implicit_solver.hpp"
#include "lgvi/variational_integrator.hpp"
#include "lgvi/diagnostics.hpp"
