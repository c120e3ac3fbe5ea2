#pragma once

#include <chvirial/admissibility.hpp>
#include <chvirial/archive.hpp>
#include <chvirial/exact.hpp>
#include <chvirial/functionals.hpp>
#include <chvirial/grid.hpp>
#include <chvirial/helmholtz.hpp>
#include <chvirial/integrator.hpp>
#include <chvirial/models.hpp>
#include <chvirial/weights.hpp>
