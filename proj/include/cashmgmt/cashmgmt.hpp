#pragma once

#include "cashmgmt/engine.hpp"
#include "cashmgmt/formulate.hpp"
#include "cashmgmt/matrix.hpp"
#include "cashmgmt/model.hpp"
#include "cashmgmt/oracle.hpp"
#include "cashmgmt/problem_io.hpp"
#include "cashmgmt/simplex.hpp"
