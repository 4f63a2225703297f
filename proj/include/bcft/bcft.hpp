#pragma once

#include "bcft/error.hpp"
#include "bcft/quadrature.hpp"
#include "bcft/special.hpp"
#include "bcft/testfn.hpp"
#include "bcft/weyl.hpp"
#include "bcft/boundary.hpp"
#include "bcft/parallel.hpp"
#include "bcft/cluster.hpp"
#include "bcft/vertex.hpp"
#include "bcft/modular.hpp"
