#pragma once

#include "wfsep/errors.hpp"
#include "wfsep/estimation.hpp"
#include "wfsep/extended_real.hpp"
#include "wfsep/likelihood.hpp"
#include "wfsep/model.hpp"
#include "wfsep/parallel.hpp"
#include "wfsep/path_io.hpp"
#include "wfsep/quadrature.hpp"
#include "wfsep/rng.hpp"
#include "wfsep/sde.hpp"
#include "wfsep/separating.hpp"
#include "wfsep/stats.hpp"
#include "wfsep/verify.hpp"
