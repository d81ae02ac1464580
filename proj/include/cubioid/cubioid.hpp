#pragma once

// Everything at once.

#include "cubioid/angle.hpp"
#include "cubioid/dynamics.hpp"
#include "cubioid/error.hpp"
#include "cubioid/finite_gaps.hpp"
#include "cubioid/multiplier.hpp"
#include "cubioid/param_rays.hpp"
#include "cubioid/png_io.hpp"
#include "cubioid/q_atlas.hpp"
#include "cubioid/quad_gaps.hpp"
#include "cubioid/render.hpp"
