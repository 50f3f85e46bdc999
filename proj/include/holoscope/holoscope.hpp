#pragma once

#include "circle.hpp"
#include "correspondence.hpp"
#include "errors.hpp"
#include "expansion.hpp"
#include "io.hpp"
#include "linearization.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "periodic.hpp"
#include "point_map.hpp"
#include "poly.hpp"
#include "preimages.hpp"
#include "random.hpp"
#include "rational_map.hpp"
#include "render.hpp"
#include "roots.hpp"
#include "sphere.hpp"
