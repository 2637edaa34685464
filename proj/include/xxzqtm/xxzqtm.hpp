#pragma once

#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"
#include "xxzqtm/quadrature.hpp"
#include "xxzqtm/dressed.hpp"
#include "xxzqtm/contour.hpp"
#include "xxzqtm/nlie.hpp"
#include "xxzqtm/spectral.hpp"
#include "xxzqtm/lowt.hpp"
#include "xxzqtm/freefermion.hpp"
#include "xxzqtm/io.hpp"
