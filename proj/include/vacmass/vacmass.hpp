#pragma once

#include "vacmass/dynamics.hpp"
#include "vacmass/grid.hpp"
#include "vacmass/mirror_model.hpp"
#include "vacmass/noise.hpp"
#include "vacmass/quadrature.hpp"
#include "vacmass/scattering.hpp"
#include "vacmass/spectra.hpp"
#include "vacmass/verify.hpp"
