#pragma once

#include "spectral_forge/cholesky.hpp"
#include "spectral_forge/cluster.hpp"
#include "spectral_forge/decomposition.hpp"
#include "spectral_forge/eigen.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/gallery.hpp"
#include "spectral_forge/io.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/pipeline.hpp"
#include "spectral_forge/product_measure.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/spectral_measure.hpp"
#include "spectral_forge/tolerances.hpp"
