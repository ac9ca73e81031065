#pragma once

#include "cuspmin/errors.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/mobius.hpp"
#include "cuspmin/periodic_mesh.hpp"
#include "cuspmin/discrete_area.hpp"
#include "cuspmin/minimize.hpp"
#include "cuspmin/surface_analysis.hpp"
#include "cuspmin/metric_surgery.hpp"
#include "cuspmin/ideal_tetrahedron.hpp"
#include "cuspmin/gieseking.hpp"
#include "cuspmin/cusp_experiments.hpp"
#include "cuspmin/report.hpp"
#include "cuspmin/run.hpp"
