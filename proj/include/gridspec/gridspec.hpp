#pragma once

#include "gridspec/error.hpp"
#include "gridspec/netmodel.hpp"
#include "gridspec/spectral.hpp"
#include "gridspec/modes.hpp"
#include "gridspec/trajectory.hpp"
#include "gridspec/response.hpp"
#include "gridspec/freqdomain.hpp"
#include "gridspec/metrics.hpp"
#include "gridspec/control.hpp"
#include "gridspec/sim.hpp"
#include "gridspec/caseio.hpp"
#include "gridspec/report.hpp"
