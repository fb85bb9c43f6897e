#pragma once

// Umbrella header.

#include "analytic_n2.hpp"
#include "balance_sheet.hpp"
#include "cascade.hpp"
#include "config.hpp"
#include "credit_network.hpp"
#include "landscape.hpp"
#include "monte_carlo.hpp"
#include "plot.hpp"
#include "portfolio.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "shocks.hpp"
#include "system.hpp"
#include "table_io.hpp"
