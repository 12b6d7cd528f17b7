#pragma once

/// Everything: geometry, rational functions, quadrature, representing
/// weights, difference quotients, density sets, L^p approximation and the
/// experiment harness.

#include <bpd/approx.hpp>
#include <bpd/density.hpp>
#include <bpd/diffquot.hpp>
#include <bpd/measures.hpp>
#include <bpd/quadrature.hpp>
#include <bpd/rational.hpp>
#include <bpd/region.hpp>

#include <bpd/harness/cli.hpp>
#include <bpd/harness/commands.hpp>
#include <bpd/harness/config.hpp>
#include <bpd/harness/report.hpp>
#include <bpd/harness/theorem.hpp>
