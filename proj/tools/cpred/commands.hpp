#pragma once

#include "config.hpp"

namespace cpred::cli {

void run_basis(const RunConfig& cfg);
void run_influence(const RunConfig& cfg);
void run_cpr(const RunConfig& cfg);
void run_cnr(const RunConfig& cfg);
void run_simulate(const RunConfig& cfg);

}  // namespace cpred::cli
