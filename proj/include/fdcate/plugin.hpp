#pragma once

#include "fdcate/cate_model.hpp"
#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// sum_{z,x} (q(z|1,c) - q(z|0,c)) e(x|c) m(z,x,c), using the numerator values.
double plugin_tau(const NuisancePoint& p);

/// Average of plugin_tau over the cross-fitted sets (only the first set when `swap` is off).
CateModel plugin_fit(const CrossFitNuisances& cross, bool swap = true);

CateModel plugin_fit(const SampleTable& data, const LearnerConfig& config, const NuisanceOptions& nuisance,
                     std::uint64_t seed, bool swap = true);

}  // namespace fdcate
