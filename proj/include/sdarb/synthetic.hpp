#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdarb/discretize.hpp"
#include "sdarb/io.hpp"

namespace sdarb {

/// Stand-in inputs for the discretization experiment: a two-bump mixture
/// density for mu and kernels of the form
///   pi(x) = c exp(-slope (x - 1)) (1 + height exp(-((x - center) / width)^2 / 2)),
/// with c chosen so that int pi dmu = 1 over the table.
struct SyntheticConfig {
    struct Bump {
        double weight = 0;
        double mean = 0;
        double sd = 0;
    };
    struct Kernel {
        double slope = 0;
        double height = 0;
        double center = 1;
        double width = 1;
    };

    int version = 1;
    double table_lo = 0;
    double table_hi = 0;
    std::size_t samples = 0;
    double lo = 0;  ///< discretization interval
    double hi = 0;
    std::vector<std::size_t> n_list;
    std::vector<Bump> density;
    std::map<std::string, Kernel> kernels;
};

SyntheticConfig synthetic_from_json(const io::Json& j);

DensityTable<double> synthetic_density(const SyntheticConfig& cfg);

/// Sampled on the density grid; throws Parse for an unknown kernel name.
KernelTable synthetic_kernel(const SyntheticConfig& cfg, const std::string& name);

}  // namespace sdarb
