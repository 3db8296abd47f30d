#pragma once

#include <cstdint>
#include <string>

#include "satbridge/maxsat.hpp"

namespace satbridge {

enum class GenDistribution { Uniform, PowerLaw, DoublePowerLaw };

const char* to_string(GenDistribution d);
GenDistribution gen_distribution_from_string(const std::string& name);

struct GenSpec {
    GenDistribution distribution = GenDistribution::Uniform;
    int n_vars = 50;
    int n_clauses = 150;
    int k_min = 1;
    int k_max = 3;
    double var_exponent = 2.5;   // beta_v, PowerLaw and DoublePowerLaw
    double size_exponent = 2.0;  // beta_k, DoublePowerLaw only
    std::uint64_t seed = 0;
    double hard_fraction = 0.0;

    void validate() const;
};

// Deterministic for a fixed spec. Variables within a clause are distinct,
// so duplicates and tautologies cannot occur. The first
// floor(hard_fraction * n_clauses) clauses are hard, the rest soft weight 1.
Formula generate(const GenSpec& spec);

}  // namespace satbridge
