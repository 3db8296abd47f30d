#include "satbridge/satgen.hpp"

#include <cmath>
#include <vector>

#include "satbridge/error.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

const char* to_string(GenDistribution d) {
    switch (d) {
        case GenDistribution::Uniform: return "uniform";
        case GenDistribution::PowerLaw: return "powerlaw";
        case GenDistribution::DoublePowerLaw: return "double-powerlaw";
    }
    return "?";
}

GenDistribution gen_distribution_from_string(const std::string& name) {
    if (name == "uniform") return GenDistribution::Uniform;
    if (name == "powerlaw") return GenDistribution::PowerLaw;
    if (name == "double-powerlaw") return GenDistribution::DoublePowerLaw;
    throw ArgumentError("unknown distribution: " + name);
}

void GenSpec::validate() const {
    if (n_vars < 1) throw ArgumentError("n_vars must be positive");
    if (n_clauses < 0) throw ArgumentError("n_clauses must be non-negative");
    if (k_min < 1 || k_min > k_max || k_max > n_vars)
        throw ArgumentError("require 1 <= k_min <= k_max <= n_vars");
    if (var_exponent <= 0 || size_exponent <= 0) throw ArgumentError("exponents must be positive");
    if (hard_fraction < 0.0 || hard_fraction > 1.0)
        throw ArgumentError("hard_fraction must be in [0,1]");
}

namespace {

// Inverse-CDF sampler over {0,..,n-1} with P(i) proportional to (i+1)^(-a).
class DiscretePowerLaw {
public:
    DiscretePowerLaw(int n, double a) : cdf_(n) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += std::pow(static_cast<double>(i + 1), -a);
            cdf_[i] = acc;
        }
        for (auto& c : cdf_) c /= acc;
    }

    int sample(Rng& rng) const {
        double u = rng.next_double();
        int lo = 0, hi = static_cast<int>(cdf_.size()) - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (cdf_[mid] < u) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

private:
    std::vector<double> cdf_;
};

}  // namespace

Formula generate(const GenSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Rank-exponent 1/(beta-1) so the variable frequency-vs-rank histogram
    // follows the requested degree exponent.
    const bool powerlaw_vars = spec.distribution != GenDistribution::Uniform;
    DiscretePowerLaw var_dist(spec.n_vars,
                              powerlaw_vars ? 1.0 / (spec.var_exponent - 1.0) : 0.0);
    const int n_sizes = spec.k_max - spec.k_min + 1;
    DiscretePowerLaw size_dist(n_sizes, spec.size_exponent);

    Formula f;
    f.n_vars = spec.n_vars;
    const int n_hard = static_cast<int>(std::floor(spec.hard_fraction * spec.n_clauses));
    std::vector<std::uint8_t> in_clause(spec.n_vars, 0);
    for (int ci = 0; ci < spec.n_clauses; ++ci) {
        int k;
        if (spec.distribution == GenDistribution::DoublePowerLaw)
            k = spec.k_min + size_dist.sample(rng);
        else
            k = spec.k_min + rng.next_int(n_sizes);
        std::vector<Literal> lits;
        lits.reserve(k);
        while (static_cast<int>(lits.size()) < k) {
            int v = powerlaw_vars ? var_dist.sample(rng) : rng.next_int(spec.n_vars);
            if (in_clause[v]) continue;  // resample: distinct variables per clause
            in_clause[v] = 1;
            lits.push_back({v, rng.next_bool()});
        }
        for (const auto& lit : lits) in_clause[lit.var] = 0;
        f.clauses.push_back(make_clause(std::move(lits), ci < n_hard));
    }
    return f;
}

}  // namespace satbridge
