#pragma once

#include <cmath>
#include <cstdint>

namespace barriermc {

// Per-run numerical event counters, merged chunk-wise.
struct Diagnostics {
    std::uint64_t quantile_clamps = 0;
    std::uint64_t barrier_clamps = 0;
    std::uint64_t degenerate_survival = 0;
    std::uint64_t early_knockouts = 0;
    std::uint64_t two_tail_steps = 0;

    void merge(const Diagnostics& o) {
        quantile_clamps += o.quantile_clamps;
        barrier_clamps += o.barrier_clamps;
        degenerate_survival += o.degenerate_survival;
        early_knockouts += o.early_knockouts;
        two_tail_steps += o.two_tail_steps;
    }
};

// Plain sum/sumsq accumulator. Chunk-local accumulation plus in-order merge
// keeps results bit-identical for any worker count.
struct RunningStats {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const RunningStats& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double sample_variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const {
        return n ? std::sqrt(sample_variance() / static_cast<double>(n)) : 0.0;
    }
};

struct EstimatorReport {
    double mean = 0.0;
    double sample_variance = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    int n_steps = 0;
    double wall_time_s = 0.0;
    Diagnostics diagnostics;

    static EstimatorReport from(const RunningStats& st, int n_steps, double wall_time,
                                const Diagnostics& diag, double scale = 1.0) {
        EstimatorReport r;
        r.mean = st.mean() * scale;
        r.sample_variance = st.sample_variance() * scale * scale;
        r.std_error = st.std_error() * scale;
        r.n_paths = st.n;
        r.n_steps = n_steps;
        r.wall_time_s = wall_time;
        r.diagnostics = diag;
        return r;
    }
};

// Product of factors in [0,1]; factors below 1e-8 are folded in log space so
// long products cannot underflow silently.
class ProductAccumulator {
public:
    void multiply(double f) {
        if (f < 1e-8) {
            log_part_ += std::log(f);
        } else {
            linear_ *= f;
        }
    }
    double value() const { return log_part_ == 0.0 ? linear_ : linear_ * std::exp(log_part_); }

private:
    double linear_ = 1.0;
    double log_part_ = 0.0;
};

}  // namespace barriermc
