#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zerocast/rng.hpp"
#include "zerocast/series.hpp"

namespace zerocast {

// (series index, window end w); the context is y_{w-c+1..w} and the target
// window y_{w+1..w+h}.
using Batch = std::vector<std::pair<std::size_t, int>>;

/**
 * @brief Uniform sampler over (series, window end) pairs with replacement.
 *
 * Window ends range over [c, T-h] so the context lies inside the training
 * segment; the stream is fully determined by its seed.
 */
class BatchStream {
public:
    BatchStream(const Dataset& ds, int batch_size, std::uint64_t seed)
        : n_series_(ds.series.size()),
          w_lo_(ds.context),
          w_hi_(ds.train_end - ds.horizon),
          batch_size_(batch_size),
          rng_(seed) {
        if (ds.series.empty()) throw ConfigError("cannot batch an empty dataset");
        if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
        if (w_hi_ < w_lo_) {
            throw ConfigError("no valid training windows: train_end - horizon = " + std::to_string(w_hi_) +
                              " is below context = " + std::to_string(w_lo_));
        }
    }

    Batch next() {
        Batch batch;
        batch.reserve(static_cast<std::size_t>(batch_size_));
        for (int k = 0; k < batch_size_; ++k) {
            const auto i = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(n_series_) - 1));
            const auto w = static_cast<int>(rng_.uniform_int(w_lo_, w_hi_));
            batch.emplace_back(i, w);
        }
        return batch;
    }

private:
    std::size_t n_series_;
    int w_lo_;
    int w_hi_;
    int batch_size_;
    Rng rng_;
};

inline BatchStream make_batches(const Dataset& ds, int batch_size, std::uint64_t seed) {
    return BatchStream(ds, batch_size, seed);
}

} // namespace zerocast
