#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/math.hpp"

namespace zerocast {

enum class Freq { daily, monthly };

inline std::string freq_name(Freq f) { return f == Freq::daily ? "daily" : "monthly"; }

inline Freq parse_freq(const std::string& name) {
    if (name == "daily") return Freq::daily;
    if (name == "monthly") return Freq::monthly;
    throw ConfigError("unknown freq '" + name + "' (expected daily or monthly)");
}

/**
 * @brief Run-level configuration shared by every command.
 */
struct RunConfig {
    Freq freq = Freq::daily;
    int horizon = 1;
    int context = 1;
    int train_end = 2;
    int batch_size = 32;
    std::uint64_t seed = 1;

    void validate() const {
        if (horizon < 1) throw ConfigError("horizon must be at least 1");
        if (context < 1) throw ConfigError("context must be at least 1");
        if (train_end <= horizon) throw ConfigError("train_end must exceed horizon so the training segment is non-empty");
        if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    }
};

/**
 * @brief One demand series; values are indexed by t = 1..length in CSV terms.
 */
struct TimeSeries {
    std::string id;
    std::vector<double> values;

    bool is_integer() const {
        for (double v : values) {
            if (v != std::floor(v)) return false;
        }
        return true;
    }
};

/**
 * @brief 1-based inclusive index ranges of the three evaluation segments.
 *
 * Training covers 1..T-h, validation T-h+1..T, test T+1..T+h; together they
 * partition 1..T+h.
 */
struct SplitView {
    int train_end_t;
    int horizon;

    static SplitView make(int T, int h) {
        if (h < 1 || T - h < 1) throw ConfigError("split requires horizon >= 1 and train_end > horizon");
        return SplitView{T, h};
    }

    int train_first() const { return 1; }
    int train_last() const { return train_end_t - horizon; }
    int validation_first() const { return train_end_t - horizon + 1; }
    int validation_last() const { return train_end_t; }
    int test_first() const { return train_end_t + 1; }
    int test_last() const { return train_end_t + horizon; }
};

/**
 * @brief Per-series summary: scale factor, sparsity and size volatility.
 */
struct SeriesStats {
    double scale;
    double adi;
    double cv2;
    long long nonzero_count;
};

// Stats over an explicit window of training values. The scale is the mean
// of the strictly positive values (1 if there are none), ADI the window
// length over the positive count (+inf sentinel for all-zero windows), and
// cv2 the population variance over squared mean of the positive values.
inline SeriesStats compute_stats(const std::vector<double>& train_values) {
    double pos_sum = 0.0;
    double pos_sumsq = 0.0;
    long long nonzero = 0;
    for (double v : train_values) {
        if (v > 0.0) {
            pos_sum += v;
            pos_sumsq += v * v;
            ++nonzero;
        }
    }
    SeriesStats st;
    st.nonzero_count = nonzero;
    if (nonzero == 0) {
        st.scale = 1.0;
        st.adi = kInf;
        st.cv2 = 0.0;
        return st;
    }
    const double mean = pos_sum / nonzero;
    st.scale = mean;
    st.adi = static_cast<double>(train_values.size()) / static_cast<double>(nonzero);
    if (nonzero < 2) {
        st.cv2 = 0.0;
    } else {
        const double var = pos_sumsq / nonzero - mean * mean;
        st.cv2 = std::max(0.0, var) / (mean * mean);
    }
    return st;
}

// Stats of a bare series under a split, end-aligning the series at the
// split's last test index and using only observed training values.
inline SeriesStats compute_stats(const TimeSeries& ts, const SplitView& split) {
    const int frame = split.test_last();
    const int offset = frame - static_cast<int>(ts.values.size());
    std::vector<double> train;
    for (int t = std::max(1, offset + 1); t <= split.train_last(); ++t) {
        train.push_back(ts.values[static_cast<std::size_t>(t - offset - 1)]);
    }
    return compute_stats(train);
}

/**
 * @brief A collection of series sharing one frequency, horizon, context
 * and train/test frame.
 *
 * Series shorter than the T+h frame are end-aligned: their last value sits
 * at t = T+h and missing early history reads as zero.
 */
struct Dataset {
    std::vector<TimeSeries> series;
    Freq freq = Freq::daily;
    int horizon = 1;
    int context = 1;
    int train_end = 2;

    int frame() const { return train_end + horizon; }

    SplitView split() const { return SplitView::make(train_end, horizon); }

    void validate() const {
        if (horizon < 1) throw ConfigError("horizon must be at least 1");
        if (context < 1) throw ConfigError("context must be at least 1");
        if (train_end - horizon < 1) throw ConfigError("train_end must exceed horizon so the training segment is non-empty");
        for (const auto& s : series) {
            const auto len = static_cast<int>(s.values.size());
            if (len < 2 * horizon) {
                throw ConfigError("series '" + s.id + "' has length " + std::to_string(len) +
                                  ", shorter than twice the horizon " + std::to_string(horizon));
            }
            if (len > frame()) {
                throw ConfigError("series '" + s.id + "' has length " + std::to_string(len) +
                                  ", longer than the frame train_end+horizon = " + std::to_string(frame()));
            }
            for (std::size_t k = 0; k < s.values.size(); ++k) {
                const double v = s.values[k];
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw DomainError("series '" + s.id + "' has invalid value " + std::to_string(v) +
                                      " at t=" + std::to_string(k + 1));
                }
            }
        }
    }

    int offset(std::size_t i) const { return frame() - static_cast<int>(series[i].values.size()); }

    bool padded(std::size_t i) const { return offset(i) > 0; }

    // Value at global index t in 1..T+h; padded history reads as zero.
    double at(std::size_t i, int t) const {
        const int off = offset(i);
        if (t <= off) return 0.0;
        return series[i].values[static_cast<std::size_t>(t - off - 1)];
    }

    std::vector<double> window(std::size_t i, int t_first, int t_last) const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(t_last - t_first + 1));
        for (int t = t_first; t <= t_last; ++t) out.push_back(at(i, t));
        return out;
    }

    // Stats over the observed part of the training range.
    SeriesStats stats(std::size_t i) const {
        const SplitView sv = split();
        std::vector<double> train;
        for (int t = std::max(1, offset(i) + 1); t <= sv.train_last(); ++t) train.push_back(at(i, t));
        return compute_stats(train);
    }
};

} // namespace zerocast
