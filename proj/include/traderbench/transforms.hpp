#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traderbench/marketdata.hpp"

namespace traderbench::transforms {

enum class TransformKind { Baseline, Noisy, Meta, Adversarial };

inline constexpr TransformKind kAllKinds[] = {TransformKind::Baseline, TransformKind::Noisy,
                                             TransformKind::Meta, TransformKind::Adversarial};

std::string_view kind_name(TransformKind k) noexcept;
std::optional<TransformKind> parse_kind(std::string_view name) noexcept;

struct TransformParams {
    // noisy
    double noise_sigma = 0.02;
    double spike_prob = 0.05;
    double spike_mult = 3.0;
    // meta
    std::size_t trend_windows = 3;
    std::size_t trend_len = 20;
    double trend_drift = 0.05;
    std::size_t breakout_count = 2;
    std::size_t breakout_lookback = 20;
    double breakout_overshoot = 0.01;
    // adversarial
    std::size_t injection_count = 3;
    std::size_t injection_len = 5;
    double injection_amp = 0.005;
    std::size_t ma_fast = 10;
    std::size_t ma_slow = 30;
    bool rsi_site = true;
    bool macd_site = true;
    std::size_t rsi_window = 14;
    std::size_t macd_fast = 12;
    std::size_t macd_slow = 26;
    std::size_t macd_signal = 9;

    bool operator==(const TransformParams&) const = default;
};

/// Throws InvalidParams naming the first offending field.
void validate(const TransformParams& p);

struct TransformSpec {
    TransformKind kind = TransformKind::Baseline;
    std::uint64_t seed = 42;
    TransformParams params{};

    bool operator==(const TransformSpec&) const = default;
};

/// One targeted perturbation placed by the adversarial transform.
struct InjectionSite {
    std::string kind;        // "ma_cross", "rsi_divergence", "macd_flip"
    std::size_t first = 0;   // first perturbed bar
    std::size_t target = 0;  // bar whose signal flips
    double magnitude = 0.0;  // max |close'/close - 1| over the window
};

struct TransformOutcome {
    CandleSeries series;
    std::vector<InjectionSite> sites;
    std::vector<std::string> notes;  // requested effects that could not be placed
};

CandleSeries apply_transform(const CandleSeries& series, const TransformSpec& spec);
TransformOutcome apply_transform_detailed(const CandleSeries& series, const TransformSpec& spec);

CandleSeries t_noisy(const CandleSeries& series, std::uint64_t seed, const TransformParams& params);
CandleSeries t_meta(const CandleSeries& series, std::uint64_t seed, const TransformParams& params);
CandleSeries t_adversarial(const CandleSeries& series, std::uint64_t seed,
                           const TransformParams& params);
TransformOutcome t_adversarial_detailed(const CandleSeries& series, std::uint64_t seed,
                                        const TransformParams& params);

}  // namespace traderbench::transforms
