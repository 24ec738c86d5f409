#include "traderbench/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "traderbench/error.hpp"
#include "traderbench/indicators.hpp"
#include "traderbench/rng.hpp"

namespace traderbench::transforms {

namespace {

constexpr std::array<std::pair<TransformKind, std::string_view>, 4> kKinds{{
    {TransformKind::Baseline, "baseline"},
    {TransformKind::Noisy, "noisy"},
    {TransformKind::Meta, "meta"},
    {TransformKind::Adversarial, "adversarial"},
}};

// Relative margin by which a flipped signal clears zero.
constexpr double kFlipMargin = 1e-6;
// Breakout closes settle this far inside the level they pierced.
constexpr double kRevertInside = 0.002;
// Bars searched for the prior high of an RSI divergence.
constexpr std::size_t kDivergenceLookback = 20;

void require(bool ok, const char* field, const char* rule) {
    if (!ok) fail(ErrorCode::InvalidParams, std::string(field) + " " + rule);
}

void scale_bar(Candle& c, double factor) {
    c.open *= factor;
    c.high *= factor;
    c.low *= factor;
    c.close *= factor;
}

}  // namespace

std::string_view kind_name(TransformKind k) noexcept {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "unknown";
}

std::optional<TransformKind> parse_kind(std::string_view name) noexcept {
    for (const auto& [kind, n] : kKinds)
        if (n == name) return kind;
    return std::nullopt;
}

void validate(const TransformParams& p) {
    require(p.noise_sigma >= 0 && p.noise_sigma < 1, "noise_sigma", "must be in [0,1)");
    require(p.spike_prob >= 0 && p.spike_prob <= 1, "spike_prob", "must be in [0,1]");
    require(p.spike_mult > 0, "spike_mult", "must be positive");
    require(p.trend_len >= 2, "trend_len", "must be >= 2");
    require(p.trend_drift >= 0 && p.trend_drift < 1, "trend_drift", "must be in [0,1)");
    require(p.breakout_lookback >= 2, "breakout_lookback", "must be >= 2");
    require(p.breakout_overshoot > 0 && p.breakout_overshoot < 1, "breakout_overshoot",
            "must be in (0,1)");
    require(p.injection_len >= 2, "injection_len", "must be >= 2");
    require(p.injection_amp > 0 && p.injection_amp < 1, "injection_amp", "must be in (0,1)");
    require(p.ma_fast >= 1 && p.ma_fast < p.ma_slow, "ma_fast", "must satisfy 1 <= ma_fast < ma_slow");
    require(p.rsi_window >= 1, "rsi_window", "must be >= 1");
    require(p.macd_fast >= 1 && p.macd_fast < p.macd_slow && p.macd_signal >= 1, "macd_fast",
            "must satisfy 1 <= macd_fast < macd_slow, macd_signal >= 1");
}

// ---------------------------------------------------------------------------
// noisy

CandleSeries t_noisy(const CandleSeries& series, std::uint64_t seed, const TransformParams& params) {
    validate(params);
    if (series.empty()) fail(ErrorCode::SeriesTooShort, "noisy transform needs a non-empty series");
    Rng noise(seed, "noisy.price");
    Rng spikes(seed, "noisy.volume");
    std::vector<Candle> out = series.candles();
    for (auto& c : out) {
        const double eps = noise.normal(0.0, params.noise_sigma);
        // Floor keeps prices positive under extreme draws; unreachable at sigma = 2%.
        const double factor = std::max(1.0 + eps, 1e-3);
        scale_bar(c, factor);
        repair(c);
        if (spikes.bernoulli(params.spike_prob)) c.volume *= params.spike_mult;
    }
    return series.with_candles(std::move(out));
}

// ---------------------------------------------------------------------------
// meta

namespace {

struct Span {
    std::size_t first;
    std::size_t last;  // inclusive
    bool overlaps(std::size_t a, std::size_t b) const { return a <= last && first <= b; }
};

bool is_free(const std::vector<Span>& used, std::size_t a, std::size_t b) {
    return std::none_of(used.begin(), used.end(), [&](const Span& s) { return s.overlaps(a, b); });
}

void apply_trend_windows(std::vector<Candle>& bars, std::uint64_t seed, const TransformParams& p,
                         std::vector<std::string>& notes) {
    Rng rng(seed, "meta.trend");
    const std::size_t n = bars.size();
    std::vector<Span> used;
    for (std::size_t w = 0; w < p.trend_windows; ++w) {
        std::vector<std::size_t> starts;
        for (std::size_t st = 0; st + p.trend_len <= n; ++st)
            if (is_free(used, st, st + p.trend_len - 1)) starts.push_back(st);
        if (starts.empty()) {
            notes.push_back("meta: placed " + std::to_string(w) + " of " +
                            std::to_string(p.trend_windows) + " trend windows (no room)");
            return;
        }
        const std::size_t st = starts[rng.below(starts.size())];
        const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double span = static_cast<double>(p.trend_len - 1);
        for (std::size_t k = 0; k < p.trend_len; ++k) {
            // Triangular ramp: 0 at both ends, peak drift mid-window.
            const double tri = 1.0 - std::abs(2.0 * static_cast<double>(k) / span - 1.0);
            scale_bar(bars[st + k], 1.0 + dir * p.trend_drift * tri);
        }
        used.push_back({st, st + p.trend_len - 1});
    }
}

double trailing_extreme(const std::vector<Candle>& bars, std::size_t from, std::size_t to,
                        bool want_max) {
    double v = want_max ? bars[from].high : bars[from].low;
    for (std::size_t k = from; k <= to; ++k)
        v = want_max ? std::max(v, bars[k].high) : std::min(v, bars[k].low);
    return v;
}

void apply_false_levels(std::vector<Candle>& bars, const std::vector<Candle>& original,
                        std::uint64_t seed, const TransformParams& p,
                        std::vector<std::string>& notes) {
    const std::size_t n = bars.size();
    const std::size_t lb = p.breakout_lookback;
    std::vector<Span> used;
    for (bool breakout : {true, false}) {
        Rng rng(seed, breakout ? "meta.breakout" : "meta.support");
        for (std::size_t b = 0; b < p.breakout_count; ++b) {
            std::vector<std::size_t> sites;
            for (std::size_t i = lb; i < n; ++i)
                if (is_free(used, i, std::min(i + 1, n - 1))) sites.push_back(i);
            if (sites.empty()) {
                notes.push_back(std::string("meta: no room for ") +
                                (breakout ? "false breakout" : "support violation"));
                break;
            }
            const std::size_t i = sites[rng.below(sites.size())];
            const std::size_t duration = std::min<std::size_t>(1 + rng.below(2), n - i);
            for (std::size_t j = i; j < i + duration; ++j) {
                // Level = pre-transform trailing extreme, or the current one up to the
                // site start, whichever is more extreme.
                const double orig = trailing_extreme(original, j - lb, j - 1, breakout);
                const double cur = trailing_extreme(bars, j - lb, i - 1, breakout);
                Candle& c = bars[j];
                if (breakout) {
                    const double level = std::max(orig, cur);
                    c.high = std::max(c.high, level * (1.0 + p.breakout_overshoot));
                    c.close = std::min(c.close, level * (1.0 - kRevertInside));
                } else {
                    const double level = std::min(orig, cur);
                    c.low = std::min(c.low, level * (1.0 - p.breakout_overshoot));
                    c.close = std::max(c.close, level * (1.0 + kRevertInside));
                }
                repair(c);
            }
            // Keep a bar of clearance so sites never touch.
            used.push_back({i == 0 ? 0 : i - 1, i + duration});
        }
    }
}

}  // namespace

namespace {

TransformOutcome meta_detailed(const CandleSeries& series, std::uint64_t seed,
                               const TransformParams& params) {
    validate(params);
    if (series.size() < params.trend_len)
        fail(ErrorCode::SeriesTooShort, "meta transform needs at least trend_len candles");
    TransformOutcome out;
    std::vector<Candle> bars = t_noisy(series, seed, params).candles();
    apply_trend_windows(bars, seed, params, out.notes);
    if (params.breakout_count > 0 && series.size() > params.breakout_lookback)
        apply_false_levels(bars, series.candles(), seed, params, out.notes);
    else if (params.breakout_count > 0)
        out.notes.push_back("meta: series shorter than breakout lookback; no false levels");
    out.series = series.with_candles(std::move(bars));
    return out;
}

}  // namespace

CandleSeries t_meta(const CandleSeries& series, std::uint64_t seed, const TransformParams& params) {
    return meta_detailed(series, seed, params).series;
}

// ---------------------------------------------------------------------------
// adversarial

namespace {

double window_mean(const std::vector<double>& c, std::size_t end, std::size_t w) {
    double sum = 0.0;
    for (std::size_t k = end + 1 - w; k <= end; ++k) sum += c[k];
    return sum / static_cast<double>(w);
}

int orientation(double v) { return v >= 0 ? 1 : -1; }

struct Candidate {
    std::size_t target;
    double lambda;
    double dir;
};

class Injector {
public:
    Injector(std::vector<double> closes, const TransformParams& p, std::uint64_t seed)
        : c_(std::move(closes)), factor_(c_.size(), 1.0), p_(p), rng_(seed, "adversarial.sites") {}

    void ma_sites(TransformOutcome& out) {
        for (std::size_t k = 0; k < p_.injection_count; ++k) {
            auto cands = ma_candidates();
            if (cands.empty()) {
                out.notes.push_back("adversarial: placed " + std::to_string(k) + " of " +
                                    std::to_string(p_.injection_count) +
                                    " ma_cross sites (no feasible site under cap)");
                return;
            }
            commit("ma_cross", cands[rng_.below(cands.size())], out);
        }
    }

    void rsi_site(TransformOutcome& out) {
        const std::size_t L = p_.injection_len;
        const std::size_t n = c_.size();
        const std::size_t lookback = kDivergenceLookback;
        struct RsiCand {
            std::size_t target;
            double alpha;
        };
        std::vector<RsiCand> cands;
        for (std::size_t s = p_.rsi_window + L; s + 1 < n; ++s) {
            if (!window_free(s)) continue;
            const std::size_t lo = std::max(p_.rsi_window, s >= lookback ? s - lookback : 0);
            std::size_t peak = lo;
            for (std::size_t j = lo; j <= s - L; ++j)
                if (c_[j] > c_[peak]) peak = j;
            if (peak == 0 || c_[peak] < c_[peak - 1] || c_[peak] < c_[peak + 1]) continue;
            if (c_[s] >= c_[peak]) continue;  // already a higher high; nothing to inject
            const double alpha = c_[peak] / c_[s] * (1.0 + 1e-4) - 1.0;
            if (alpha > p_.injection_amp) continue;
            std::vector<double> trial(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(s + 1));
            for (std::size_t k = 0; k < L; ++k)
                trial[s + 1 - L + k] *= 1.0 + alpha * static_cast<double>(k + 1) / static_cast<double>(L);
            const auto r = indicators::rsi(trial, p_.rsi_window);
            const double rsi_new = r[s - p_.rsi_window];
            const double rsi_peak = r[peak - p_.rsi_window];
            const double prior_high =
                *std::max_element(trial.begin() + static_cast<std::ptrdiff_t>(lo),
                                  trial.begin() + static_cast<std::ptrdiff_t>(s));
            if (trial[s] > prior_high && rsi_new < rsi_peak) cands.push_back({s, alpha});
        }
        if (cands.empty()) {
            out.notes.push_back("adversarial: no feasible rsi_divergence site under cap");
            return;
        }
        const auto pick = cands[rng_.below(cands.size())];
        const std::size_t first = pick.target + 1 - L;
        for (std::size_t k = 0; k < L; ++k) {
            const double f = 1.0 + pick.alpha * static_cast<double>(k + 1) / static_cast<double>(L);
            c_[first + k] *= f;
            factor_[first + k] *= f;
        }
        mark(pick.target);
        out.sites.push_back({"rsi_divergence", first, pick.target, pick.alpha});
    }

    void macd_site(TransformOutcome& out) {
        const std::size_t n = c_.size();
        if (n < p_.macd_slow + p_.macd_signal) {
            out.notes.push_back("adversarial: series too short for a macd_flip site");
            return;
        }
        const auto triple = indicators::macd(c_, p_.macd_fast, p_.macd_slow, p_.macd_signal);
        const std::size_t off = triple.offset;
        const std::size_t L = p_.injection_len;
        const double af = 2.0 / (static_cast<double>(p_.macd_fast) + 1.0);
        const double as = 2.0 / (static_cast<double>(p_.macd_slow) + 1.0);
        const double ag = 2.0 / (static_cast<double>(p_.macd_signal) + 1.0);
        std::vector<Candidate> cands;
        for (std::size_t s = off + L; s + 1 < n; ++s) {
            if (!window_free(s)) continue;
            const double h = triple.histogram[s - off];
            const int orient = orientation(h);
            const double dir = orient > 0 ? -1.0 : 1.0;
            // Perturbations start after every EMA seed, so their effect on the
            // histogram is the plain linear recurrence response.
            const std::size_t first = s + 1 - L;
            const std::size_t horizon = std::min(n - 1, s + 2 * p_.macd_slow);
            std::vector<double> dh(horizon - first + 1);
            double df = 0, ds = 0, dg = 0;
            for (std::size_t i = first; i <= horizon; ++i) {
                const double u = i <= s ? dir * c_[i] : 0.0;
                df = af * u + (1 - af) * df;
                ds = as * u + (1 - as) * ds;
                const double dm = df - ds;
                dg = ag * dm + (1 - ag) * dg;
                dh[i - first] = dm - dg;
            }
            const double effect = dh[s - first];
            if (orientation(effect) == orient || effect == 0.0) continue;
            const double lambda = (std::abs(h) + kFlipMargin * c_[s]) / std::abs(effect);
            if (lambda > p_.injection_amp) continue;
            const double prev = triple.histogram[s - 1 - off] + lambda * (s - 1 >= first ? dh[s - 1 - first] : 0.0);
            if (orientation(prev) != orient) continue;
            bool reverts = false;
            for (std::size_t j = s + 1; j <= horizon && !reverts; ++j)
                reverts = orientation(triple.histogram[j - off] + lambda * dh[j - first]) == orient;
            if (reverts) cands.push_back({s, lambda, dir});
        }
        if (cands.empty()) {
            out.notes.push_back("adversarial: no feasible macd_flip site under cap");
            return;
        }
        commit("macd_flip", cands[rng_.below(cands.size())], out);
    }

    const std::vector<double>& factors() const { return factor_; }

private:
    std::vector<Candidate> ma_candidates() const {
        const std::size_t n = c_.size();
        const std::size_t L = p_.injection_len;
        const std::size_t fast = p_.ma_fast;
        const std::size_t slow = p_.ma_slow;
        auto diff = [&](std::size_t j) { return window_mean(c_, j, fast) - window_mean(c_, j, slow); };
        // Response of diff[j] to scaling closes in [first, last] by (1 + dir).
        auto response = [&](std::size_t first, std::size_t last, double dir, std::size_t j) {
            double r = 0.0;
            for (std::size_t k = first; k <= last && k <= j; ++k) {
                double w = 0.0;
                if (k + fast > j) w += 1.0 / static_cast<double>(fast);
                if (k + slow > j) w -= 1.0 / static_cast<double>(slow);
                r += dir * c_[k] * w;
            }
            return r;
        };
        std::vector<Candidate> out;
        for (std::size_t s = std::max(slow, L); s + 1 < n; ++s) {
            if (!window_free(s)) continue;
            const std::size_t first = s + 1 - L;
            const double d = diff(s);
            const int orient = orientation(d);
            const double dir = orient > 0 ? -1.0 : 1.0;
            const double effect = response(first, s, dir, s);
            if (effect == 0.0 || orientation(effect) == orient) continue;
            const double lambda = (std::abs(d) + kFlipMargin * c_[s]) / std::abs(effect);
            if (lambda > p_.injection_amp) continue;
            // The flip must be a fresh crossing at s...
            if (orientation(diff(s - 1) + lambda * response(first, s, dir, s - 1)) != orient) continue;
            // ...that unwinds once the window rolls off.
            bool reverts = false;
            for (std::size_t j = s + 1; j < n && j <= s + slow && !reverts; ++j)
                reverts = orientation(diff(j) + lambda * response(first, s, dir, j)) == orient;
            if (reverts) out.push_back({s, lambda, dir});
        }
        return out;
    }

    void commit(const char* kind, const Candidate& cand, TransformOutcome& out) {
        const std::size_t first = cand.target + 1 - p_.injection_len;
        const double f = 1.0 + cand.dir * cand.lambda;
        for (std::size_t k = first; k <= cand.target; ++k) {
            c_[k] *= f;
            factor_[k] *= f;
        }
        mark(cand.target);
        out.sites.push_back({kind, first, cand.target, cand.lambda});
    }

    // Sites keep ma_slow bars of clearance so one site's flip-and-revert is
    // never disturbed by another.
    bool window_free(std::size_t target) const {
        const std::size_t first = target + 1 - p_.injection_len;
        return is_free(used_, first, target);
    }

    void mark(std::size_t target) {
        const std::size_t first = target + 1 - p_.injection_len;
        const std::size_t pad = p_.ma_slow;
        used_.push_back({first >= pad ? first - pad : 0, target + pad});
    }

    std::vector<double> c_;
    std::vector<double> factor_;
    TransformParams p_;
    Rng rng_;
    std::vector<Span> used_;
};

}  // namespace

TransformOutcome t_adversarial_detailed(const CandleSeries& series, std::uint64_t seed,
                                        const TransformParams& params) {
    validate(params);
    if (series.size() < params.ma_slow + params.injection_len)
        fail(ErrorCode::SeriesTooShort, "adversarial transform needs at least ma_slow + injection_len candles");
    TransformOutcome out;
    const bool requested = params.injection_count > 0 || params.rsi_site || params.macd_site;
    if (!requested) {
        out.series = series;
        return out;
    }
    Injector inj(series.closes(), params, seed);
    inj.ma_sites(out);
    if (params.rsi_site) inj.rsi_site(out);
    if (params.macd_site) inj.macd_site(out);
    if (out.sites.empty())
        fail(ErrorCode::InjectionInfeasible,
             "adversarial: injection_amp " + std::to_string(params.injection_amp) +
                 " too small to flip any ma_cross/rsi/macd site");

    std::vector<Candle> bars = series.candles();
    const auto& f = inj.factors();
    for (std::size_t i = 0; i < bars.size(); ++i) {
        if (f[i] == 1.0) continue;
        bars[i].close *= f[i];
        repair(bars[i]);
    }
    std::sort(out.sites.begin(), out.sites.end(),
              [](const InjectionSite& a, const InjectionSite& b) { return a.first < b.first; });
    out.series = series.with_candles(std::move(bars));
    return out;
}

CandleSeries t_adversarial(const CandleSeries& series, std::uint64_t seed,
                           const TransformParams& params) {
    return t_adversarial_detailed(series, seed, params).series;
}

TransformOutcome apply_transform_detailed(const CandleSeries& series, const TransformSpec& spec) {
    switch (spec.kind) {
        case TransformKind::Baseline: {
            validate(spec.params);
            TransformOutcome out;
            out.series = series;
            return out;
        }
        case TransformKind::Noisy: {
            TransformOutcome out;
            out.series = t_noisy(series, spec.seed, spec.params);
            return out;
        }
        case TransformKind::Meta: return meta_detailed(series, spec.seed, spec.params);
        case TransformKind::Adversarial: return t_adversarial_detailed(series, spec.seed, spec.params);
    }
    fail(ErrorCode::InvalidParams, "unknown transform kind");
}

CandleSeries apply_transform(const CandleSeries& series, const TransformSpec& spec) {
    return apply_transform_detailed(series, spec).series;
}

}  // namespace traderbench::transforms
