#include "meshwm/capacity.hpp"

#include "meshwm/error.hpp"
#include "meshwm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace meshwm {

namespace {

void check_channel(std::size_t inputs, const TransitionMatrix& P)
{
    if (P.empty() || P.size() != inputs)
        throw InvalidArgument("capacity: transition matrix has " + std::to_string(P.size()) + " rows, expected " +
                              std::to_string(inputs));
    const std::size_t outs = P[0].size();
    for (const auto& row : P) {
        if (row.size() != outs || outs == 0)
            throw InvalidArgument("capacity: ragged transition matrix");
        double s = 0.0;
        for (double v : row) {
            if (!(v >= 0.0))
                throw InvalidArgument("capacity: negative transition probability");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw InvalidArgument("capacity: transition matrix rows must sum to 1");
    }
}

std::vector<double> output_law(std::span<const double> p, const TransitionMatrix& P)
{
    std::vector<double> q(P[0].size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t y = 0; y < q.size(); ++y)
            q[y] += p[x] * P[x][y];
    return q;
}

// D(P_x || q) in nats for every input.
std::vector<double> divergences(const TransitionMatrix& P, const std::vector<double>& q)
{
    std::vector<double> d(P.size(), 0.0);
    for (std::size_t x = 0; x < P.size(); ++x)
        for (std::size_t y = 0; y < q.size(); ++y)
            if (P[x][y] > 0.0)
                d[x] += P[x][y] * std::log(P[x][y] / q[y]);
    return d;
}

} // namespace

double mutual_information(std::span<const double> p, const TransitionMatrix& P)
{
    check_channel(p.size(), P);
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0))
            throw InvalidArgument("mutual_information: negative probability");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9)
        throw InvalidArgument("mutual_information: input distribution must sum to 1");
    const auto q = output_law(p, P);
    const auto d = divergences(P, q);
    double I = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x)
        I += p[x] * d[x];
    return I / std::log(2.0);
}

CapacityResult unit_cost_capacity(const TransitionMatrix& P, std::span<const double> costs, double tol, int max_iter)
{
    check_channel(costs.size(), P);
    for (double c : costs)
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidArgument("unit_cost_capacity: costs must be positive");
    if (!(tol > 0.0) || max_iter < 1)
        throw InvalidArgument("unit_cost_capacity: tol must be positive and max_iter at least 1");

    const double ln2 = std::log(2.0);
    const std::size_t nx = costs.size();
    CapacityResult res;
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
    for (int it = 0;; ++it) {
        const auto q = output_law(p, P);
        const auto d = divergences(P, q);
        double I = 0.0, cp = 0.0, ub = -1e300;
        for (std::size_t x = 0; x < nx; ++x) {
            I += p[x] * d[x];
            cp += p[x] * costs[x];
            ub = std::max(ub, d[x] / costs[x]);
        }
        const double ratio = I / cp;
        res.trace.push_back(ratio / ln2);
        res.c_unit = ratio / ln2;
        res.upper_bound = ub / ln2;
        res.p_star = p;
        res.iterations = it;
        if ((ub - ratio) / ln2 < tol) {
            res.converged = true;
            break;
        }
        if (it >= max_iter)
            break;
        std::vector<double> logw(nx);
        for (std::size_t x = 0; x < nx; ++x)
            logw[x] = (p[x] > 0.0 ? std::log(p[x]) : -INFINITY) + d[x] - ratio * costs[x];
        const double m = *std::max_element(logw.begin(), logw.end());
        double z = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
            z += (p[x] = std::exp(logw[x] - m));
        for (double& v : p)
            v /= z;
    }
    return res;
}

namespace {

constexpr std::uint64_t kTop = 0xffffffffULL;
constexpr std::uint64_t kHalf = 0x80000000ULL;
constexpr std::uint64_t kQuarter = 0x40000000ULL;
constexpr std::uint64_t kThreeQuarter = 0xc0000000ULL;
constexpr std::uint64_t kTotal = 65536;

struct Encoder {
    std::uint64_t low = 0, high = kTop, pending = 0;
    std::vector<std::uint8_t> out;

    void emit(std::uint8_t b)
    {
        out.push_back(b);
        for (; pending > 0; --pending)
            out.push_back(b ^ 1u);
    }

    void encode(std::uint64_t c0, std::uint64_t c1)
    {
        const std::uint64_t range = high - low + 1;
        high = low + range * c1 / kTotal - 1;
        low = low + range * c0 / kTotal;
        for (;;) {
            if (high < kHalf) {
                emit(0);
            } else if (low >= kHalf) {
                emit(1);
                low -= kHalf;
                high -= kHalf;
            } else if (low >= kQuarter && high < kThreeQuarter) {
                ++pending;
                low -= kQuarter;
                high -= kQuarter;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1u;
        }
    }
};

} // namespace

DistributionTransformer::DistributionTransformer(std::span<const double> target)
{
    if (target.size() < 2)
        throw InvalidArgument("distribution transformer: need at least two symbols");
    double s = 0.0;
    for (double v : target) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument("distribution transformer: every symbol needs positive probability");
        s += v;
    }
    if (target.size() > kTotal / 2)
        throw InvalidArgument("distribution transformer: alphabet too large for 16-bit frequencies");
    freq_.resize(target.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        freq_[i] = static_cast<std::uint32_t>(std::max<long long>(1, std::llround(target[i] / s * kTotal)));
        total += freq_[i];
    }
    // push the rounding remainder onto the most probable symbol(s)
    while (total != static_cast<std::int64_t>(kTotal)) {
        const auto big = static_cast<std::size_t>(std::max_element(freq_.begin(), freq_.end()) - freq_.begin());
        if (total > static_cast<std::int64_t>(kTotal)) {
            const auto take = std::min<std::int64_t>(total - kTotal, freq_[big] - 1);
            freq_[big] -= static_cast<std::uint32_t>(take);
            total -= take;
        } else {
            freq_[big] += static_cast<std::uint32_t>(kTotal - total);
            total = kTotal;
        }
    }
    cum_.assign(freq_.size() + 1, 0);
    std::partial_sum(freq_.begin(), freq_.end(), cum_.begin() + 1);
}

std::vector<std::uint32_t> DistributionTransformer::transform(std::span<const std::uint8_t> bits) const
{
    std::vector<std::uint32_t> symbols;
    if (bits.empty())
        return symbols;
    // Past the end the decoder reads a fixed pseudo-random tail. Zero padding can
    // park the value on an interval midpoint, where no further bit is ever emitted.
    std::size_t pos = 0;
    Rng tail(0x7a11b175ULL);
    auto next_bit = [&]() -> std::uint64_t {
        if (pos < bits.size())
            return bits[pos++] & 1u;
        return tail.bit() ? 1u : 0u;
    };

    std::uint64_t low = 0, high = kTop, value = 0;
    for (int i = 0; i < 32; ++i)
        value = (value << 1) | next_bit();
    Encoder enc;
    while (enc.out.size() < bits.size()) {
        const std::uint64_t range = high - low + 1;
        const std::uint64_t scaled = ((value - low + 1) * kTotal - 1) / range;
        const auto s = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), scaled) - cum_.begin() - 1);
        symbols.push_back(static_cast<std::uint32_t>(s));
        enc.encode(cum_[s], cum_[s + 1]);
        high = low + range * cum_[s + 1] / kTotal - 1;
        low = low + range * cum_[s] / kTotal;
        for (;;) {
            if (high < kHalf) {
            } else if (low >= kHalf) {
                low -= kHalf;
                high -= kHalf;
                value -= kHalf;
            } else if (low >= kQuarter && high < kThreeQuarter) {
                low -= kQuarter;
                high -= kQuarter;
                value -= kQuarter;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1u;
            value = (value << 1) | next_bit();
        }
    }
    return symbols;
}

std::vector<std::uint8_t> DistributionTransformer::inverse(std::span<const std::uint32_t> symbols,
                                                           std::size_t bit_count) const
{
    Encoder enc;
    for (auto s : symbols) {
        if (s >= freq_.size())
            throw InvalidArgument("inverse_transform: invalid symbol " + std::to_string(s));
        enc.encode(cum_[s], cum_[s + 1]);
        if (enc.out.size() >= bit_count)
            break;
    }
    if (enc.out.size() < bit_count)
        throw InvalidArgument("inverse_transform: symbols determine only " + std::to_string(enc.out.size()) +
                              " of " + std::to_string(bit_count) + " bits");
    enc.out.resize(bit_count);
    return enc.out;
}

std::vector<std::uint32_t> distribution_transform(std::span<const std::uint8_t> bits, std::span<const double> target)
{
    return DistributionTransformer(target).transform(bits);
}

std::vector<std::uint8_t> inverse_transform(std::span<const std::uint32_t> symbols, std::span<const double> target,
                                            std::size_t bit_count)
{
    return DistributionTransformer(target).inverse(symbols, bit_count);
}

} // namespace meshwm
