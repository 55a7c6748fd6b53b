#include "meshwm/capacity.hpp"
#include "meshwm/channel.hpp"
#include "meshwm/error.hpp"
#include "meshwm/rng.hpp"
#include "meshwm/runlength.hpp"

#include <doctest.h>

#include <cmath>

using namespace meshwm;

namespace {

double h2(double p)
{
    return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// real root of x^-2 + x^-3 = 1 by bisection
double cost_root()
{
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::pow(mid, -2) + std::pow(mid, -3) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TransitionMatrix deletion_dmc(std::size_t alphabet_size, double p_d)
{
    const auto b = static_cast<unsigned>(std::lround(std::log2(static_cast<double>(alphabet_size))));
    return dmc_matrix(RunAlphabet::standard(b, 1), DeletionChannelSpec{p_d, 1, 0}).P;
}

std::vector<double> costs_for(std::size_t alphabet_size)
{
    std::vector<double> c;
    for (std::size_t x = 0; x < alphabet_size; ++x)
        c.push_back(2.0 + static_cast<double>(x));
    return c;
}

} // namespace

TEST_CASE("mutual_information: examples")
{
    const std::vector<double> uni{0.5, 0.5};
    CHECK(mutual_information(uni, {{1, 0}, {0, 1}}) == doctest::Approx(1.0));
    CHECK(mutual_information(uni, {{0.5, 0.5}, {0.5, 0.5}}) == doctest::Approx(0.0));
    CHECK(mutual_information(uni, {{0.9, 0.1}, {0.1, 0.9}}) == doctest::Approx(1 - h2(0.1)).epsilon(1e-12));
    CHECK(1 - h2(0.1) == doctest::Approx(0.5310).epsilon(1e-4));
    // zero-probability input contributes nothing
    CHECK(mutual_information(std::vector<double>{1.0, 0.0}, {{0.9, 0.1}, {0.1, 0.9}}) == doctest::Approx(0.0));

    CHECK_THROWS_AS(mutual_information(uni, {{1, 0}}), InvalidArgument);
    CHECK_THROWS_AS(mutual_information(std::vector<double>{0.7, 0.7}, {{1, 0}, {0, 1}}), InvalidArgument);
    CHECK_THROWS_AS(mutual_information(uni, {{0.7, 0.7}, {0, 1}}), InvalidArgument);
}

TEST_CASE("unit_cost_capacity: noiseless costed channel")
{
    const std::vector<double> costs{2, 3};
    const auto r = unit_cost_capacity({{1, 0}, {0, 1}}, costs);
    const double x0 = cost_root();
    CHECK(r.converged);
    CHECK(r.c_unit == doctest::Approx(std::log2(x0)).epsilon(1e-8));
    CHECK(std::abs(r.c_unit - 0.40569) < 1e-4);
    // optimal law is p(x) = x0^-c(x); the cheaper symbol is more likely
    CHECK(r.p_star[0] == doctest::Approx(std::pow(x0, -2)).epsilon(1e-6));
    CHECK(r.p_star[0] > r.p_star[1]);
    CHECK(r.p_star[0] + r.p_star[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit_cost_capacity: unit costs reduce to Shannon capacity")
{
    const std::vector<double> ones{1, 1};
    const auto r = unit_cost_capacity({{0.9, 0.1}, {0.1, 0.9}}, ones);
    CHECK(r.c_unit == doctest::Approx(1 - h2(0.1)).epsilon(1e-8));
    CHECK(r.p_star[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("unit_cost_capacity matches grid search on 2-input channels")
{
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        TransitionMatrix P(2, std::vector<double>(3));
        for (auto& row : P) {
            double s = 0;
            for (auto& v : row)
                s += v = rng.uniform(0.05, 1.0);
            for (auto& v : row)
                v /= s;
        }
        const std::vector<double> ones{1, 1};
        double best = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const std::vector<double> p{i / 1000.0, 1 - i / 1000.0};
            best = std::max(best, mutual_information(p, P));
        }
        const auto r = unit_cost_capacity(P, ones);
        CHECK(r.c_unit >= best - 1e-12);
        CHECK(std::abs(r.c_unit - best) < 1e-4);
    }
}

TEST_CASE("unit_cost_capacity: iterates never decrease, upper bound brackets the value")
{
    const auto P = deletion_dmc(4, 0.05);
    const auto r = unit_cost_capacity(P, costs_for(4));
    CHECK(r.converged);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i] >= r.trace[i - 1] - 1e-14);
    CHECK(r.upper_bound >= r.c_unit);
    CHECK(r.upper_bound - r.c_unit < 1e-9);
    const double direct = mutual_information(r.p_star, P);
    double mean_cost = 0;
    for (std::size_t x = 0; x < 4; ++x)
        mean_cost += r.p_star[x] * (2.0 + x);
    CHECK(direct / mean_cost == doctest::Approx(r.c_unit).epsilon(1e-12));
}

TEST_CASE("unit_cost_capacity: deletion channel orderings")
{
    const std::vector<std::size_t> sizes{2, 4, 8, 16};
    std::vector<std::vector<double>> c(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (int k = 1; k <= 10; ++k)
            c[i].push_back(unit_cost_capacity(deletion_dmc(sizes[i], k / 100.0), costs_for(sizes[i])).c_unit);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t k = 1; k < 10; ++k)
            CHECK(c[i][k] < c[i][k - 1]);
    for (std::size_t i = 1; i < sizes.size(); ++i)
        for (std::size_t k = 0; k < 10; ++k)
            CHECK(c[i][k] > c[i - 1][k]);
}

TEST_CASE("unit_cost_capacity: argument errors and iteration cap")
{
    const std::vector<double> bad{0, 1};
    CHECK_THROWS_AS(unit_cost_capacity({{1, 0}, {0, 1}}, bad), InvalidArgument);
    const std::vector<double> short_costs{1};
    CHECK_THROWS_AS(unit_cost_capacity({{1, 0}, {0, 1}}, short_costs), InvalidArgument);
    const auto r = unit_cost_capacity(deletion_dmc(8, 0.05), costs_for(8), 1e-15, 2);
    CHECK(!r.converged);
    CHECK(r.iterations == 2);
}

TEST_CASE("distribution_transform: skewed target frequencies")
{
    Rng rng(2);
    std::vector<std::uint8_t> bits(1000000);
    for (auto& b : bits)
        b = rng.bit();
    const std::vector<double> target{0.75, 0.25};
    const auto syms = distribution_transform(bits, target);
    double zeros = 0;
    for (auto s : syms)
        zeros += s == 0;
    CHECK(std::abs(zeros / syms.size() - 0.75) < 0.002);
    // about H(0.75) = 0.811 bits per symbol
    CHECK(static_cast<double>(bits.size()) / syms.size() == doctest::Approx(h2(0.25)).epsilon(0.01));
}

TEST_CASE("distribution_transform: round trips")
{
    Rng rng(3);
    const std::vector<std::vector<double>> targets{{0.5, 0.5}, {0.75, 0.25}, {0.4, 0.3, 0.2, 0.1}, {0.9, 0.05, 0.05}};
    for (const auto& target : targets)
        for (std::size_t len : {1u, 7u, 64u, 10000u}) {
            std::vector<std::uint8_t> bits(len);
            for (auto& b : bits)
                b = rng.bit();
            const auto syms = distribution_transform(bits, target);
            CHECK(inverse_transform(syms, target, len) == bits);
        }

    const std::vector<double> uniform{0.5, 0.5};
    std::vector<std::uint8_t> bits(200);
    for (auto& b : bits)
        b = rng.bit();
    const auto syms = distribution_transform(bits, uniform);
    REQUIRE(syms.size() >= bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        CHECK(syms[i] == bits[i]);

    const std::vector<double> with_zero{1.0, 0.0};
    CHECK_THROWS_AS(DistributionTransformer{with_zero}, InvalidArgument);
}
