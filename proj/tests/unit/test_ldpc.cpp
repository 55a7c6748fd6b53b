#include "meshwm/error.hpp"
#include "meshwm/ldpc.hpp"
#include "meshwm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace meshwm;

namespace {

std::vector<std::uint8_t> random_message(Rng& rng, std::size_t k)
{
    std::vector<std::uint8_t> m(k);
    for (auto& b : m)
        b = rng.bit();
    return m;
}

// pairwise column scan, independent of the library's check
bool has_four_cycle(const SparseMatrix& H)
{
    for (std::size_t a = 0; a < H.cols; ++a)
        for (std::size_t b = a + 1; b < H.cols; ++b) {
            int shared = 0;
            for (std::size_t r = 0; r < H.rows; ++r)
                shared += H.at(r, a) && H.at(r, b);
            if (shared > 1)
                return true;
        }
    return false;
}

void check_structure(const SparseMatrix& H, unsigned q, unsigned mu, unsigned eta)
{
    CHECK(H.rows == mu * q);
    CHECK(H.cols == eta * q);
    for (const auto& c : H.col_lists)
        CHECK(c.size() == mu);
    for (const auto& r : H.row_lists)
        CHECK(r.size() == eta);
}

} // namespace

TEST_CASE("cayley_latin_square")
{
    const auto l2 = cayley_latin_square(2);
    CHECK(l2.cells == std::vector<std::uint32_t>{0, 1, 1, 0});
    const auto l3 = cayley_latin_square(3);
    CHECK(l3.cells == std::vector<std::uint32_t>{0, 1, 2, 1, 2, 0, 2, 0, 1});
    CHECK_NOTHROW(cayley_latin_square(97).validate());
    CHECK_THROWS_AS(cayley_latin_square(1), InvalidArgument);

    LatinSquare bad = l3;
    bad.cells[0] = 1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("perm_from_symbol")
{
    const auto l3 = cayley_latin_square(3);
    const auto p = perm_from_symbol(l3, 0);
    CHECK(p.col_of_row == std::vector<std::uint32_t>{0, 2, 1});

    const auto l7 = cayley_latin_square(7);
    std::vector<int> cover(49, 0);
    for (std::uint32_t a = 0; a < 7; ++a) {
        const auto pm = perm_from_symbol(l7, a);
        std::set<std::uint32_t> cols(pm.col_of_row.begin(), pm.col_of_row.end());
        CHECK(cols.size() == 7);
        for (std::size_t i = 0; i < 7; ++i)
            ++cover[i * 7 + pm.col_of_row[i]];
    }
    // disjoint supports summing to the all-ones matrix
    for (int c : cover)
        CHECK(c == 1);
    CHECK_THROWS_AS(perm_from_symbol(l7, 7), InvalidArgument);
}

TEST_CASE("assemble_H: shapes and blocks")
{
    const auto l3 = cayley_latin_square(3);
    const auto H1 = assemble_H({{0}}, l3);
    CHECK(H1.rows == 3);
    CHECK(H1.cols == 3);
    CHECK(H1.nnz() == 3);

    const auto l5 = cayley_latin_square(5);
    const auto H = assemble_H({{0, 1, 2}, {0, 2, 4}}, l5);
    check_structure(H, 5, 2, 3);
    CHECK_THROWS_AS(assemble_H({{0, 1}, {0}}, l5), InvalidArgument);
    CHECK_THROWS_AS(assemble_H({{0, 9}}, l5), InvalidArgument);
}

TEST_CASE("four-cycle difference test matches an exhaustive scan")
{
    const unsigned q = 5;
    const auto sq = cayley_latin_square(q);
    for (unsigned a = 0; a < q; ++a)
        for (unsigned b = 0; b < q; ++b)
            for (unsigned c = 0; c < q; ++c)
                for (unsigned d = 0; d < q; ++d) {
                    const auto H = assemble_H({{a, b}, {c, d}}, sq);
                    const bool witness = (a + q - b) % q == (c + q - d) % q;
                    CHECK(has_four_cycle(H) == witness);
                    CHECK(girth_at_least_6(H) == !witness);
                }
}

TEST_CASE("girth_at_least_6: small cases")
{
    CHECK(girth_at_least_6(SparseMatrix::from_rows(3, 3, {{0}, {1}, {2}})));
    CHECK(!girth_at_least_6(SparseMatrix::from_rows(2, 2, {{0, 1}, {0, 1}})));
}

TEST_CASE("gf2_rank")
{
    CHECK(gf2_rank(SparseMatrix::from_rows(3, 3, {{0}, {1}, {2}})) == 3);
    CHECK(gf2_rank(SparseMatrix::from_rows(3, 3, {{0, 1}, {1, 2}, {0, 2}})) == 2);
    // stacked permutation blocks: every block row sums to the all-ones row
    const auto H = assemble_H({{0, 1, 2}, {0, 2, 4}}, cayley_latin_square(5));
    CHECK(gf2_rank(H) == 9);
}

TEST_CASE("construct_code: small code")
{
    const auto code = construct_code(7, 2, 3, 1);
    CHECK(code.n() == 21);
    check_structure(code.H(), 7, 2, 3);
    CHECK(code.girth6());
    CHECK(!has_four_cycle(code.H()));
    CHECK(code.k() == code.n() - gf2_rank(code.H()));
    CHECK(code.rate() >= 1.0 - 2.0 / 3.0);
    CHECK(code.q == 7);

    const auto again = construct_code(7, 2, 3, 1);
    CHECK(again.H() == code.H());

    CHECK_THROWS_AS(construct_code(7, 4, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(construct_code(3, 2, 5, 1), InvalidArgument);
}

TEST_CASE("construct_code: rate 0.786 class at n = 3962")
{
    const auto code = construct_code(283, 3, 14, 1);
    CHECK(code.n() == 3962);
    CHECK(code.girth6());
    CHECK(code.rate() >= 1.0 - 3.0 / 14.0);
    check_structure(code.H(), 283, 3, 14);
}

TEST_CASE("encode: systematic, zero syndrome, linear, injective")
{
    const auto code = construct_code(11, 3, 7, 2);
    Rng rng(3);
    CHECK(encode(code, std::vector<std::uint8_t>(code.k(), 0)) == std::vector<std::uint8_t>(code.n(), 0));
    std::set<std::vector<std::uint8_t>> seen;
    for (int t = 0; t < 100; ++t) {
        const auto m = random_message(rng, code.k());
        const auto c = encode(code, m);
        CHECK(is_codeword(code.H(), c));
        CHECK(message_from_codeword(code, c) == m);
        for (std::size_t i = 0; i < code.k(); ++i)
            CHECK(c[code.info_positions()[i]] == m[i]);
        seen.insert(c);

        const auto m2 = random_message(rng, code.k());
        auto sum = m;
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] ^= m2[i];
        auto csum = c;
        const auto c2 = encode(code, m2);
        for (std::size_t i = 0; i < csum.size(); ++i)
            csum[i] ^= c2[i];
        CHECK(encode(code, sum) == csum);
    }
    CHECK(seen.size() == 100);
    CHECK_THROWS_AS(encode(code, std::vector<std::uint8_t>(code.k() + 1, 0)), InvalidArgument);
}

TEST_CASE("syndrome")
{
    const auto code = construct_code(7, 2, 3, 1);
    CHECK(syndrome(code.H(), std::vector<std::uint8_t>(21, 0)) == std::vector<std::uint8_t>(14, 0));
    Rng rng(4);
    const auto c = encode(code, random_message(rng, code.k()));
    for (std::uint32_t v = 0; v < code.n(); ++v) {
        auto e = c;
        e[v] ^= 1;
        const auto s = syndrome(code.H(), e);
        for (std::size_t r = 0; r < code.m(); ++r)
            CHECK(s[r] == static_cast<std::uint8_t>(code.H().at(r, v)));
    }
    CHECK_THROWS_AS(syndrome(code.H(), std::vector<std::uint8_t>(5, 0)), InvalidArgument);

    std::size_t nonzero = 0;
    for (int t = 0; t < 200; ++t)
        nonzero += !is_codeword(code.H(), random_message(rng, code.n()));
    CHECK(nonzero >= 180);
}

TEST_CASE("sp_decode: trivial and erasure cases")
{
    const auto code = construct_code(13, 3, 6, 5);
    auto r = sp_decode(code, std::vector<double>(code.n(), 10.0));
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.bits == std::vector<std::uint8_t>(code.n(), 0));

    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        const auto c = encode(code, random_message(rng, code.k()));
        std::vector<double> llr(code.n());
        for (std::size_t i = 0; i < llr.size(); ++i)
            llr[i] = c[i] ? -10.0 : 10.0;
        llr[rng.below(code.n())] = 0.0;
        r = sp_decode(code, llr);
        CHECK(r.converged);
        CHECK(r.iterations <= 1);
        CHECK(r.bits == c);
    }
    CHECK_THROWS_AS(sp_decode(code, std::vector<double>(3, 1.0)), InvalidArgument);
}

TEST_CASE("sp_decode: converged implies codeword; codeword translation invariance")
{
    const auto code = construct_code(17, 3, 8, 7);
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const auto c = encode(code, random_message(rng, code.k()));
        std::vector<double> llr0(code.n()), llrc(code.n());
        const double sigma = 0.6 + 0.4 * rng.uniform();
        for (std::size_t i = 0; i < code.n(); ++i) {
            const double y = 1.0 + sigma * rng.normal();
            llr0[i] = 2 * y / (sigma * sigma);
            llrc[i] = c[i] ? -llr0[i] : llr0[i];
        }
        const auto a = sp_decode(code, llr0, 30), b = sp_decode(code, llrc, 30);
        if (a.converged)
            CHECK(is_codeword(code.H(), a.bits));
        if (b.converged)
            CHECK(is_codeword(code.H(), b.bits));
        CHECK(a.converged == b.converged);
        CHECK(a.iterations == b.iterations);
        for (std::size_t i = 0; i < code.n(); ++i)
            CHECK((a.bits[i] ^ c[i]) == b.bits[i]);
    }
}

TEST_CASE("sp_decode agrees with bitwise MAP on a toy code")
{
    const auto code = construct_code(5, 2, 3, 1);
    REQUIRE(code.n() == 15);
    REQUIRE(code.k() <= 12);
    std::vector<std::vector<std::uint8_t>> book;
    for (std::uint32_t m = 0; m < (1u << code.k()); ++m) {
        std::vector<std::uint8_t> msg(code.k());
        for (std::size_t i = 0; i < code.k(); ++i)
            msg[i] = (m >> i) & 1;
        book.push_back(encode(code, msg));
    }

    Rng rng(10);
    const double sigma = 0.8;
    int frames_agree = 0;
    for (int t = 0; t < 200; ++t) {
        const auto& c = book[rng.below(book.size())];
        std::vector<double> llr(code.n());
        for (std::size_t i = 0; i < code.n(); ++i)
            llr[i] = 2 * ((c[i] ? -1.0 : 1.0) + sigma * rng.normal()) / (sigma * sigma);

        // P(x | y) proportional to exp(sum (1 - 2 x_i) llr_i / 2)
        std::vector<double> w(book.size());
        double wmax = -INFINITY;
        for (std::size_t j = 0; j < book.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < code.n(); ++i)
                s += (book[j][i] ? -0.5 : 0.5) * llr[i];
            w[j] = s;
            wmax = std::max(wmax, s);
        }
        std::vector<double> p1(code.n(), 0.0), p0(code.n(), 0.0);
        for (std::size_t j = 0; j < book.size(); ++j) {
            const double e = std::exp(w[j] - wmax);
            for (std::size_t i = 0; i < code.n(); ++i)
                (book[j][i] ? p1 : p0)[i] += e;
        }
        const auto r = sp_decode(code, llr, 50);
        bool agree = true;
        for (std::size_t i = 0; i < code.n(); ++i)
            agree &= r.bits[i] == (p1[i] > p0[i] ? 1 : 0);
        frames_agree += agree;
    }
    CHECK(frames_agree >= 190);
}

TEST_CASE("alist round trip and padded input")
{
    const auto code = construct_code(7, 2, 3, 1);
    const std::string text = write_alist(code.H());
    CHECK(parse_alist(text) == code.H());
    CHECK(text.rfind("21 14\n", 0) == 0);

    // 3 columns, 2 rows; columns 2 and 3 are zero padded
    const auto H = parse_alist("3 2\n2 2\n2 1 1\n2 2\n1 2\n1 0\n2 0\n1 2\n1 3\n");
    CHECK(H.rows == 2);
    CHECK(H.cols == 3);
    CHECK(H.at(0, 0));
    CHECK(H.at(1, 0));
    CHECK(H.at(0, 1));
    CHECK(H.at(1, 2));
    CHECK(H.nnz() == 4);
    CHECK(parse_alist(write_alist(H)) == H);

    CHECK_THROWS_AS(parse_alist("3 2\n"), ParseError);
    // row lists disagree with column lists
    CHECK_THROWS_AS(parse_alist("3 2\n2 2\n2 1 1\n2 2\n1 2\n1 0\n2 0\n1 2\n2 3\n"), ParseError);
}
