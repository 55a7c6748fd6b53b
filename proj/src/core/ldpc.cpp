#include "meshwm/ldpc.hpp"

#include "meshwm/error.hpp"
#include "meshwm/io.hpp"
#include "meshwm/rng.hpp"
#include "meshwm/runlength.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace meshwm {

void LatinSquare::validate() const
{
    if (q < 1 || cells.size() != static_cast<std::size_t>(q) * q)
        throw InvalidArgument("latin square: cell count does not match order");
    std::vector<char> seen(q);
    for (unsigned i = 0; i < q; ++i) {
        std::fill(seen.begin(), seen.end(), 0);
        for (unsigned j = 0; j < q; ++j) {
            const auto s = at(i, j);
            if (s >= q || seen[s])
                throw InvalidArgument("latin square: row " + std::to_string(i) + " repeats or leaves a symbol");
            seen[s] = 1;
        }
    }
    for (unsigned j = 0; j < q; ++j) {
        std::fill(seen.begin(), seen.end(), 0);
        for (unsigned i = 0; i < q; ++i) {
            const auto s = at(i, j);
            if (seen[s])
                throw InvalidArgument("latin square: column " + std::to_string(j) + " repeats a symbol");
            seen[s] = 1;
        }
    }
}

LatinSquare cayley_latin_square(unsigned q)
{
    if (q < 2)
        throw InvalidArgument("cayley_latin_square: order must be at least 2");
    LatinSquare sq;
    sq.q = q;
    sq.cells.resize(static_cast<std::size_t>(q) * q);
    for (unsigned i = 0; i < q; ++i)
        for (unsigned j = 0; j < q; ++j)
            sq.cells[static_cast<std::size_t>(i) * q + j] = (i + j) % q;
    return sq;
}

PermutationMatrix perm_from_symbol(const LatinSquare& square, std::uint32_t alpha)
{
    if (alpha >= square.q)
        throw InvalidArgument("perm_from_symbol: symbol " + std::to_string(alpha) + " not in the square");
    PermutationMatrix p;
    p.col_of_row.resize(square.q);
    for (unsigned i = 0; i < square.q; ++i) {
        unsigned j = 0;
        while (j < square.q && square.at(i, j) != alpha)
            ++j;
        if (j == square.q)
            throw InvalidArgument("perm_from_symbol: square is not latin");
        p.col_of_row[i] = j;
    }
    return p;
}

SparseMatrix SparseMatrix::from_rows(std::size_t rows, std::size_t cols, std::vector<std::vector<std::uint32_t>> row_lists)
{
    if (row_lists.size() != rows)
        throw InvalidArgument("sparse matrix: row list count mismatch");
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.col_lists.resize(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto& lst = row_lists[r];
        std::sort(lst.begin(), lst.end());
        if (std::adjacent_find(lst.begin(), lst.end()) != lst.end())
            throw InvalidArgument("sparse matrix: duplicate entry in row " + std::to_string(r));
        for (auto c : lst) {
            if (c >= cols)
                throw InvalidArgument("sparse matrix: column index out of range");
            m.col_lists[c].push_back(static_cast<std::uint32_t>(r));
        }
    }
    m.row_lists = std::move(row_lists);
    return m;
}

bool SparseMatrix::at(std::size_t r, std::size_t c) const
{
    const auto& lst = row_lists.at(r);
    return std::binary_search(lst.begin(), lst.end(), static_cast<std::uint32_t>(c));
}

std::size_t SparseMatrix::nnz() const
{
    std::size_t s = 0;
    for (const auto& r : row_lists)
        s += r.size();
    return s;
}

SparseMatrix assemble_H(const SymbolArray& W, const LatinSquare& square)
{
    if (W.empty() || W[0].empty())
        throw InvalidArgument("assemble_H: empty symbol array");
    const std::size_t mu = W.size(), eta = W[0].size(), q = square.q;
    std::vector<std::vector<std::uint32_t>> rows(mu * q);
    for (std::size_t i = 0; i < mu; ++i) {
        if (W[i].size() != eta)
            throw InvalidArgument("assemble_H: ragged symbol array");
        for (std::size_t j = 0; j < eta; ++j) {
            const auto p = perm_from_symbol(square, W[i][j]);
            for (std::size_t r = 0; r < q; ++r)
                rows[i * q + r].push_back(static_cast<std::uint32_t>(j * q + p.col_of_row[r]));
        }
    }
    return SparseMatrix::from_rows(mu * q, eta * q, std::move(rows));
}

bool girth_at_least_6(const SparseMatrix& H)
{
    // stamp[c2] == c marks c2 as already sharing a row with column c
    std::vector<std::uint32_t> stamp(H.cols, 0xffffffffu);
    for (std::size_t c = 0; c < H.cols; ++c) {
        for (auto r : H.col_lists[c]) {
            for (auto c2 : H.row_lists[r]) {
                if (c2 == c)
                    continue;
                if (stamp[c2] == c)
                    return false;
                stamp[c2] = static_cast<std::uint32_t>(c);
            }
        }
    }
    return true;
}

namespace {

using Bits = std::vector<std::uint64_t>;

std::vector<Bits> dense_rows(const SparseMatrix& H)
{
    const std::size_t words = (H.cols + 63) / 64;
    std::vector<Bits> rows(H.rows, Bits(words, 0));
    for (std::size_t r = 0; r < H.rows; ++r)
        for (auto c : H.row_lists[r])
            rows[r][c / 64] |= std::uint64_t{1} << (c % 64);
    return rows;
}

bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1u; }

/// In-place reduced row echelon form; returns pivot columns in row order.
std::vector<std::uint32_t> rref(std::vector<Bits>& rows, std::size_t cols)
{
    std::vector<std::uint32_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !test_bit(rows[p], c))
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[r], rows[p]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != r && test_bit(rows[i], c))
                for (std::size_t w = 0; w < rows[i].size(); ++w)
                    rows[i][w] ^= rows[r][w];
        }
        pivots.push_back(static_cast<std::uint32_t>(c));
        ++r;
    }
    rows.resize(r);
    return pivots;
}

} // namespace

std::size_t gf2_rank(const SparseMatrix& H)
{
    auto rows = dense_rows(H);
    return rref(rows, H.cols).size();
}

LdpcCode::LdpcCode(SparseMatrix H) : H_(std::move(H))
{
    if (H_.cols == 0 || H_.rows == 0)
        throw InvalidArgument("ldpc: empty parity-check matrix");
    girth6_ = girth_at_least_6(H_);

    auto rows = dense_rows(H_);
    pivots_ = rref(rows, H_.cols);
    std::vector<char> is_pivot(H_.cols, 0);
    for (auto c : pivots_)
        is_pivot[c] = 1;
    for (std::uint32_t c = 0; c < H_.cols; ++c)
        if (!is_pivot[c])
            info_positions_.push_back(c);
    if (info_positions_.empty())
        throw CapabilityError("ldpc: code has dimension 0");

    const std::size_t kw = (info_positions_.size() + 63) / 64;
    parity_rows_.assign(pivots_.size(), Bits(kw, 0));
    for (std::size_t i = 0; i < pivots_.size(); ++i)
        for (std::size_t t = 0; t < info_positions_.size(); ++t)
            if (test_bit(rows[i], info_positions_[t]))
                parity_rows_[i][t / 64] |= std::uint64_t{1} << (t % 64);

    check_start_.assign(1, 0);
    for (const auto& r : H_.row_lists) {
        edge_var_.insert(edge_var_.end(), r.begin(), r.end());
        check_start_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
    }
    var_start_.assign(H_.cols + 1, 0);
    for (auto v : edge_var_)
        ++var_start_[v + 1];
    for (std::size_t v = 0; v < H_.cols; ++v)
        var_start_[v + 1] += var_start_[v];
    var_edges_.resize(edge_var_.size());
    std::vector<std::uint32_t> fill(var_start_.begin(), var_start_.end() - 1);
    for (std::uint32_t e = 0; e < edge_var_.size(); ++e)
        var_edges_[fill[edge_var_[e]]++] = e;
}

LdpcCode construct_code(unsigned q, unsigned mu, unsigned eta, std::uint64_t search_seed)
{
    if (q < 2)
        throw InvalidArgument("construct_code: q must be at least 2");
    if (mu < 1 || eta < 1)
        throw InvalidArgument("construct_code: mu and eta must be positive");
    if (mu > eta)
        throw InvalidArgument("construct_code: mu > eta gives a non-positive design rate");
    if (eta > q)
        throw InvalidArgument("construct_code: eta must not exceed q");

    // Columns j1, j2 close a 4-cycle iff two rows give the same difference
    // w[i][j1] - w[i][j2] (mod q).
    Rng rng(hash_seed(search_seed, q, (static_cast<std::uint64_t>(mu) << 32) | eta));
    std::vector<std::uint32_t> candidates(q);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        SymbolArray W(mu, std::vector<std::uint32_t>(eta, 0));
        bool ok = true;
        for (unsigned j = 0; j < eta && ok; ++j) {
            for (unsigned i = 0; i < mu && ok; ++i) {
                for (unsigned v = 0; v < q; ++v)
                    candidates[v] = v;
                shuffle(candidates, rng);
                bool placed = false;
                for (auto w : candidates) {
                    bool clash = false;
                    for (unsigned j2 = 0; j2 < j && !clash; ++j2) {
                        const auto d = (w + q - W[i][j2]) % q;
                        for (unsigned i2 = 0; i2 < i && !clash; ++i2)
                            clash = (W[i2][j] + q - W[i2][j2]) % q == d;
                    }
                    if (!clash) {
                        W[i][j] = w;
                        placed = true;
                        break;
                    }
                }
                ok = placed;
            }
        }
        if (!ok)
            continue;
        LdpcCode code(assemble_H(W, cayley_latin_square(q)));
        if (!code.girth6())
            continue;
        code.q = q;
        code.mu = mu;
        code.eta = eta;
        code.seed = search_seed;
        return code;
    }
    throw CapabilityError("construct_code: no 4-cycle-free symbol array found");
}

std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> message)
{
    if (message.size() != code.k())
        throw InvalidArgument("encode: message has " + std::to_string(message.size()) + " bits, code expects " +
                              std::to_string(code.k()));
    std::vector<std::uint8_t> x(code.n(), 0);
    Bits msg((message.size() + 63) / 64, 0);
    for (std::size_t t = 0; t < message.size(); ++t) {
        if (message[t]) {
            msg[t / 64] |= std::uint64_t{1} << (t % 64);
            x[code.info_positions_[t]] = 1;
        }
    }
    for (std::size_t i = 0; i < code.pivots_.size(); ++i) {
        unsigned parity = 0;
        for (std::size_t w = 0; w < msg.size(); ++w)
            parity += static_cast<unsigned>(std::popcount(code.parity_rows_[i][w] & msg[w]));
        x[code.pivots_[i]] = static_cast<std::uint8_t>(parity & 1u);
    }
    return x;
}

std::vector<std::uint8_t> message_from_codeword(const LdpcCode& code, std::span<const std::uint8_t> codeword)
{
    if (codeword.size() != code.n())
        throw InvalidArgument("message_from_codeword: length mismatch");
    std::vector<std::uint8_t> m(code.k());
    for (std::size_t t = 0; t < m.size(); ++t)
        m[t] = codeword[code.info_positions()[t]];
    return m;
}

std::vector<std::uint8_t> syndrome(const SparseMatrix& H, std::span<const std::uint8_t> x)
{
    if (x.size() != H.cols)
        throw InvalidArgument("syndrome: vector length " + std::to_string(x.size()) + " does not match n=" +
                              std::to_string(H.cols));
    std::vector<std::uint8_t> s(H.rows, 0);
    for (std::size_t r = 0; r < H.rows; ++r) {
        unsigned acc = 0;
        for (auto c : H.row_lists[r])
            acc ^= x[c] & 1u;
        s[r] = static_cast<std::uint8_t>(acc);
    }
    return s;
}

bool is_codeword(const SparseMatrix& H, std::span<const std::uint8_t> x)
{
    const auto s = syndrome(H, x);
    return std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; });
}

struct DecoderLayout {
    static DecodeResult run(const LdpcCode& code, std::span<const double> llr, int max_iter)
    {
        const std::size_t n = code.n();
        if (llr.size() != n)
            throw InvalidArgument("sp_decode: expected " + std::to_string(n) + " LLRs, got " +
                                  std::to_string(llr.size()));
        if (max_iter < 1)
            throw InvalidArgument("sp_decode: max_iter must be at least 1");

        auto clip = [](double v) { return std::clamp(v, -kLlrClip, kLlrClip); };
        DecodeResult res;
        res.posterior.resize(n);
        res.bits.resize(n);
        std::vector<double> chan(n);
        for (std::size_t j = 0; j < n; ++j) {
            chan[j] = std::isnan(llr[j]) ? 0.0 : clip(llr[j]);
            res.posterior[j] = chan[j];
            res.bits[j] = chan[j] < 0.0 ? 1 : 0;
        }
        if (is_codeword(code.H(), res.bits)) {
            res.converged = true;
            return res;
        }

        const std::size_t E = code.edge_var_.size();
        std::vector<double> lam(E), Lam(E, 0.0), t(E), pre;
        for (std::size_t e = 0; e < E; ++e)
            lam[e] = chan[code.edge_var_[e]];

        for (int it = 1; it <= max_iter; ++it) {
            for (std::size_t c = 0; c + 1 < code.check_start_.size(); ++c) {
                const auto b = code.check_start_[c], end = code.check_start_[c + 1];
                const std::size_t deg = end - b;
                pre.assign(deg + 1, 1.0);
                for (std::size_t i = 0; i < deg; ++i) {
                    t[b + i] = std::tanh(0.5 * lam[b + i]);
                    pre[i + 1] = pre[i] * t[b + i];
                }
                double suf = 1.0;
                for (std::size_t i = deg; i-- > 0;) {
                    const double prod = pre[i] * suf;
                    Lam[b + i] = clip(2.0 * std::atanh(prod));
                    suf *= t[b + i];
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                double mu = chan[v];
                for (auto k = code.var_start_[v]; k < code.var_start_[v + 1]; ++k)
                    mu += Lam[code.var_edges_[k]];
                for (auto k = code.var_start_[v]; k < code.var_start_[v + 1]; ++k) {
                    const auto e = code.var_edges_[k];
                    lam[e] = clip(mu - Lam[e]);
                }
                res.posterior[v] = mu;
                res.bits[v] = mu < 0.0 ? 1 : 0;
            }
            res.iterations = it;
            if (is_codeword(code.H(), res.bits)) {
                res.converged = true;
                return res;
            }
        }
        return res;
    }
};

DecodeResult sp_decode(const LdpcCode& code, std::span<const double> llr, int max_iter)
{
    return DecoderLayout::run(code, llr, max_iter);
}

SparseMatrix parse_alist(std::string_view text)
{
    std::istringstream in{std::string(text)};
    auto next = [&](const char* what) {
        long v;
        if (!(in >> v))
            throw ParseError(std::string("alist: missing or malformed ") + what);
        if (v < 0)
            throw ParseError(std::string("alist: negative ") + what);
        return static_cast<std::size_t>(v);
    };
    const std::size_t n = next("column count"), m = next("row count");
    if (n == 0 || m == 0)
        throw ParseError("alist: empty matrix");
    const std::size_t max_col = next("max column degree"), max_row = next("max row degree");
    std::vector<std::size_t> col_deg(n), row_deg(m);
    for (auto& d : col_deg)
        d = next("column degree");
    for (auto& d : row_deg)
        d = next("row degree");

    // Column lists may be padded with zeros up to the maximum degree.
    auto read_lists = [&](std::size_t count, const std::vector<std::size_t>& deg, std::size_t maxdeg,
                          std::size_t bound, const char* what) {
        std::vector<std::vector<std::uint32_t>> lists(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (deg[i] > maxdeg)
                throw ParseError(std::string("alist: ") + what + " degree exceeds declared maximum");
            for (std::size_t k = 0; k < deg[i]; ++k) {
                const auto v = next(what);
                if (v < 1 || v > bound)
                    throw ParseError(std::string("alist: ") + what + " index out of range");
                lists[i].push_back(static_cast<std::uint32_t>(v - 1));
            }
            for (std::size_t k = deg[i]; k < maxdeg; ++k) {
                const auto pos = in.tellg();
                long v;
                if (!(in >> v) || v != 0) {
                    in.clear();
                    in.seekg(pos);
                    break;
                }
            }
        }
        return lists;
    };
    auto cols = read_lists(n, col_deg, max_col, m, "column entry");
    auto rows = read_lists(m, row_deg, max_row, n, "row entry");

    SparseMatrix H;
    try {
        H = SparseMatrix::from_rows(m, n, std::move(rows));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("alist: ") + e.what());
    }
    for (auto& c : cols)
        std::sort(c.begin(), c.end());
    if (cols != H.col_lists)
        throw ParseError("alist: column and row lists disagree");
    return H;
}

std::string write_alist(const SparseMatrix& H)
{
    std::ostringstream out;
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : H.col_lists)
        max_col = std::max(max_col, c.size());
    for (const auto& r : H.row_lists)
        max_row = std::max(max_row, r.size());
    out << H.cols << ' ' << H.rows << '\n' << max_col << ' ' << max_row << '\n';
    auto degrees = [&](const auto& lists) {
        for (std::size_t i = 0; i < lists.size(); ++i)
            out << (i ? " " : "") << lists[i].size();
        out << '\n';
    };
    degrees(H.col_lists);
    degrees(H.row_lists);
    auto entries = [&](const auto& lists, std::size_t maxdeg) {
        for (const auto& l : lists) {
            for (std::size_t k = 0; k < maxdeg; ++k)
                out << (k ? " " : "") << (k < l.size() ? l[k] + 1 : 0);
            out << '\n';
        }
    };
    entries(H.col_lists, max_col);
    entries(H.row_lists, max_row);
    return out.str();
}

SparseMatrix read_alist_file(const std::string& path) { return parse_alist(read_text_file(path)); }

void write_alist_file(const SparseMatrix& H, const std::string& path) { write_text_file(path, write_alist(H)); }

} // namespace meshwm
