#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshwm {

struct LatinSquare {
    unsigned q = 0;
    std::vector<std::uint32_t> cells; ///< row-major q*q

    std::uint32_t at(unsigned i, unsigned j) const { return cells[static_cast<std::size_t>(i) * q + j]; }
    /// Throws unless every symbol in [0, q) appears once per row and column.
    void validate() const;
};

/// Cayley table of Z_q: cells[i][j] = (i + j) mod q.
LatinSquare cayley_latin_square(unsigned q);

/// q x q permutation matrix stored as the column of the single 1 in each row.
struct PermutationMatrix {
    std::vector<std::uint32_t> col_of_row;

    std::size_t size() const noexcept { return col_of_row.size(); }
    bool at(std::size_t i, std::size_t j) const { return col_of_row[i] == j; }
};

PermutationMatrix perm_from_symbol(const LatinSquare& square, std::uint32_t alpha);

/// Binary sparse matrix with both row and column incidence lists (sorted).
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<std::uint32_t>> row_lists;
    std::vector<std::vector<std::uint32_t>> col_lists;

    static SparseMatrix from_rows(std::size_t rows, std::size_t cols, std::vector<std::vector<std::uint32_t>> row_lists);
    bool at(std::size_t r, std::size_t c) const;
    std::size_t nnz() const;
    bool operator==(const SparseMatrix&) const = default;
};

using SymbolArray = std::vector<std::vector<std::uint32_t>>; ///< mu rows of eta symbols

SparseMatrix assemble_H(const SymbolArray& W, const LatinSquare& square);

/// True iff no two columns share more than one row.
bool girth_at_least_6(const SparseMatrix& H);

/// Rank of H over GF(2).
std::size_t gf2_rank(const SparseMatrix& H);

class LdpcCode {
public:
    LdpcCode() = default;
    /// Builds the systematic encoder by Gaussian elimination; k = n - rank(H).
    explicit LdpcCode(SparseMatrix H);

    const SparseMatrix& H() const noexcept { return H_; }
    std::size_t n() const noexcept { return H_.cols; }
    std::size_t m() const noexcept { return H_.rows; }
    std::size_t k() const noexcept { return info_positions_.size(); }
    std::size_t rank() const noexcept { return pivots_.size(); }
    double rate() const noexcept { return n() ? static_cast<double>(k()) / static_cast<double>(n()) : 0.0; }
    bool girth6() const noexcept { return girth6_; }
    /// Codeword positions holding the message bits, in message order.
    const std::vector<std::uint32_t>& info_positions() const noexcept { return info_positions_; }

    /// Construction parameters, zero when the code was loaded from a file.
    unsigned q = 0, mu = 0, eta = 0;
    std::uint64_t seed = 0;

private:
    friend std::vector<std::uint8_t> encode(const LdpcCode&, std::span<const std::uint8_t>);
    friend struct DecoderLayout;

    SparseMatrix H_;
    bool girth6_ = false;
    std::vector<std::uint32_t> info_positions_;
    std::vector<std::uint32_t> pivots_;          ///< pivot column of each reduced row
    std::vector<std::vector<std::uint64_t>> parity_rows_; ///< per pivot, bitset over message bits
    // Tanner-graph edges ordered by check; var_edges_ lists each variable's edges.
    std::vector<std::uint32_t> check_start_;
    std::vector<std::uint32_t> edge_var_;
    std::vector<std::uint32_t> var_start_;
    std::vector<std::uint32_t> var_edges_;
};

/// Greedy seeded search for a mu x eta symbol array over Z_q whose code is
/// free of 4-cycles. Requires eta <= q and mu <= eta.
LdpcCode construct_code(unsigned q, unsigned mu, unsigned eta, std::uint64_t search_seed);

std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> message);
std::vector<std::uint8_t> message_from_codeword(const LdpcCode& code, std::span<const std::uint8_t> codeword);

std::vector<std::uint8_t> syndrome(const SparseMatrix& H, std::span<const std::uint8_t> x);
bool is_codeword(const SparseMatrix& H, std::span<const std::uint8_t> x);

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    std::vector<double> posterior; ///< mu_j, positive favours 0
    bool converged = false;
    int iterations = 0; ///< 0 when the channel decision already satisfies every check
};

/// Sum-product decoding in the tanh domain with messages clipped to +-kLlrClip.
DecodeResult sp_decode(const LdpcCode& code, std::span<const double> llr, int max_iter = 50);

/// alist exchange format (1-based indices, zero padded lists allowed on read).
SparseMatrix parse_alist(std::string_view text);
std::string write_alist(const SparseMatrix& H);
SparseMatrix read_alist_file(const std::string& path);
void write_alist_file(const SparseMatrix& H, const std::string& path);

} // namespace meshwm
