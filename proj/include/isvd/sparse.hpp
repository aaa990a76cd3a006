#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace isvd {

/// Matrix Market stream does not follow the exchange-format grammar.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Entry coordinates fall outside the declared matrix dimensions.
struct BoundsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Header declares a field/symmetry combination this reader does not handle
/// (complex, pattern, integer, hermitian, skew-symmetric).
struct UnsupportedFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Counts products with A. Products with A^T are free by convention, so the
/// transpose kernel never touches this.
struct MatvecCounter {
    std::int64_t count_a = 0;
};

/// One coordinate entry, 0-based.
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Immutable real sparse matrix with both row-major (CSR) and column-major
/// (CSC) traversal. Built once from a coordinate list; duplicate coordinates
/// are rejected.
class SparseMatrix {
public:
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return csr_values_.size(); }

    /// y = A x. Counts one product with A.
    std::vector<double> multiply(const std::vector<double>& x, MatvecCounter& counter) const;

    /// y = A^T x. Not counted.
    std::vector<double> multiply_transpose(const std::vector<double>& x) const;

    /// max column sum of |a_ij|, cached at construction.
    double one_norm() const { return one_norm_; }

    SparseMatrix transpose() const;

    /// Entries in row-major order (row, col ascending), 0-based.
    std::vector<Triplet> entries() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double one_norm_ = 0.0;

    // CSR
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> csr_values_;
    // CSC
    std::vector<std::size_t> col_ptr_;
    std::vector<std::size_t> row_idx_;
    std::vector<double> csc_values_;
};

/// Reads a `%%MatrixMarket matrix coordinate real (general|symmetric)` or
/// `%%MatrixMarket matrix array real general` stream. Symmetric storage is
/// expanded to full general form at parse time.
SparseMatrix parse_matrix_market(std::istream& in);
SparseMatrix parse_matrix_market(const std::string& text);
SparseMatrix load_matrix_market(const std::string& path);

/// Writes coordinate real general with round-trip-exact decimals.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);

}  // namespace isvd
