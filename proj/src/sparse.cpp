#include "isvd/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace isvd {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Next non-blank, non-comment line. Returns false at end of stream.
bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r\n");
        if (i == std::string::npos) continue;
        if (line[i] == '%') continue;
        return true;
    }
    return false;
}

double parse_real(const std::string& tok) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw FormatError("bad numeric field '" + tok + "'");
    }
    if (pos != tok.size()) throw FormatError("bad numeric field '" + tok + "'");
    return v;
}

std::size_t parse_index(const std::string& tok) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw FormatError("bad integer field '" + tok + "'");
    }
    if (pos != tok.size() || v < 0) throw FormatError("bad integer field '" + tok + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
    for (const Triplet& t : entries) {
        if (t.row >= rows || t.col >= cols)
            throw BoundsError("entry (" + std::to_string(t.row + 1) + ", " + std::to_string(t.col + 1) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col)
            throw FormatError("duplicate coordinate (" + std::to_string(entries[i].row + 1) + ", " +
                              std::to_string(entries[i].col + 1) + ")");
    }

    const std::size_t nnz = entries.size();
    row_ptr_.assign(rows + 1, 0);
    col_idx_.resize(nnz);
    csr_values_.resize(nnz);
    for (const Triplet& t : entries) ++row_ptr_[t.row + 1];
    for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
    for (std::size_t i = 0; i < nnz; ++i) {
        col_idx_[i] = entries[i].col;
        csr_values_[i] = entries[i].value;
    }

    col_ptr_.assign(cols + 1, 0);
    row_idx_.resize(nnz);
    csc_values_.resize(nnz);
    for (const Triplet& t : entries) ++col_ptr_[t.col + 1];
    for (std::size_t c = 0; c < cols; ++c) col_ptr_[c + 1] += col_ptr_[c];
    std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (const Triplet& t : entries) {
        std::size_t slot = fill[t.col]++;
        row_idx_[slot] = t.row;
        csc_values_[slot] = t.value;
    }

    one_norm_ = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t i = col_ptr_[c]; i < col_ptr_[c + 1]; ++i) sum += std::abs(csc_values_[i]);
        one_norm_ = std::max(one_norm_, sum);
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x, MatvecCounter& counter) const {
    if (x.size() != cols_) throw std::invalid_argument("matvec: vector length != cols");
    ++counter.count_a;
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) sum += csr_values_[i] * x[col_idx_[i]];
        y[r] = sum;
    }
    return y;
}

std::vector<double> SparseMatrix::multiply_transpose(const std::vector<double>& x) const {
    if (x.size() != rows_) throw std::invalid_argument("matvec_transpose: vector length != rows");
    std::vector<double> y(cols_, 0.0);
    for (std::size_t c = 0; c < cols_; ++c) {
        double sum = 0.0;
        for (std::size_t i = col_ptr_[c]; i < col_ptr_[c + 1]; ++i) sum += csc_values_[i] * x[row_idx_[i]];
        y[c] = sum;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> flipped;
    flipped.reserve(nnz());
    for (const Triplet& t : entries()) flipped.push_back({t.col, t.row, t.value});
    return SparseMatrix(cols_, rows_, std::move(flipped));
}

std::vector<Triplet> SparseMatrix::entries() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
            out.push_back({r, col_idx_[i], csr_values_[i]});
    return out;
}

SparseMatrix parse_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty stream");
    std::vector<std::string> h = split(line);
    if (h.size() < 4 || lower(h[0]) != "%%matrixmarket" || lower(h[1]) != "matrix")
        throw FormatError("missing '%%MatrixMarket matrix' header");
    const std::string fmt = lower(h[2]);
    const std::string field = h.size() > 3 ? lower(h[3]) : "";
    const std::string symmetry = h.size() > 4 ? lower(h[4]) : "general";

    if (fmt != "coordinate" && fmt != "array") throw FormatError("unknown format '" + fmt + "'");
    if (field != "real")
        throw UnsupportedFormatError("field '" + field + "' not supported (real only)");
    if (fmt == "coordinate") {
        if (symmetry != "general" && symmetry != "symmetric")
            throw UnsupportedFormatError("symmetry '" + symmetry + "' not supported");
    } else if (symmetry != "general") {
        throw UnsupportedFormatError("array format supports general symmetry only");
    }

    if (!next_data_line(in, line)) throw FormatError("missing size line");
    std::vector<std::string> sz = split(line);

    if (fmt == "array") {
        if (sz.size() != 2) throw FormatError("array size line must be 'M N'");
        std::size_t m = parse_index(sz[0]), n = parse_index(sz[1]);
        if (m == 0 || n == 0) throw FormatError("zero dimension");
        std::vector<Triplet> entries;
        entries.reserve(m * n);
        // column-major value list
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t r = 0; r < m; ++r) {
                if (!next_data_line(in, line)) throw FormatError("array data ended early");
                std::vector<std::string> toks = split(line);
                if (toks.size() != 1) throw FormatError("array data line must hold one value");
                entries.push_back({r, c, parse_real(toks[0])});
            }
        }
        return SparseMatrix(m, n, std::move(entries));
    }

    if (sz.size() != 3) throw FormatError("coordinate size line must be 'M N nnz'");
    std::size_t m = parse_index(sz[0]), n = parse_index(sz[1]), nnz = parse_index(sz[2]);
    if (m == 0 || n == 0) throw FormatError("zero dimension");
    const bool symmetric = (symmetry == "symmetric");
    if (symmetric && m != n) throw FormatError("symmetric matrix must be square");

    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    std::size_t seen = 0;
    while (next_data_line(in, line)) {
        std::vector<std::string> toks = split(line);
        if (toks.size() != 3) throw FormatError("coordinate entry must be 'row col value'");
        std::size_t r = parse_index(toks[0]), c = parse_index(toks[1]);
        double v = parse_real(toks[2]);
        if (r < 1 || r > m || c < 1 || c > n)
            throw BoundsError("entry (" + toks[0] + ", " + toks[1] + ") outside declared " +
                              std::to_string(m) + "x" + std::to_string(n));
        entries.push_back({r - 1, c - 1, v});
        if (symmetric && r != c) entries.push_back({c - 1, r - 1, v});
        ++seen;
    }
    if (seen != nnz)
        throw FormatError("size line declares " + std::to_string(nnz) + " entries, found " +
                          std::to_string(seen));
    return SparseMatrix(m, n, std::move(entries));
}

SparseMatrix parse_matrix_market(const std::string& text) {
    std::istringstream ss(text);
    return parse_matrix_market(ss);
}

SparseMatrix load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    return parse_matrix_market(in);
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
    char buf[64];
    for (const Triplet& t : a.entries()) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.value);
        out << (t.row + 1) << " " << (t.col + 1) << " " << buf << "\n";
    }
}

}  // namespace isvd
