#include "geostream/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace geostream {

namespace {

constexpr char kMagic[6] = {'G', 'S', 'T', 'R', 'M', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    std::uint64_t bits = get_u64(is);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

}  // namespace

void write_matrix(const std::string& path, const Matrix& A, MatrixFormat fmt) {
    if (fmt == MatrixFormat::Text) {
        std::ofstream os(path);
        if (!os) throw data_error("IoError", "cannot open " + path);
        os.precision(17);
        for (Index i = 0; i < A.rows(); ++i) {
            for (Index j = 0; j < A.cols(); ++j) {
                if (j) os << ' ';
                os << A(i, j);
            }
            os << '\n';
        }
        if (!os) throw data_error("IoError", "write failed: " + path);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("IoError", "cannot open " + path);
    os.write(kMagic, 6);
    put_u64(os, static_cast<std::uint64_t>(A.rows()));
    put_u64(os, static_cast<std::uint64_t>(A.cols()));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) put_f64(os, A(i, j));
    if (!os) throw data_error("IoError", "write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("IoError", "cannot open " + path);
    char head[6] = {0};
    is.read(head, 6);
    if (is.gcount() == 6 && std::memcmp(head, kMagic, 6) == 0) {
        std::uint64_t n = get_u64(is), d = get_u64(is);
        if (!is) throw data_error("IoError", "truncated binary header: " + path);
        Matrix A(static_cast<Index>(n), static_cast<Index>(d));
        for (Index i = 0; i < A.rows(); ++i)
            for (Index j = 0; j < A.cols(); ++j) A(i, j) = get_f64(is);
        if (!is) throw data_error("IoError", "truncated binary payload: " + path);
        return A;
    }
    // text
    is.clear();
    is.seekg(0);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (row.empty()) continue;
        if (!rows.empty() && rows.front().size() != row.size())
            throw data_error("IoError", "ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("IoError", "empty matrix file: " + path);
    Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) A(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return A;
}

json matrix_to_json(const Matrix& A) {
    json rows = json::array();
    for (Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const auto n = static_cast<Index>(j.size());
    if (n == 0) return Matrix(0, 0);
    const auto d = static_cast<Index>(j.at(0).size());
    Matrix A(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < d; ++k) A(i, k) = j.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)).get<double>();
    return A;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<size_t>(i)).get<double>();
    return v;
}

}  // namespace geostream
